"""Orbits of x -> x - 1/x: recurrence without positive occupation density.

The map preserves Lebesgue measure on the line, an infinite measure, and is
conservative: orbits come back near their start infinitely often.  Yet the
fraction of time spent in any fixed window tends to zero.  This is the
deterministic (non-random-walk) face of escape of mass.
"""
from massdrift.models import BooleOrbitSpec, boole_orbit


def main() -> None:
    starts = tuple(0.4 + 0.31459 * k for k in range(10))
    spec = BooleOrbitSpec(start_points=starts, horizon=100_000)
    report = boole_orbit(spec)

    print(f"{'start':>10} {'occ@1e4':>10} {'occ@1e5':>10} "
          f"{'revisits>1e3':>13} {'drift bound':>12}")
    for o in report.orbits:
        frac = dict(o.occupation_curve)
        late = sum(1 for n in o.revisit_times if n > 1000)
        print(f"{o.start:>10.5f} {frac[10_000]:>10.4f} "
              f"{frac[100_000]:>10.4f} {late:>13} {o.drift_bound:>12.2e}")

    mean4 = sum(dict(o.occupation_curve)[10_000] for o in report.orbits) / 10
    mean5 = sum(o.final_fraction for o in report.orbits) / 10
    print(f"\nmean occupation of [-10,10]: {mean4:.4f} at 1e4 steps, "
          f"{mean5:.4f} at 1e5 steps")
    print("every orbit keeps revisiting its start while its window "
          "occupation drains away")


if __name__ == "__main__":
    main()
