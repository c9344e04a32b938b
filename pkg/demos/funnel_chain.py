"""Birth-death surrogates for surfaces glued from blocks along necks.

Two chains with unit reference weight per block: constant necks (the walk
escapes the starting window) and geometrically shrinking necks (crossing
probabilities decay, so mass lingers near the start for a long time).  Both
are reversible by construction, so the even-step return probability is
nonincreasing -- verified numerically below.
"""
from massdrift.kernel import even_return_curve, evolve
from massdrift.models import FunnelChainSpec, build_funnel_chain

WINDOW = range(0, 11)
HORIZON = 10_000


def describe(name: str, spec: FunnelChainSpec) -> None:
    model = build_funnel_chain(spec)
    curve = even_return_curve(model, 0, None, 500)
    noninc = all(b <= a + 1e-15 for a, b in zip(curve, curve[1:]))
    series = evolve(model, 0, None, HORIZON,
                    snapshot_schedule=[0, 100, 1000, HORIZON])
    print(f"{name} (M = {spec.truncation_size}, eps = {spec.step_scale})")
    print(f"  return curve nonincreasing over first 500 even steps: {noninc}")
    for n in (0, 100, 1000, HORIZON):
        print(f"  window mass {{0..10}} at n = {n:>6}: "
              f"{series.window_mass(n, WINDOW):.6f}")
    print()


def main() -> None:
    describe("constant necks", FunnelChainSpec(
        (), tail=("constant", 1.0), step_scale=0.25, truncation_size=400))
    describe("geometric necks 2^-i", FunnelChainSpec(
        (), tail=("geometric", 0.5, 0.5), step_scale=0.25,
        truncation_size=400))


if __name__ == "__main__":
    main()
