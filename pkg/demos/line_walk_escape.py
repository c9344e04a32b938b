"""Exact window-mass decay for the simple random walk on the integer line.

The n-step distribution of a recurrent walk still escapes every fixed window
in the Cesaro sense much more slowly than a transient one.  This script
evolves the exact distribution on a truncated line, prints the return mass,
the window mass of a fixed box, and the Cesaro average of that window mass.
"""
import math

from massdrift.kernel import cesaro, evolve
from massdrift.models import build_lattice_model, srw_law

HORIZON = 2000
WINDOW = range(-10, 11)


def main() -> None:
    model = build_lattice_model(1, 400)
    series = evolve(model, 0, srw_law(1), HORIZON)

    print("n-step window mass on {-10..10} and return mass at 0")
    print(f"{'n':>6} {'window':>12} {'return':>12} {'clt pred.':>12}")
    for n in (10, 100, 500, 1000, 2000):
        ret = series.snapshot(n).mass_at(0)
        pred = 1.0 / math.sqrt(math.pi * n / 2) if n % 2 == 0 else 0.0
        print(f"{n:>6} {series.window_mass(n, WINDOW):>12.6f} "
              f"{ret:>12.6f} {pred:>12.6f}")

    print("\nCesaro-averaged window mass (slow decay: the walk is recurrent)")
    for n in (100, 500, 1000, 2000):
        avg = cesaro(series, n)
        mass = sum(avg.mass_at(x) for x in WINDOW)
        print(f"  first {n:>5} steps: {mass:.6f}")


if __name__ == "__main__":
    main()
