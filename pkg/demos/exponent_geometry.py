"""Exact vertices of the candidate type set for a few (n, gamma)."""

from fractions import Fraction

from heisenlab import geometry as geo


def main():
    for n in (1, 2, 3):
        for gamma in (Fraction(0), Fraction(1, 2), Fraction(n)):
            r = geo.RegionSpec(n, gamma)
            print(f"n={n} gamma={gamma}: D=({geo.vertex_D(r)}) D'=({geo.vertex_Dprime(r)}) "
                  f"theta*={geo.theta_star(r)}")


if __name__ == "__main__":
    main()
