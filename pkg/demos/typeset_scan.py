"""Classify a handful of exponent pairs for the n = 1 paraboloid-type measure.

Each pair is estimated on three halving grids; a flat norm means bounded, a
norm growing like a power of 1/h means unbounded.  Takes about a minute.
"""

import logging
from fractions import Fraction

from heisenlab import geometry as geo
from heisenlab.cli import ExperimentConfig, scan_setup
from heisenlab.norms import scan_typeset


def main():
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    cfg = ExperimentConfig()
    cfg.scan = {"points": [("1/2", "1/2"), ("21/40", "13/40"), ("19/20", "1/20"), ("4/5", "1/20")]}
    points, grids, build = scan_setup(cfg)
    region = geo.RegionSpec(1, Fraction(0))
    res = scan_typeset(region, points, build, grids)
    for s in res.samples:
        print(f"({s.point}): slope {s.estimate.growth_slope:+.3f} -> {s.classification:<12} "
              f"theory: {'bounded' if s.theory_member else 'unbounded'}")
    print(f"agreement {res.agreement}/{len(res.samples)}")


if __name__ == "__main__":
    main()
