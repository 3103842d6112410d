"""Twisted convolution against the chirp e_{lam A} rescales L2 norms exactly.

Prints measured and predicted norms for a Gaussian on [-8, 8]^2 and shows
how the relative error moves as the grid is refined.
"""

import numpy as np

from heisenlab.convolution import twisted_identity_residual
from heisenlab.grid import GridSpec, SliceFunction


def gaussian(x1, x2):
    return np.exp(-(x1**2 + x2**2) / 2)


def main():
    print(f"{'A':>10} {'lam':>5} {'N':>5} {'measured':>10} {'predicted':>10} {'rel err':>9}")
    for name, A in (("I", np.eye(2)), ("diag(1,2)", np.diag([1.0, 2.0]))):
        for lam in (0.5, 1.0, 2.0):
            for N in (128, 256, 384):
                f = SliceFunction.from_callable(GridSpec(1, 8.0, N, 8.0, 8), gaussian)
                r = twisted_identity_residual(f, A, lam)
                print(f"{name:>10} {lam:5.1f} {N:5d} {r.lhs:10.5f} {r.rhs:10.5f} {r.rel_err:9.2e}")


if __name__ == "__main__":
    main()
