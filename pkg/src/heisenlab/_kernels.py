"""Compiled inner loops.

Every kernel parallelizes over output points only; each output row is
accumulated by one thread in a fixed atom order, so results do not depend
on the thread count.
"""

import os

import numba
import numpy as np

if "NUMBA_THREADING_LAYER" not in os.environ:
    # an outdated TBB otherwise triggers a warning on every first call
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]

_threads = os.environ.get("HEISENLAB_THREADS")
if _threads:
    numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))


@numba.njit(parallel=True, cache=True)
def measure_convolution(f, N, dim, xaxis, ht, offsets, cweights, y, s, w):
    """out[p, k] = sum_atoms w * f~(x_p - y, t_k - s - <x_p, y>).

    ``f`` is (N**dim, Nt).  ``offsets[a, c]`` are the per-axis index shifts of
    the spatial interpolation corners of atom ``a`` and ``cweights[a, c]``
    their multilinear weights (zero for unused corners).
    """
    S, Nt = f.shape
    M, C = cweights.shape
    n = dim // 2
    out = np.zeros_like(f)
    for p in numba.prange(S):
        idx = np.empty(dim, np.int64)
        stride = 1
        for ax in range(dim - 1, -1, -1):
            idx[ax] = (p // stride) % N
            stride *= N
        acc = np.zeros(Nt, f.dtype)
        for a in range(M):
            sym = 0.0
            for k in range(n):
                sym += xaxis[idx[k]] * y[a, n + k] - xaxis[idx[n + k]] * y[a, k]
            shift = (s[a] + sym) / ht
            m = int(np.floor(shift))
            alpha = shift - m
            for c in range(C):
                cw = cweights[a, c]
                if cw == 0.0:
                    continue
                src = 0
                ok = True
                for ax in range(dim):
                    j = idx[ax] - offsets[a, c, ax]
                    if j < 0 or j >= N:
                        ok = False
                        break
                    src = src * N + j
                if not ok:
                    continue
                wt = w[a] * cw
                w1 = wt * (1.0 - alpha)
                w0 = wt * alpha
                kmin = max(0, m)
                kmax = min(Nt - 1, m + Nt)
                for k in range(kmin, kmax + 1):
                    k1 = k - m
                    if k1 < Nt:
                        acc[k] += w1 * f[src, k1]
                    if k1 >= 1:
                        acc[k] += w0 * f[src, k1 - 1]
        out[p, :] = acc
    return out
