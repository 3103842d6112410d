"""Group convolution, twisted convolution and the Fourier-side identities.

Conventions: the Fourier transform is ``f^(xi) = int f(x) exp(-i xi.x) dx``
and the partial transform in the central variable is
``f^lam(x) = int f(x, t) exp(-i lam t) dt``.  All integrals are Riemann
sums over the grid nodes.
"""

from __future__ import annotations

import itertools
import string
from typing import NamedTuple

import numpy as np
from scipy import fft as sfft

from . import _kernels
from .grid import GridFunction, GridSpec, SliceFunction
from .group import DegenerateMatrixError, det_perturbed, is_nondegenerate, make_j, symmetrize
from .measures import DiscreteMeasure

__all__ = [
    "convolve_measure",
    "convolve_values",
    "oscillatory_factor",
    "twisted_convolve",
    "partial_fourier_t",
    "fourier_spatial",
    "pointwise_twisted_identity_residual",
    "twisted_identity_residual",
    "TwistedIdentity",
    "lp_norm",
    "dilate_function",
    "inner",
]

_SNAP = 1e-9


def _corner_table(y: np.ndarray, h: float):
    """Multilinear corners of ``x - y`` relative to node ``x``, per atom."""
    q = y / h
    base = np.floor(q)
    frac = q - base
    # atoms sitting on nodes up to roundoff get a single corner
    up = frac > 1 - _SNAP
    base[up] += 1
    frac[up | (frac < _SNAP)] = 0.0
    base = base.astype(np.int64)
    m, dim = y.shape
    if not np.any(frac):
        return base[:, None, :], np.ones((m, 1))
    corners = np.array(list(itertools.product((0, 1), repeat=dim)), dtype=np.int64)
    offsets = base[:, None, :] + corners[None, :, :]
    wts = np.where(corners[None, :, :] == 1, frac[:, None, :], 1.0 - frac[:, None, :])
    return offsets, np.prod(wts, axis=2)


def convolve_values(values: np.ndarray, grid: GridSpec, m: DiscreteMeasure) -> np.ndarray:
    """Array-level right convolution ``f * m`` on ``grid`` (zero extension)."""
    if m.n != grid.n:
        raise ValueError(f"measure lives on H^{m.n}, grid on H^{grid.n}")
    if len(m) == 0:
        return np.zeros_like(values)
    N, Nt = grid.spatial_points, grid.t_points
    flat = np.ascontiguousarray(values.reshape(-1, Nt))
    if not np.iscomplexobj(flat):
        flat = flat.astype(np.float64, copy=False)
    offsets, cw = _corner_table(m.y, grid.hx)
    out = _kernels.measure_convolution(
        flat, N, grid.dim, grid.spatial_axis, grid.ht, offsets, cw,
        np.ascontiguousarray(m.y), np.ascontiguousarray(m.s), np.ascontiguousarray(m.w))
    return out.reshape(values.shape)


def convolve_measure(f: GridFunction, m: DiscreteMeasure) -> GridFunction:
    """(f * m)(x, t) = sum_atoms w f~(x - y, t - s - x^T J y).

    ``f~`` is the multilinear interpolant of ``f``, zero outside the box.
    The output lives on the input grid; mass pushed outside the box is lost.
    """
    return GridFunction(f.grid, convolve_values(f.values, f.grid, m))


def inner(u, v) -> float:
    """Real L^2 pairing sum(u * conj(v)) * cell volume."""
    return complex(np.sum(u.values * np.conj(v.values)) * u.cell_volume)


def oscillatory_factor(A, lam: float, grid: GridSpec) -> SliceFunction:
    """Samples of e_{lam A}(x) = exp(i lam x^T A x)."""
    A = symmetrize(A)
    mesh = grid.spatial_mesh()
    q = sum(A[i, j] * mesh[i] * mesh[j] for i in range(grid.dim) for j in range(grid.dim))
    return SliceFunction(grid, np.exp(1j * lam * q))


def _einsum_reduce(n: int) -> str:
    # out[b] = sum_c prod_k E[b_k, c_k] C[c, b]
    letters = string.ascii_letters
    b = letters[:n]
    c = letters[n:2 * n]
    factors = ",".join(b[k] + c[k] for k in range(n))
    return f"{factors},{c}{b}->{b}"


def twisted_convolve(f: SliceFunction, g: SliceFunction, lam: float) -> SliceFunction:
    """(f x_lam g)(x) = h^{2n} sum_y f~(x - y) g(y) exp(-i lam x^T J y).

    The Riemann sum is evaluated exactly.  Writing x = (a, b), y = (c, d) in
    half-coordinates, x^T J y = a.d - b.c, so for fixed ``a`` the sum over
    ``d`` is an ordinary discrete convolution (done by FFT) and the sum over
    ``c`` a small dense contraction.
    """
    if f.grid != g.grid:
        raise ValueError("twisted convolution needs matching spatial grids")
    grid = f.grid
    n, N, h = grid.n, grid.spatial_points, grid.hx
    x = grid.spatial_axis
    half = N // 2
    P = 2 * N
    first = tuple(range(n))
    last = tuple(range(n, 2 * n))

    F = np.asarray(f.values, dtype=complex)
    G = np.asarray(g.values, dtype=complex)
    # Fpad[a - c + N] == F[a - c + N/2] along each of the first n axes
    Fpad = np.zeros((2 * N,) * n + (N,) * n, dtype=complex)
    Fpad[(slice(half, half + N),) * n] = F
    Fhat = sfft.fftn(Fpad, s=(P,) * n, axes=last)

    E1 = np.exp(-1j * lam * np.multiply.outer(x, x))
    E2 = np.conj(E1)
    reduce = _einsum_reduce(n)
    crop = (slice(None),) * n + (slice(half, half + N),) * n
    out = np.empty((N,) * (2 * n), dtype=complex)
    arange = np.arange(N)
    for a in np.ndindex(*(N,) * n):
        phase = E1[a[0]]
        for k in range(1, n):
            phase = np.multiply.outer(phase, E1[a[k]])
        Mhat = sfft.fftn(G * phase, s=(P,) * n, axes=last)
        rows = np.ix_(*[a[k] - arange + N for k in range(n)])
        C = sfft.ifftn(Fhat[rows] * Mhat, axes=last)[crop]
        out[a] = np.einsum(reduce, *([E2] * n), C)
    return SliceFunction(grid, out * h ** (2 * n))


def partial_fourier_t(f: GridFunction, lam: float) -> SliceFunction:
    """f^lam(x) = sum_k f(x, t_k) exp(-i lam t_k) h_t."""
    grid = f.grid
    kern = np.exp(-1j * lam * grid.t_axis) * grid.ht
    return SliceFunction(grid, f.values @ kern)


def fourier_spatial(f: SliceFunction, xi) -> complex:
    """f^(xi) = h^{2n} sum_x f(x) exp(-i xi.x) at a single frequency."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (f.grid.dim,):
        raise ValueError(f"xi must have length {f.grid.dim}")
    x = f.grid.spatial_axis
    v = np.asarray(f.values, dtype=complex)
    for k in range(f.grid.dim):
        v = np.tensordot(np.exp(-1j * xi[k] * x), v, axes=(0, 0))
    return complex(v) * f.cell_volume


def pointwise_twisted_identity_residual(f: SliceFunction, A, lam: float, sample_points) -> float:
    """Max relative gap in (f x_lam e_{lam A})(x) = e_{lam A}(x) g^(lam (2A + J) x).

    Here g = e_{lam A} f.  The left side is a direct sum at each sample
    point, the right side an independent Fourier sum.
    """
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    A = symmetrize(A)
    grid = f.grid
    pts = np.atleast_2d(np.asarray(sample_points, dtype=float))
    ys = grid.spatial_nodes()
    eA = oscillatory_factor(A, lam, grid)
    g = SliceFunction(grid, eA.values * f.values)
    M = lam * (2.0 * A + make_j(grid.n))
    n = grid.n
    worst = 0.0
    for x in pts:
        fx = f(x[None, :] - ys)
        sym = ys[:, n:] @ x[:n] - ys[:, :n] @ x[n:]
        lhs = np.sum(fx * eA.values.ravel() * np.exp(-1j * lam * sym)) * grid.spatial_cell_volume
        rhs = np.exp(1j * lam * (x @ A @ x)) * fourier_spatial(g, M @ x)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return worst


class TwistedIdentity(NamedTuple):
    lhs: float
    rhs: float
    rel_err: float


def twisted_identity_residual(f: SliceFunction, A, lam: float) -> TwistedIdentity:
    """Compare ||f x_lam e_{lam A}||_2 with (2 pi)^n |lam|^-n |det(2A+J)|^-1/2 ||f||_2."""
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    if not is_nondegenerate(A):
        raise DegenerateMatrixError("det(2A + J) = 0: the L2 identity does not apply")
    n = f.grid.n
    lhs = lp_norm(twisted_convolve(f, oscillatory_factor(A, lam, f.grid), lam), 2)
    rhs = (2 * np.pi) ** n * abs(lam) ** -n * abs(det_perturbed(A, +1)) ** -0.5 * lp_norm(f, 2)
    return TwistedIdentity(lhs, rhs, abs(lhs - rhs) / rhs)


def lp_norm(f, p: float) -> float:
    """Discrete L^p norm (sum |f|^p * cell volume)^(1/p); p = inf gives the max."""
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p!r}")
    a = np.abs(f.values if hasattr(f, "values") else f)
    if np.isinf(p):
        return float(a.max(initial=0.0))
    scale = a.max(initial=0.0)
    if scale == 0:
        return 0.0
    # scale first so large p does not underflow
    return float(scale * (np.sum((a / scale) ** p) * f.cell_volume) ** (1.0 / p))


def _resample_axis(v: np.ndarray, axis: int, pos: np.ndarray) -> np.ndarray:
    """Linear resampling of ``v`` along ``axis`` at fractional indices ``pos``."""
    n = v.shape[axis]
    i0 = np.floor(pos).astype(np.int64)
    fr = pos - i0
    snap = np.abs(fr) < _SNAP
    fr[snap] = 0.0
    up = fr > 1 - _SNAP
    i0[up] += 1
    fr[up] = 0.0
    out = 0.0
    for idx, wt in ((i0, 1.0 - fr), (i0 + 1, fr)):
        valid = (idx >= 0) & (idx < n) & (wt != 0)
        taken = np.take(v, np.clip(idx, 0, n - 1), axis=axis)
        shape = [1] * v.ndim
        shape[axis] = -1
        out = out + taken * np.where(valid, wt, 0.0).reshape(shape)
    return out


def dilate_function(f: GridFunction, delta: float) -> GridFunction:
    """f_delta(x, t) = f(delta x, delta^2 t), zero outside the box.

    Exact index gathers when the dilated nodes land on nodes (integer
    ``delta`` on these grids), multilinear interpolation otherwise.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    grid = f.grid
    L, h, T, ht = grid.spatial_halfwidth, grid.hx, grid.t_halfwidth, grid.ht
    xpos = (delta * grid.spatial_axis + L) / h
    tpos = (delta**2 * grid.t_axis + T) / ht
    v = f.values
    for ax in range(grid.dim):
        v = _resample_axis(v, ax, xpos)
    v = _resample_axis(v, grid.dim, tpos)
    return GridFunction(grid, np.asarray(v, dtype=f.values.dtype))
