"""Discretized singular measures carried by the graph t = y^T A y.

A :class:`DiscreteMeasure` is a weighted list of atoms ``(y, s, w)`` with
``s = y^T A y``.  Atoms produced here sit on the spatial nodes of a
:class:`~heisenlab.grid.GridSpec`; their weights are midpoint-rule cell
volumes, optionally multiplied by the cutoff and a power of ``|y|``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .grid import GridSpec
from .group import phi, symmetrize

__all__ = [
    "CutoffSpec",
    "DiscreteMeasure",
    "UnresolvedAnnulusError",
    "eta",
    "eta_profile",
    "discretize_mu",
    "discretize_nu",
    "annulus_measure",
    "inner_remainder",
    "surface_density",
    "reflect_measure",
    "identity_measure",
]


class UnresolvedAnnulusError(ValueError):
    """The dyadic annulus is too thin for the grid; refine the grid."""


@dataclass(frozen=True)
class CutoffSpec:
    inner_radius: float = 1.0
    outer_radius: float = 2.0


def _bump(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def eta_profile(r, spec: CutoffSpec = CutoffSpec()):
    """Radial profile of the cutoff: 1 on [0, r1], 0 on [r2, inf), C^inf in between."""
    r = np.asarray(r, dtype=float)
    r1, r2 = spec.inner_radius, spec.outer_radius
    # rescale the transition to (0, 1) so the default spec gives g(2-r)/(g(2-r)+g(r-1))
    u = (r - r1) / (r2 - r1)
    a, b = _bump(1.0 - u), _bump(u)
    out = np.where(r <= r1, 1.0, 0.0)
    mid = (r > r1) & (r < r2)
    out = np.where(mid, a / np.where(mid, a + b, 1.0), out)
    return out if out.ndim else float(out)


def eta(spec: CutoffSpec, y):
    """Cutoff eta(y) = psi(|y|) for a vector or an (m, 2n) stack of vectors."""
    y = np.asarray(y, dtype=float)
    return eta_profile(np.linalg.norm(y, axis=-1), spec)


def _check_gamma(gamma, n: int) -> float:
    g = float(Fraction(gamma)) if isinstance(gamma, (str, Fraction)) else float(gamma)
    if not (0.0 <= g < 2 * n):
        raise ValueError(f"gamma must lie in [0, {2 * n}), got {gamma!r}")
    return g


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Weighted atoms on the graph of ``y -> y^T A y``.

    ``s`` is always computed from ``A`` and ``y`` at construction, so every
    atom lies on the graph exactly.
    """

    A: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    description: str = "custom"
    s: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        A = symmetrize(self.A)
        y = np.asarray(self.y, dtype=float).reshape(-1, A.shape[0])
        w = np.asarray(self.w, dtype=float).reshape(-1)
        if y.shape[0] != w.shape[0]:
            raise ValueError("y and w must have the same number of atoms")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "s", phi(A, y) if len(w) else np.zeros(0))

    @property
    def n(self) -> int:
        return self.A.shape[0] // 2

    @property
    def radii(self) -> np.ndarray:
        return np.linalg.norm(self.y, axis=1)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.w))

    def __len__(self) -> int:
        return len(self.w)

    def select(self, mask, description: str | None = None) -> "DiscreteMeasure":
        mask = np.asarray(mask)
        return DiscreteMeasure(self.A, self.y[mask], self.w[mask], description or self.description)

    def scaled(self, c: float) -> "DiscreteMeasure":
        if c < 0:
            raise ValueError("measures can only be scaled by nonnegative factors")
        return DiscreteMeasure(self.A, self.y, c * self.w, self.description)

    def to_json(self) -> str:
        atoms = np.column_stack([self.y, self.s, self.w]).tolist()
        return json.dumps({"description": self.description, "A": self.A.tolist(), "atoms": atoms})

    @classmethod
    def from_json(cls, text: str) -> "DiscreteMeasure":
        d = json.loads(text)
        A = np.array(d["A"], dtype=float)
        atoms = np.array(d["atoms"], dtype=float).reshape(-1, A.shape[0] + 2)
        m = cls(A, atoms[:, :-2], atoms[:, -1], d.get("description", "custom"))
        if not np.allclose(m.s, atoms[:, -2], rtol=1e-12, atol=1e-12):
            raise ValueError("atoms do not lie on the graph of the stored quadratic form")
        return m


def identity_measure(n: int, weight: float = 1.0, A=None) -> DiscreteMeasure:
    """Single atom at the group identity."""
    A = np.zeros((2 * n, 2 * n)) if A is None else A
    return DiscreteMeasure(A, np.zeros((1, 2 * n)), [weight], "identity")


def discretize_mu(A, grid: GridSpec, support_radius: float = 2.0) -> DiscreteMeasure:
    """Lebesgue measure on ``|y| <= support_radius`` lifted to the graph."""
    if not 0 < support_radius <= grid.spatial_halfwidth:
        raise ValueError(
            f"support_radius {support_radius} must be in (0, {grid.spatial_halfwidth}]")
    nodes = grid.spatial_nodes()
    keep = np.sum(nodes**2, axis=1) <= support_radius**2
    w = np.full(int(keep.sum()), grid.spatial_cell_volume)
    return DiscreteMeasure(A, nodes[keep], w, "mu_A")


def discretize_nu(A, gamma, grid: GridSpec, spec: CutoffSpec = CutoffSpec()) -> DiscreteMeasure:
    """Atoms weighted by eta(y) |y|^-gamma; the origin cell is dropped when gamma > 0."""
    g = _check_gamma(gamma, grid.n)
    if grid.spatial_halfwidth < spec.outer_radius:
        raise ValueError("grid box must contain the support of the cutoff")
    nodes = grid.spatial_nodes()
    r = np.linalg.norm(nodes, axis=1)
    keep = r < spec.outer_radius
    if g > 0:
        keep &= r > 0
    nodes, r = nodes[keep], r[keep]
    w = eta_profile(r, spec) * grid.spatial_cell_volume
    if g > 0:
        w = w * r**-g
    return DiscreteMeasure(A, nodes, w, "nu_gamma")


def _annulus_mask(r, k: int):
    return (r > 2.0**-k) & (r <= 2.0 ** (1 - k))


def annulus_measure(A, gamma, k: int, grid: GridSpec, spec: CutoffSpec = CutoffSpec(),
                    nu: DiscreteMeasure | None = None) -> DiscreteMeasure:
    """Restriction of nu_gamma to the shell 2^-k < |y| <= 2^(1-k)."""
    if k < 0 or int(k) != k:
        raise ValueError("k must be a nonnegative integer")
    if 2.0**-k < 2 * grid.hx:
        raise UnresolvedAnnulusError(
            f"annulus k={k} has inner radius {2.0**-k} < 2 h_x = {2 * grid.hx}; refine the grid")
    nu = discretize_nu(A, gamma, grid, spec) if nu is None else nu
    return nu.select(_annulus_mask(nu.radii, k), "nu_gamma_k")


def inner_remainder(nu: DiscreteMeasure, K: int) -> DiscreteMeasure:
    """Atoms of ``nu`` with |y| <= 2^-K (what the annuli k = 0..K leave out)."""
    return nu.select(nu.radii <= 2.0**-K, "nu_gamma_remainder")


def surface_density(A, y):
    """sqrt(1 + |grad phi(y)|^2) = sqrt(1 + |2 A y|^2)."""
    A = symmetrize(A)
    grad = 2.0 * np.asarray(y, dtype=float) @ A.T
    return np.sqrt(1.0 + np.sum(grad**2, axis=-1))


def reflect_measure(m: DiscreteMeasure) -> DiscreteMeasure:
    """Pushforward under group inversion (y, s) -> (-y, -s).

    The image lives on the graph of ``-phi``, so the stored form becomes ``-A``.
    """
    return DiscreteMeasure(-m.A, -m.y, m.w, m.description + "_reflected")
