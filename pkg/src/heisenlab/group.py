"""Exact algebra of the Heisenberg group H^n = R^{2n} x R.

The group law is ``(x, t) . (y, s) = (x + y, t + s + x^T J y)`` where ``J`` is
the standard symplectic matrix ``[[0, I_n], [-I_n, 0]]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GroupElement",
    "DegenerateMatrixError",
    "make_j",
    "symmetrize",
    "symplectic",
    "group_mul",
    "group_inv",
    "dilate",
    "phi",
    "det_perturbed",
    "lemma1_diagonal",
    "is_nondegenerate",
    "matrix_to_json",
    "matrix_from_json",
]

DEFAULT_DET_TOL = 1e-9


class DegenerateMatrixError(ValueError):
    """Raised when det(2A + J) vanishes and an identity needs it nonzero."""


@dataclass(frozen=True, eq=False)
class GroupElement:
    x: np.ndarray
    t: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1 or x.size == 0 or x.size % 2:
            raise ValueError(f"x must be a vector of even length, got shape {x.shape}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", float(self.t))

    @property
    def n(self) -> int:
        return self.x.size // 2

    @classmethod
    def identity(cls, n: int) -> "GroupElement":
        return cls(np.zeros(2 * n), 0.0)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return group_mul(self, other)

    def __iter__(self):
        yield self.x
        yield self.t

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.t == other.t and np.array_equal(self.x, other.x)

    __hash__ = None


def make_j(n: int) -> np.ndarray:
    """Return the 2n x 2n matrix [[0, I_n], [-I_n, 0]] (integer dtype)."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    eye = np.eye(n, dtype=np.int64)
    zero = np.zeros((n, n), dtype=np.int64)
    return np.block([[zero, eye], [-eye, zero]])


def symmetrize(a) -> np.ndarray:
    """Symmetric part (A + A^T) / 2; the quadratic form y^T A y is unchanged."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2:
        raise ValueError(f"expected a 2n x 2n matrix, got shape {a.shape}")
    return 0.5 * (a + a.T)


def _check_vec(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0 or v.size % 2:
        raise ValueError(f"{name} must be a vector of even length, got shape {v.shape}")
    return v


def symplectic(x, y) -> float:
    """The symplectic form x^T J y."""
    x = _check_vec(x, "x")
    y = _check_vec(y, "y")
    if x.size != y.size:
        raise ValueError(f"dimension mismatch: {x.size} vs {y.size}")
    n = x.size // 2
    # x^T J y = x_a . y_b - x_b . y_a without forming J
    return float(x[:n] @ y[n:] - x[n:] @ y[:n])


def symplectic_many(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row-wise symplectic form for broadcastable arrays of shape (..., 2n)."""
    n = x.shape[-1] // 2
    return np.sum(x[..., :n] * y[..., n:], axis=-1) - np.sum(x[..., n:] * y[..., :n], axis=-1)


def group_mul(a: GroupElement, b: GroupElement) -> GroupElement:
    if a.x.size != b.x.size:
        raise ValueError(f"dimension mismatch: H^{a.n} vs H^{b.n}")
    return GroupElement(a.x + b.x, a.t + b.t + symplectic(a.x, b.x))


def group_inv(g: GroupElement) -> GroupElement:
    return GroupElement(-g.x, -g.t)


def dilate(delta: float, g: GroupElement) -> GroupElement:
    """Non-isotropic dilation (x, t) -> (delta x, delta^2 t)."""
    if not delta > 0:
        raise ValueError(f"dilation factor must be positive, got {delta!r}")
    return GroupElement(delta * g.x, delta * delta * g.t)


def phi(a, y) -> float | np.ndarray:
    """Quadratic form y^T A y.  ``y`` may be a single vector or an (m, 2n) stack."""
    a = np.asarray(a, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != a.shape[0]:
        raise ValueError(f"dimension mismatch: A is {a.shape}, y has trailing size {y.shape[-1]}")
    if y.ndim == 1:
        return float(y @ a @ y)
    return np.einsum("...i,ij,...j->...", y, a, y)


def det_perturbed(a, sign: int = +1) -> float:
    """det(2A + sign * J), by LU factorization with partial pivoting."""
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    a = np.asarray(a, dtype=float)
    return float(np.linalg.det(2.0 * a + sign * make_j(a.shape[0] // 2)))


def lemma1_diagonal(a) -> float:
    """Closed form of det(A +- J) for diagonal A: prod_i (a_ii a_{n+i,n+i} + 1)."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2:
        raise ValueError(f"expected a 2n x 2n matrix, got shape {a.shape}")
    d = np.diag(a)
    if np.any(a - np.diag(d)):
        raise ValueError("lemma1_diagonal requires a diagonal matrix")
    n = a.shape[0] // 2
    return float(np.prod(d[:n] * d[n:] + 1.0))


def is_nondegenerate(a, tol: float = DEFAULT_DET_TOL) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return abs(det_perturbed(a, +1)) > tol


def matrix_to_json(a) -> str:
    return json.dumps(np.asarray(a, dtype=float).tolist())


def matrix_from_json(text: str) -> np.ndarray:
    """Parse a row-major nested list and symmetrize it."""
    return symmetrize(np.array(json.loads(text), dtype=float))
