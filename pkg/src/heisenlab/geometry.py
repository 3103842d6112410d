"""Exact rational geometry of the (1/p, 1/q) exponent square.

Everything here works in :class:`fractions.Fraction`.  A float ``gamma`` is
accepted but converted to the exact binary fraction it represents, and the
region is flagged ``approximate``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "ExponentPoint",
    "RegionSpec",
    "Line",
    "necessary_region",
    "open_region",
    "constraint_lines",
    "vertex_D",
    "vertex_Dprime",
    "reflect",
    "riesz_interpolate",
    "theta_star",
    "theta_balance",
    "scaling_line",
    "scaling_line_intersections",
    "predicted_annulus_exponents",
    "interpolated_annulus_exponent",
    "dyadic_partial_sums",
    "distance_to_boundary",
]


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return Fraction(v)
    return Fraction(v)


@dataclass(frozen=True)
class ExponentPoint:
    inv_p: Fraction
    inv_q: Fraction

    def __post_init__(self):
        a, b = _frac(self.inv_p), _frac(self.inv_q)
        if not (0 <= a <= 1 and 0 <= b <= 1):
            raise ValueError(f"exponent point ({a}, {b}) outside the unit square")
        object.__setattr__(self, "inv_p", a)
        object.__setattr__(self, "inv_q", b)

    @property
    def p(self) -> Fraction | float:
        return 1 / self.inv_p if self.inv_p else float("inf")

    @property
    def q(self) -> Fraction | float:
        return 1 / self.inv_q if self.inv_q else float("inf")

    def as_floats(self) -> tuple[float, float]:
        return float(self.inv_p), float(self.inv_q)

    def __str__(self) -> str:
        return f"{self.inv_p}, {self.inv_q}"


@dataclass(frozen=True)
class RegionSpec:
    n: int
    gamma: Fraction = Fraction(0)
    approximate: bool = False

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        approx = self.approximate or isinstance(self.gamma, float)
        g = _frac(self.gamma)
        if not (0 <= g < 2 * self.n):
            raise ValueError(f"gamma must satisfy 0 <= gamma < 2n = {2 * self.n}, got {g}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "approximate", approx)


@dataclass(frozen=True)
class Line:
    """The line inv_q = slope * inv_p + intercept, with a readable label."""

    label: str
    slope: Fraction
    intercept: Fraction

    def at(self, inv_p: Fraction) -> Fraction:
        return self.slope * inv_p + self.intercept

    def to_dict(self) -> dict:
        return {"label": self.label, "slope": str(self.slope), "intercept": str(self.intercept)}


def constraint_lines(r: RegionSpec) -> list[Line]:
    n, g = r.n, r.gamma
    return [
        Line("1/q <= 1/p", Fraction(1), Fraction(0)),
        Line("1/q >= (2n+1)/p - 2n", Fraction(2 * n + 1), Fraction(-2 * n)),
        Line("1/q >= 1/((2n+1)p)", Fraction(1, 2 * n + 1), Fraction(0)),
        Line("1/q >= 1/p - (2n-gamma)/(2n+2)", Fraction(1), -(2 * n - g) / (2 * n + 2)),
    ]


def _slacks(r: RegionSpec, pt: ExponentPoint) -> list[Fraction]:
    """Nonnegative slack for each necessary condition iff it holds."""
    x, y = pt.inv_p, pt.inv_q
    diag, knapp, dual, frac_line = constraint_lines(r)
    return [diag.at(x) - y, y - knapp.at(x), y - dual.at(x), y - frac_line.at(x)]


def necessary_region(r: RegionSpec, pt: ExponentPoint) -> bool:
    """Closed region cut out by the necessary conditions for boundedness."""
    return all(s >= 0 for s in _slacks(r, pt))


def open_region(r: RegionSpec, pt: ExponentPoint) -> bool:
    """Interior of :func:`necessary_region` (all conditions strict)."""
    return all(s > 0 for s in _slacks(r, pt))


def vertex_D(r: RegionSpec) -> ExponentPoint:
    n, g = r.n, r.gamma
    den = 2 * n * (2 * n + 2)
    return ExponentPoint(Fraction(4 * n * n + 2 * n) / den + g / den, (2 * n + (2 * n + 1) * g) / den)


def reflect(pt: ExponentPoint) -> ExponentPoint:
    """Mirror across the duality axis 1/q = 1 - 1/p."""
    return ExponentPoint(1 - pt.inv_q, 1 - pt.inv_p)


def vertex_Dprime(r: RegionSpec) -> ExponentPoint:
    return reflect(vertex_D(r))


def riesz_interpolate(p0: ExponentPoint, p1: ExponentPoint, theta) -> ExponentPoint:
    theta = _frac(theta)
    if not 0 <= theta <= 1:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    return ExponentPoint((1 - theta) * p0.inv_p + theta * p1.inv_p,
                         (1 - theta) * p0.inv_q + theta * p1.inv_q)


def theta_star(r: RegionSpec) -> Fraction:
    """The theta balancing the dyadic growth 2^{k gamma} against the decay 2^{-k(2n-gamma)}.

    Solving k gamma (1 - theta) = k (2n - gamma) theta gives gamma / (2n); the
    weight (1 - theta) sits on ((2n+1)/(2n+2), 1/(2n+2)) and theta on (1, 1),
    so interpolating there lands on vertex D.  (2n - gamma)/(2n) coincides
    with this only at gamma = n.
    """
    return r.gamma / (2 * r.n)


def theta_balance(r: RegionSpec, theta, k: int) -> Fraction:
    """k gamma (1 - theta) - k (2n - gamma) theta; zero exactly at :func:`theta_star`."""
    theta = _frac(theta)
    return k * r.gamma * (1 - theta) - k * (2 * r.n - r.gamma) * theta


def scaling_line(n: int, pt: ExponentPoint) -> bool:
    """Whether 1/q = 1/p - 2n/(2n+2), the only line compatible with dilations."""
    return pt.inv_q == pt.inv_p - Fraction(2 * n, 2 * n + 2)


def _intersect(l1: Line, l2: Line) -> ExponentPoint:
    if l1.slope == l2.slope:
        raise ValueError(f"lines {l1.label!r} and {l2.label!r} are parallel")
    x = (l2.intercept - l1.intercept) / (l1.slope - l2.slope)
    return ExponentPoint(x, l1.at(x))


def scaling_line_intersections(n: int) -> list[ExponentPoint]:
    """Where the scaling line meets the two lower edges of the gamma = 0 triangle."""
    lines = constraint_lines(RegionSpec(n))
    scale = Line("scaling", Fraction(1), -Fraction(2 * n, 2 * n + 2))
    return [_intersect(scale, lines[1]), _intersect(scale, lines[2])]


def predicted_annulus_exponents(r: RegionSpec, k: int) -> tuple[Fraction, Fraction]:
    """log2 of the dyadic bounds for the k-th annulus piece.

    First entry: the L^1 -> L^1 bound (its mass, ~ 2^{-k(2n-gamma)}).  Second:
    the bound at the endpoint ((2n+1)/(2n+2), 1/(2n+2)), ~ 2^{k gamma}.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    return -k * (2 * r.n - r.gamma), k * r.gamma


def interpolated_annulus_exponent(r: RegionSpec, k: int, theta) -> Fraction:
    """log2 bound at (1 - theta) * endpoint + theta * (1, 1), by convexity."""
    theta = _frac(theta)
    b11, bend = predicted_annulus_exponents(r, k)
    return (1 - theta) * bend + theta * b11


def dyadic_partial_sums(r: RegionSpec, tau, K: int) -> list[float]:
    """Partial sums of sum_k 2^{-k(2n-gamma) tau}, k = 0..K (floating point)."""
    rate = float((2 * r.n - r.gamma) * _frac(tau))
    total, out = 0.0, []
    for k in range(K + 1):
        total += 2.0 ** (-k * rate)
        out.append(total)
    return out


def distance_to_boundary(r: RegionSpec, pt: ExponentPoint) -> float:
    """Euclidean distance from ``pt`` to the boundary of the closed region (float)."""
    from math import hypot

    verts = [(0.0, 0.0), vertex_Dprime(r).as_floats(), vertex_D(r).as_floats(), (1.0, 1.0)]
    if verts[1] == verts[2]:
        verts.pop(2)
    x, y = pt.as_floats()
    best = float("inf")
    for (ax, ay), (bx, by) in zip(verts, verts[1:] + verts[:1]):
        dx, dy = bx - ax, by - ay
        t = max(0.0, min(1.0, ((x - ax) * dx + (y - ay) * dy) / (dx * dx + dy * dy)))
        best = min(best, hypot(x - ax - t * dx, y - ay - t * dy))
    return best
