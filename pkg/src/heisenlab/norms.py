"""Estimating ||T||_{p -> q} for measure-convolution operators.

The estimator is the nonlinear power method

    f <- normalize_p( J_{p'}( T^* J_q(T f) ) ),    J_r(g) = |g|^{r-1} sign(g),

whose fixed points are the critical points of ``||Tf||_q / ||f||_p``.  It
yields lower bounds; the growth of those bounds under grid refinement is
the numerical stand-in for membership in the type set.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .convolution import convolve_values, dilate_function
from .geometry import ExponentPoint, RegionSpec, necessary_region, open_region
from .grid import GridFunction, GridSpec
from .measures import DiscreteMeasure, reflect_measure

__all__ = [
    "OperatorHandle",
    "NormEstimateEntry",
    "NormEstimate",
    "ScanSample",
    "ScanResult",
    "measure_operator",
    "matrix_operator",
    "estimate_norm_pq",
    "bound_11",
    "refine_and_classify",
    "classify_slope",
    "scan_typeset",
    "dilation_slope",
    "predicted_dilation_slope",
    "adjoint_defect",
    "BOUNDED_SLOPE",
    "UNBOUNDED_SLOPE",
    "SCAN_CSV_COLUMNS",
]

log = logging.getLogger(__name__)

BOUNDED_SLOPE = 0.1
UNBOUNDED_SLOPE = 0.4

SCAN_CSV_COLUMNS = ["inv_p", "inv_q", "h", "estimate", "iterations", "slope", "classification", "theory_member"]


@dataclass(frozen=True)
class OperatorHandle:
    forward: Callable[[np.ndarray], np.ndarray]
    adjoint: Callable[[np.ndarray], np.ndarray]
    shape: tuple[int, ...]
    cell_volume: float = 1.0
    descriptor: str = "operator"

    def scaled(self, c: float) -> "OperatorHandle":
        return OperatorHandle(lambda f: c * self.forward(f), lambda g: c * self.adjoint(g),
                              self.shape, self.cell_volume, f"{c}*{self.descriptor}")


def measure_operator(m: DiscreteMeasure, grid: GridSpec) -> OperatorHandle:
    """T f = f * m on ``grid``; the adjoint convolves with the reflected measure."""
    r = reflect_measure(m)
    return OperatorHandle(
        forward=lambda f: convolve_values(f, grid, m),
        adjoint=lambda g: convolve_values(g, grid, r),
        shape=grid.shape,
        cell_volume=grid.cell_volume,
        descriptor=m.description,
    )


def matrix_operator(M: np.ndarray, cell_volume: float = 1.0) -> OperatorHandle:
    """Dense matrix acting on flat vectors, adjoint taken for the weighted pairing."""
    M = np.asarray(M, dtype=float)
    return OperatorHandle(lambda f: M @ f, lambda g: M.T @ g, (M.shape[1],), cell_volume, "matrix")


def adjoint_defect(T: OperatorHandle, f: np.ndarray, g: np.ndarray) -> float:
    """|<Tf, g> - <f, T*g>| / (||f||_2 ||g||_2) for the cell-weighted pairing."""
    lhs = np.sum(T.forward(f) * g) * T.cell_volume
    rhs = np.sum(f * T.adjoint(g)) * T.cell_volume
    scale = np.sqrt(np.sum(f * f) * np.sum(g * g)) * T.cell_volume
    return float(abs(lhs - rhs) / scale)


def _norm(v: np.ndarray, r: float, vol: float) -> float:
    a = np.abs(v)
    top = a.max(initial=0.0)
    if top == 0:
        return 0.0
    return float(top * (np.sum((a / top) ** r) * vol) ** (1.0 / r))


def _duality(v: np.ndarray, r: float) -> np.ndarray:
    # rescaled before powering; the result is only used up to normalization
    top = np.abs(v).max(initial=0.0)
    if top == 0:
        return v
    u = v / top
    return np.sign(u) * np.abs(u) ** (r - 1.0)


@dataclass
class NormEstimateEntry:
    h: float
    norm: float
    iterations: int
    converged: bool
    maximizer: np.ndarray | None = field(default=None, repr=False)


def _seed(kind: str, shape, rng: np.random.Generator) -> np.ndarray:
    if kind == "nonnegative":
        return rng.random(shape)
    if kind == "signed":
        return rng.standard_normal(shape)
    # spike at a random node of the central half of the box
    f = np.zeros(shape)
    f[tuple(rng.integers(s // 4, s - s // 4) for s in shape)] = 1.0
    return f


SEED_KINDS = ("spike", "nonnegative", "signed")


def estimate_norm_pq(T: OperatorHandle, p: float, q: float, seeds: int = 3, max_iter: int = 100,
                     tol: float = 1e-6, rng: np.random.Generator | int | None = 0,
                     h: float = float("nan")) -> NormEstimateEntry:
    """Best ratio ||Tf||_q / ||f||_p found by the nonlinear power method.

    Seeds cycle through a point mass, a random nonnegative field and a
    random signed field.  ``converged`` reports whether the best seed's ratio
    settled to relative change ``tol`` within ``max_iter`` steps.
    """
    if not (1 < p < np.inf and 1 < q < np.inf):
        raise ValueError("p and q must lie strictly between 1 and infinity; use bound_11 at the endpoints")
    if seeds < 1:
        raise ValueError("need at least one seed")
    rng = np.random.default_rng(rng)
    vol = T.cell_volume
    pdual = p / (p - 1.0)
    best = NormEstimateEntry(h, -1.0, 0, False)
    for i in range(seeds):
        f = _seed(SEED_KINDS[i % len(SEED_KINDS)], T.shape, rng)
        f = f / _norm(f, p, vol)
        ratio, top, top_f, converged, it = -1.0, -1.0, f, False, 0
        for it in range(1, max_iter + 1):
            g = T.forward(f)
            new = _norm(g, q, vol)
            if new > top:
                top, top_f = new, f
            if new == 0:
                break
            if abs(new - ratio) <= tol * new:
                converged = True
                break
            ratio = new
            v = T.adjoint(_duality(g, q))
            nv = _norm(v, pdual, vol)
            if nv == 0:
                break
            f = _duality(v, pdual)
            f = f / _norm(f, p, vol)
        if top > best.norm:
            best = NormEstimateEntry(h, top, it, converged, top_f)
    return best


def bound_11(m: DiscreteMeasure) -> float:
    """Total mass: an exact upper bound for the L^1 -> L^1 (and L^p -> L^p) norm."""
    return m.total_mass


@dataclass
class NormEstimate:
    p: float
    q: float
    per_resolution: list[NormEstimateEntry]
    growth_slope: float
    classification: str


def classify_slope(slope: float) -> str:
    if slope <= BOUNDED_SLOPE:
        return "bounded"
    if slope >= UNBOUNDED_SLOPE:
        return "unbounded"
    return "inconclusive"


def refine_and_classify(build: Callable[[GridSpec], OperatorHandle], grids: Sequence[GridSpec],
                        p: float, q: float, seeds: int = 3, max_iter: int = 60, tol: float = 1e-4,
                        rng: int = 0) -> NormEstimate:
    """Fit d log ||T_h|| / d log(1/h) across successively halved grids and classify.

    Unconverged estimates at any resolution make the verdict inconclusive.
    """
    if len(grids) < 3:
        raise ValueError("need at least three resolutions")
    for a, b in zip(grids, grids[1:]):
        if not np.isclose(a.hx, 2 * b.hx):
            raise ValueError("each resolution must halve the grid spacing")
    entries = []
    for grid in grids:
        entries.append(estimate_norm_pq(build(grid), p, q, seeds=seeds, max_iter=max_iter,
                                        tol=tol, rng=rng, h=grid.hx))
    logh = np.log([1.0 / e.h for e in entries])
    logn = np.log([e.norm for e in entries])
    slope = float(np.polyfit(logh, logn, 1)[0])
    verdict = classify_slope(slope)
    if not all(e.converged for e in entries):
        verdict = "inconclusive"
    return NormEstimate(p, q, entries, slope, verdict)


@dataclass
class ScanSample:
    point: ExponentPoint
    estimate: NormEstimate
    theory_member: bool

    @property
    def classification(self) -> str:
        return self.estimate.classification

    @property
    def agrees(self) -> bool:
        return self.classification == ("bounded" if self.theory_member else "unbounded")


@dataclass
class ScanResult:
    region: RegionSpec
    samples: list[ScanSample]

    @property
    def agreement(self) -> int:
        return sum(s.agrees for s in self.samples)

    @property
    def agreement_rate(self) -> float:
        return self.agreement / len(self.samples) if self.samples else float("nan")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SCAN_CSV_COLUMNS)
        for s in self.samples:
            for e in s.estimate.per_resolution:
                w.writerow([str(s.point.inv_p), str(s.point.inv_q), repr(e.h), repr(e.norm), e.iterations,
                            repr(s.estimate.growth_slope), s.classification, int(s.theory_member)])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "n": self.region.n,
            "gamma": str(self.region.gamma),
            "samples": len(self.samples),
            "agreement": self.agreement,
            "agreement_rate": self.agreement_rate,
            "points": [
                {"inv_p": str(s.point.inv_p), "inv_q": str(s.point.inv_q), "slope": s.estimate.growth_slope,
                 "classification": s.classification, "theory_member": s.theory_member}
                for s in self.samples
            ],
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2)


def theory_member(r: RegionSpec, pt: ExponentPoint) -> bool:
    """Closed triangle for gamma = 0; interior of the trapezoid otherwise."""
    return necessary_region(r, pt) if r.gamma == 0 else open_region(r, pt)


def scan_typeset(r: RegionSpec, points: Sequence[ExponentPoint], build: Callable[[GridSpec], OperatorHandle],
                 grids: Sequence[GridSpec], seeds: int = 3, max_iter: int = 60, tol: float = 1e-4,
                 rng: int = 0) -> ScanResult:
    samples = []
    for pt in points:
        if not (0 < pt.inv_p < 1 and 0 < pt.inv_q < 1):
            raise ValueError(f"scan points must lie strictly inside the unit square, got {pt}")
        x, y = pt.as_floats()
        est = refine_and_classify(build, grids, 1.0 / x, 1.0 / y, seeds=seeds, max_iter=max_iter,
                                  tol=tol, rng=rng)
        member = theory_member(r, pt)
        log.info("(%s, %s): slope %.3f -> %s (theory: %s)", pt.inv_p, pt.inv_q, est.growth_slope,
                 est.classification, member)
        samples.append(ScanSample(pt, est, member))
    return ScanResult(r, samples)


def predicted_dilation_slope(n: int, p: float, q: float) -> float:
    """Exponent of delta in ||T_delta|| / ||T||: (2n+2)/p - (2n+2)/q - 2n."""
    return (2 * n + 2) / p - (2 * n + 2) / q - 2 * n


def dilation_slope(m_of: Callable[[GridSpec, float], DiscreteMeasure], grid: GridSpec, p: float, q: float,
                   deltas: Sequence[float] = (1, 2, 4), seeds: int = 2, max_iter: int = 200,
                   tol: float = 1e-10, rng: int = 0) -> tuple[float, list[float]]:
    """Fitted d log ||T|| / d log(delta) over problems shrunk by each delta.

    ``m_of(g, delta)`` builds the measure on grid ``g`` truncated at radius
    ``R/delta``; each grid is ``grid`` shrunk by ``delta`` (same node count),
    which is the discrete image of the original problem under the dilation.
    """
    norms = []
    for d in deltas:
        g = grid.scaled(d)
        T = measure_operator(m_of(g, d), g)
        norms.append(estimate_norm_pq(T, p, q, seeds=seeds, max_iter=max_iter, tol=tol, rng=rng).norm)
    slope = float(np.polyfit(np.log(deltas), np.log(norms), 1)[0])
    return slope, norms


def dilation_covariance_defect(f: GridFunction, m: DiscreteMeasure, delta: int = 2) -> float:
    """Relative L^2 gap between (f * m)_delta and delta^{2n} (f_delta * m).

    Compared on the sub-box whose dilated image stays inside the grid.
    """
    from .convolution import convolve_measure

    grid = f.grid
    lhs = dilate_function(convolve_measure(f, m), delta).values
    rhs = delta ** (2 * grid.n) * convolve_measure(dilate_function(f, delta), m).values
    xs, ts = grid.spatial_axis, grid.t_axis
    inside_x = np.abs(delta * xs) <= grid.spatial_halfwidth - grid.hx
    inside_t = np.abs(delta**2 * ts) <= grid.t_halfwidth - grid.ht
    sel = np.ix_(*([inside_x] * grid.dim + [inside_t]))
    diff = np.linalg.norm((lhs - rhs)[sel])
    return float(diff / np.linalg.norm(rhs[sel]))
