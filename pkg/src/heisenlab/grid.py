"""Regular box grids on H^n and functions sampled on them.

Nodes along each spatial axis are ``-L + i*h`` for ``i = 0..N-1`` with
``h = 2L/N``, so the origin is node ``N/2`` and differences of nodes are
again nodes.  The central axis is laid out the same way.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

__all__ = ["GridSpec", "GridFunction", "SliceFunction"]


@dataclass(frozen=True)
class GridSpec:
    n: int
    spatial_halfwidth: float
    spatial_points: int
    t_halfwidth: float
    t_points: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        for name in ("spatial_points", "t_points"):
            v = getattr(self, name)
            if int(v) != v or v < 8 or v % 2:
                raise ValueError(f"{name} must be an even integer >= 8, got {v!r}")
        if not (self.spatial_halfwidth > 0 and self.t_halfwidth > 0):
            raise ValueError("half-widths must be positive")

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def hx(self) -> float:
        return 2.0 * self.spatial_halfwidth / self.spatial_points

    @property
    def ht(self) -> float:
        return 2.0 * self.t_halfwidth / self.t_points

    @property
    def spatial_axis(self) -> np.ndarray:
        return -self.spatial_halfwidth + self.hx * np.arange(self.spatial_points)

    @property
    def t_axis(self) -> np.ndarray:
        return -self.t_halfwidth + self.ht * np.arange(self.t_points)

    @property
    def spatial_shape(self) -> tuple[int, ...]:
        return (self.spatial_points,) * self.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.spatial_shape + (self.t_points,)

    @property
    def spatial_cell_volume(self) -> float:
        return self.hx**self.dim

    @property
    def cell_volume(self) -> float:
        return self.spatial_cell_volume * self.ht

    def spatial_nodes(self) -> np.ndarray:
        """All spatial nodes as an (N^{2n}, 2n) array in C order."""
        axes = [self.spatial_axis] * self.dim
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def spatial_mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*([self.spatial_axis] * self.dim), indexing="ij")

    def mesh(self) -> list[np.ndarray]:
        """Open (sparse) coordinate arrays broadcasting to ``self.shape``."""
        axes = [self.spatial_axis] * self.dim + [self.t_axis]
        return np.meshgrid(*axes, indexing="ij", sparse=True)

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.n, self.spatial_halfwidth, self.spatial_points * factor,
                        self.t_halfwidth, self.t_points * factor)

    def scaled(self, delta: float) -> "GridSpec":
        """The grid carried onto itself by the dilation by ``1/delta``."""
        return GridSpec(self.n, self.spatial_halfwidth / delta, self.spatial_points,
                        self.t_halfwidth / delta**2, self.t_points)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "spatial_halfwidth": self.spatial_halfwidth,
            "spatial_points": self.spatial_points,
            "t_halfwidth": self.t_halfwidth,
            "t_points": self.t_points,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(int(d["n"]), float(d["spatial_halfwidth"]), int(d["spatial_points"]),
                   float(d["t_halfwidth"]), int(d["t_points"]))


def _check_values(values: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    values = np.asarray(values)
    if values.shape != shape:
        raise ValueError(f"values have shape {values.shape}, grid expects {shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("values must be finite")
    return values


def _interpolate(axes, values, points):
    """Multilinear interpolation with zero extension outside the box."""
    interp = RegularGridInterpolator(axes, values, method="linear", bounds_error=False, fill_value=0.0)
    return interp(points)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A function on H^n sampled at the nodes of a :class:`GridSpec`."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.values, self.grid.shape))

    @classmethod
    def from_callable(cls, grid: GridSpec, func) -> "GridFunction":
        """Sample ``func(x_1, ..., x_2n, t)`` on broadcasting coordinate arrays."""
        vals = np.broadcast_to(func(*grid.mesh()), grid.shape)
        return cls(grid, np.array(vals))

    @property
    def cell_volume(self) -> float:
        return self.grid.cell_volume

    def __call__(self, points) -> np.ndarray:
        """Evaluate at (m, 2n+1) points by multilinear interpolation."""
        axes = [self.grid.spatial_axis] * self.grid.dim + [self.grid.t_axis]
        return _interpolate(axes, self.values, np.asarray(points, dtype=float))

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values)

    def save(self, path, precision: str = "double") -> None:
        """Write raw little-endian complex samples plus a JSON sidecar.

        ``path`` gets a ``.bin`` payload and a ``.json`` sidecar holding the
        shape, dtype and grid extents.
        """
        dtype = {"double": "<c16", "single": "<c8"}[precision]
        path = Path(path)
        data = np.ascontiguousarray(self.values, dtype=dtype)
        path.with_suffix(".bin").write_bytes(data.tobytes(order="C"))
        meta = {"shape": list(data.shape), "dtype": dtype, "grid": self.grid.to_dict()}
        path.with_suffix(".json").write_text(json.dumps(meta, indent=2))

    @classmethod
    def load(cls, path) -> "GridFunction":
        path = Path(path)
        meta = json.loads(path.with_suffix(".json").read_text())
        raw = np.frombuffer(path.with_suffix(".bin").read_bytes(), dtype=meta["dtype"])
        values = raw.reshape(meta["shape"]).astype(np.complex128)
        return cls(GridSpec.from_dict(meta["grid"]), values)


@dataclass(frozen=True, eq=False)
class SliceFunction:
    """A function on R^{2n} sampled on the spatial nodes of a grid."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.values, self.grid.spatial_shape))

    @classmethod
    def from_callable(cls, grid: GridSpec, func) -> "SliceFunction":
        mesh = np.meshgrid(*([grid.spatial_axis] * grid.dim), indexing="ij", sparse=True)
        vals = np.broadcast_to(func(*mesh), grid.spatial_shape)
        return cls(grid, np.array(vals))

    @property
    def cell_volume(self) -> float:
        return self.grid.spatial_cell_volume

    def __call__(self, points) -> np.ndarray:
        axes = [self.grid.spatial_axis] * self.grid.dim
        return _interpolate(axes, self.values, np.asarray(points, dtype=float))

    def with_values(self, values) -> "SliceFunction":
        return SliceFunction(self.grid, values)
