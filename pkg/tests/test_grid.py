import numpy as np
import pytest

from heisenlab.grid import GridFunction, GridSpec, SliceFunction


def test_node_layout_contains_origin():
    g = GridSpec(1, 2.0, 16, 3.0, 12)
    assert g.hx == 0.25 and g.ht == 0.5
    assert g.spatial_axis[8] == 0.0 and g.t_axis[6] == 0.0
    assert g.shape == (16, 16, 12)
    assert g.cell_volume == pytest.approx(0.25**2 * 0.5)


@pytest.mark.parametrize("kw", [dict(spatial_points=7), dict(spatial_points=6), dict(t_points=9),
                                dict(spatial_halfwidth=0.0), dict(n=0)])
def test_invalid_grids_rejected(kw):
    base = dict(n=1, spatial_halfwidth=2.0, spatial_points=16, t_halfwidth=2.0, t_points=16)
    with pytest.raises(ValueError):
        GridSpec(**{**base, **kw})


def test_refined_halves_spacing_and_scaled_shrinks_box():
    g = GridSpec(2, 2.0, 8, 4.0, 16)
    r = g.refined()
    assert r.hx == g.hx / 2 and r.ht == g.ht / 2
    s = g.scaled(2)
    assert s.spatial_halfwidth == 1.0 and s.t_halfwidth == 1.0 and s.spatial_points == 8
    assert GridSpec.from_dict(g.to_dict()) == g


def test_spatial_nodes_order_matches_mesh():
    g = GridSpec(1, 1.0, 8, 1.0, 8)
    nodes = g.spatial_nodes()
    mesh = g.spatial_mesh()
    assert np.array_equal(nodes[:, 0], mesh[0].ravel()) and np.array_equal(nodes[:, 1], mesh[1].ravel())


def test_interpolation_exact_at_nodes_and_zero_outside():
    g = GridSpec(1, 2.0, 8, 2.0, 8)
    f = GridFunction.from_callable(g, lambda a, b, t: 1 + a - 2 * b + 3 * t)
    pts = np.array([[g.spatial_axis[2], g.spatial_axis[5], g.t_axis[3]], [0.1, -0.3, 0.7]])
    assert np.allclose(f(pts), 1 + pts[:, 0] - 2 * pts[:, 1] + 3 * pts[:, 2])
    assert f([[5.0, 0.0, 0.0]])[0] == 0.0
    s = SliceFunction.from_callable(g, lambda a, b: a * b)
    assert s([[0.25, 0.5]])[0] == pytest.approx(0.125)


def test_values_shape_and_finiteness_checked():
    g = GridSpec(1, 2.0, 8, 2.0, 8)
    with pytest.raises(ValueError):
        GridFunction(g, np.zeros((8, 8)))
    with pytest.raises(ValueError):
        SliceFunction(g, np.full((8, 8), np.nan))


@pytest.mark.parametrize("precision,tol", [("double", 0.0), ("single", 1e-6)])
def test_binary_round_trip(tmp_path, precision, tol):
    g = GridSpec(1, 2.0, 8, 2.0, 8)
    rng = np.random.default_rng(0)
    f = GridFunction(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
    f.save(tmp_path / "f", precision)
    assert (tmp_path / "f.bin").stat().st_size == f.values.size * (16 if precision == "double" else 8)
    back = GridFunction.load(tmp_path / "f")
    assert back.grid == g
    assert np.allclose(back.values, f.values, rtol=tol, atol=tol)
