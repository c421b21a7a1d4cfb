import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anglediv import Surface, make_surface
from anglediv.errors import DegenerateMetric, OutOfDomain
from anglediv.gallery import GALLERY, sphere, saddle, torus
from anglediv.surface import PointKind

from oracles import SAMPLE_BOXES, curvature_oracle


def _points(surface_id, n, seed):
    rng = np.random.default_rng(seed)
    (u0, u1), (v0, v1) = SAMPLE_BOXES[surface_id]
    return np.column_stack([rng.uniform(u0, u1, n), rng.uniform(v0, v1, n)])


@pytest.mark.parametrize("surface_id", list(GALLERY))
def test_curvature_matches_symbolic(surface_id):
    surface = make_surface(surface_id)
    curv, gamma = curvature_oracle(surface_id)
    for u, v in _points(surface_id, 20, 0):
        K, H, kb, ks = curv(u, v)
        c = surface.curvature(u, v)
        assert c.K == pytest.approx(K, abs=1e-10)
        assert c.H == pytest.approx(H, abs=1e-10)
        assert sorted([c.k1, c.k2]) == pytest.approx(sorted([kb, ks]), abs=1e-9)
        assert np.allclose(surface.christoffel(u, v).as_array().ravel(),
                           _reorder(gamma(u, v)), atol=1e-10)


def _reorder(g):
    # oracle order (u_uu, u_uv, u_vv, v_uu, v_uv, v_vv) -> [i][j][k]
    return np.array([[[g[0], g[1]], [g[1], g[2]]], [[g[3], g[4]], [g[4], g[5]]]]).ravel()


@pytest.mark.parametrize("surface_id", list(GALLERY))
def test_finite_difference_mode(surface_id):
    analytic = make_surface(surface_id)
    fd = analytic.finite_difference()
    assert fd.derivative_mode == "finite-difference"
    for u, v in _points(surface_id, 10, 1):
        a, b = analytic.curvature(u, v), fd.curvature(u, v)
        assert b.K == pytest.approx(a.K, abs=1e-6)
        assert sorted([b.k1, b.k2]) == pytest.approx(sorted([a.k1, a.k2]), abs=1e-6)


def test_sphere_values():
    c = sphere(2.0).curvature(1.0, 0.3)
    assert c.K == pytest.approx(0.25, abs=1e-14)
    assert abs(c.k1) == pytest.approx(0.5, abs=1e-14)
    assert abs(c.k2) == pytest.approx(0.5, abs=1e-14)


def test_saddle_origin():
    c = saddle().curvature(0.0, 0.0)
    assert c.K == -4.0
    assert sorted([c.k1, c.k2]) == [-2.0, 2.0]
    assert c.H == 0.0


def test_torus_sign_regions():
    t = torus()
    assert t.curvature(0.0, 0.0).K == pytest.approx(1 / 3, abs=1e-14)
    assert t.curvature(math.pi, 0.0).K == pytest.approx(-1.0, abs=1e-14)
    assert t.classify_by_curvature(0.0, 1.0) is PointKind.ELLIPTIC
    assert t.classify_by_curvature(math.pi, 1.0) is PointKind.HYPERBOLIC
    assert t.classify_by_curvature(math.pi / 2, 1.0) is PointKind.PARABOLIC


def test_fundamental_forms_plane():
    ff = make_surface("plane").fundamental_forms(0.3, -0.2)
    assert (ff.E, ff.F, ff.G, ff.L, ff.M, ff.N) == (1.0, 0.0, 1.0, 0.0, 0.0, 0.0)


def test_out_of_domain():
    with pytest.raises(OutOfDomain):
        sphere().curvature(0.0, 0.0)


def test_degenerate_metric():
    cone_tip = Surface(((-1.0, 1.0), (-1.0, 1.0)), chart=lambda u, v: (u * v, u * v, u))
    with pytest.raises(DegenerateMetric):
        cone_tip.fundamental_forms(0.0, 0.0)


def test_surface_from_chart_only():
    s = Surface(((0.1, 3.0), (-3.0, 3.0)),
                chart=lambda u, v: (math.sin(u) * math.cos(v), math.sin(u) * math.sin(v), math.cos(u)))
    assert s.curvature(1.2, 0.4).K == pytest.approx(1.0, abs=1e-6)


def test_vectorized_area_element():
    s = torus()
    u = np.array([0.0, 1.0, math.pi])
    K, dA = s.gauss_and_area_element(u, np.zeros(3))
    assert np.allclose(K, np.cos(u) / (2 + np.cos(u)))
    assert np.allclose(dA, 2 + np.cos(u))


@settings(max_examples=50, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_swap_keeps_gauss_flips_mean(u, v):
    s = saddle()
    a, b = s.curvature(u, v), s.swapped().curvature(v, u)
    assert b.K == pytest.approx(a.K, abs=1e-12)
    assert b.H == pytest.approx(-a.H, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.3, 2.8), st.floats(-3.0, 3.0))
def test_principal_product_and_sum(u, v):
    c = make_surface("ellipsoid").curvature(u, v)
    assert c.k1 * c.k2 == pytest.approx(c.K, rel=1e-12, abs=1e-14)
    assert 0.5 * (c.k1 + c.k2) == pytest.approx(c.H, rel=1e-12, abs=1e-14)
