import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anglediv.errors import ChartBoundaryExceeded, InvalidParameter, ZeroVector
from anglediv.gallery import cylinder, make_surface, plane, saddle, sphere, torus
from anglediv.geodesic import (TangentVector, angle_between, connect, exp_map, integrate, metric_norm,
                               rotate_tangent, signed_angle)

from oracles import great_circle_distance, great_circle_point

HALF_PI = math.pi / 2


def test_plane_straight_line():
    path = integrate(plane(), (0.0, 0.0), (1.0, 0.0), 2.0, 0.1)
    assert path.end == pytest.approx((2.0, 0.0), abs=1e-14)
    assert path.total_length == 2.0


def test_sphere_equator_quarter():
    path = integrate(sphere(), (HALF_PI, 0.0), (0.0, 1.0), HALF_PI, 1e-3)
    assert path.end == pytest.approx((HALF_PI, HALF_PI), abs=1e-12)


def test_cylinder_helix():
    path = integrate(cylinder(), (0.0, 0.0), (1.0, 1.0), math.sqrt(2) * math.pi, 1e-3)
    assert path.end == pytest.approx((math.pi, math.pi), abs=1e-12)


def test_sphere_great_circle_oracle():
    p, w = (1.1, 0.3), (0.4, 0.9)
    path = integrate(sphere(), p, w, 1.0, 1e-3)
    assert path.end == pytest.approx(great_circle_point(p, w, 1.0), abs=1e-11)


def test_path_invariants():
    s = torus()
    path = integrate(s, (0.3, 0.2), (0.5, 1.0), 2.0, 1e-3)
    assert np.all(np.diff(path.states[:, 0]) > 0)
    assert path.states[0, 0] == 0.0
    assert path.speed_deviation() <= 1e-8


def test_ambient_acceleration_is_normal():
    s = torus()
    path = integrate(s, (0.3, 0.2), (0.5, 1.0), 1.0, 1e-3)
    h = 1e-3
    for t in (0.2, 0.5, 0.8):
        x = [s.evaluate(*path.point_at(t + d)) for d in (-h, 0.0, h)]
        acc = (x[0] - 2 * x[1] + x[2]) / h ** 2
        jet = s.jet(*path.point_at(t))
        n = np.cross(jet[1], jet[2])
        n /= np.linalg.norm(n)
        tangential = acc - (acc @ n) * n
        assert np.linalg.norm(tangential) <= 1e-6


def test_chart_boundary():
    with pytest.raises(ChartBoundaryExceeded):
        integrate(saddle(), (0.0, 0.0), (1.0, 0.0), 5.0, 1e-2)
    path = integrate(saddle(), (0.0, 0.0), (1.0, 0.0), 5.0, 1e-2, stop_at_boundary=True)
    assert path.total_length < 5.0
    assert saddle().contains(*path.end)


def test_invalid_length():
    with pytest.raises(InvalidParameter):
        integrate(plane(), (0.0, 0.0), (1.0, 0.0), 0.0)


def test_state_at_matches_integration():
    s = sphere()
    path = integrate(s, (1.0, 0.0), (0.3, 1.0), 1.0, 1e-2)
    fresh = integrate(s, (1.0, 0.0), (0.3, 1.0), 0.4567, 1e-2)
    assert path.state_at(0.4567) == pytest.approx(fresh.states[-1, 1:], abs=1e-15)


def test_reversed_and_subpath():
    path = integrate(torus(), (0.3, 0.2), (0.5, 1.0), 1.0, 1e-2)
    rev = path.reversed()
    assert rev.start == path.end and rev.end == path.start
    sub = path.subpath(0.25, 0.75)
    assert sub.total_length == pytest.approx(0.5, abs=1e-15)
    assert sub.start == pytest.approx(path.point_at(0.25), abs=1e-15)
    assert sub.end == pytest.approx(path.point_at(0.75), abs=1e-15)


def test_exp_map_examples():
    assert exp_map(torus(), (0.2, 0.1), (0.0, 0.0)) == (0.2, 0.1)
    assert exp_map(plane(), (1.0, 1.0), (2.0, -1.0)) == pytest.approx((3.0, 0.0), abs=1e-12)
    assert exp_map(sphere(), (HALF_PI, 0.0), (-math.pi / 4, 0.0)) == pytest.approx((math.pi / 4, 0.0), abs=1e-12)


def test_angle_examples():
    w = (0.3, 0.7)
    assert angle_between(torus(), (0.1, 0.1), w, w) == 0.0
    assert angle_between(plane(), (0.0, 0.0), (1.0, 0.0), (0.0, 1.0)) == HALF_PI
    assert angle_between(sphere(), (math.pi / 4, 0.0), (1.0, 0.0), (0.0, 1.0)) == pytest.approx(HALF_PI, abs=1e-15)
    with pytest.raises(ZeroVector):
        angle_between(plane(), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0))


def test_rotate_examples():
    w = TangentVector((0.0, 0.0), (1.0, 0.0))
    assert rotate_tangent(plane(), (0.0, 0.0), w, 0.0).components == (1.0, 0.0)
    assert rotate_tangent(plane(), (0.0, 0.0), w, HALF_PI).components == pytest.approx((0.0, 1.0), abs=1e-16)
    assert rotate_tangent(plane(), (0.0, 0.0), w, HALF_PI, -1).components == pytest.approx((0.0, -1.0), abs=1e-16)


SURFACES = ["sphere", "torus", "saddle", "ellipsoid", "monkey-saddle"]
angles = st.floats(-3.0, 3.0)
comps = st.floats(-2.0, 2.0).filter(lambda x: abs(x) > 1e-3)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SURFACES), comps, comps, angles)
def test_rotation_properties(surface_id, a, b, theta):
    s = make_surface(surface_id)
    at = (1.0, 0.4)
    w = (a, b)
    r = rotate_tangent(s, at, w, theta)
    assert metric_norm(s, at, r) == pytest.approx(metric_norm(s, at, w), rel=1e-12)
    assert angle_between(s, at, w, r) == pytest.approx(abs(theta), abs=1e-10)
    back = rotate_tangent(s, at, r, -theta)
    assert back.components == pytest.approx(w, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SURFACES), comps, comps, comps, comps, st.floats(0.1, 10.0))
def test_angle_symmetric_and_scale_invariant(surface_id, a, b, c, d, k):
    s = make_surface(surface_id)
    at = (1.0, 0.4)
    x = angle_between(s, at, (a, b), (c, d))
    assert angle_between(s, at, (c, d), (a, b)) == pytest.approx(x, abs=1e-15)
    assert angle_between(s, at, (k * a, k * b), (c, d)) == pytest.approx(x, abs=1e-12)
    # antiparallel pairs sit on the +-pi branch cut, so compare modulo 2 pi
    total = signed_angle(s, at, (c, d), (a, b)) + signed_angle(s, at, (a, b), (c, d))
    assert math.remainder(total, 2 * math.pi) == pytest.approx(0.0, abs=1e-15)


def test_connect_plane():
    seg = connect(plane(), (0.0, 0.0), (3.0, 4.0), 1e-2)
    assert seg.length == pytest.approx(5.0, abs=1e-10)


def test_connect_sphere_equator():
    seg = connect(sphere(), (HALF_PI, 0.0), (HALF_PI, HALF_PI), 1e-3)
    assert seg.length == pytest.approx(HALF_PI, abs=1e-10)


def test_connect_cylinder_helix():
    seg = connect(cylinder(), (0.0, 0.0), (math.pi, math.pi), 1e-3)
    assert seg.length == pytest.approx(math.sqrt(2) * math.pi, abs=1e-10)


def test_connect_round_trip():
    s = sphere()
    P, Q = (1.0, -0.2), (1.3, 0.25)
    seg = connect(s, P, Q, 1e-3)
    assert seg.length == pytest.approx(great_circle_distance(P, Q), abs=1e-10)
    again = integrate(s, P, seg.path.start_tangent(), seg.length, 1e-3)
    assert math.dist(again.end, Q) <= 1e-9
    assert math.dist(seg.path.end, Q) <= 1e-10


def test_connect_same_point():
    with pytest.raises(InvalidParameter):
        connect(plane(), (1.0, 1.0), (1.0, 1.0))


def test_rk4_fourth_order():
    p, w, L = (1.1, 0.3), (0.4, 0.9), 1.0
    exact = np.array(great_circle_point(p, w, L))
    errs = [np.linalg.norm(np.array(integrate(sphere(), p, w, L, h).end) - exact) for h in (0.1, 0.05, 0.025, 0.0125)]
    ratios = [errs[i] / errs[i + 1] for i in range(3)]
    assert all(r >= 12 for r in ratios), ratios
