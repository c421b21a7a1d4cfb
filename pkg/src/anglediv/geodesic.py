"""Geodesic integration, exponential map, tangent-plane angles and shooting.

Geodesics are integrated as the first-order system
``(u, v, u', v')' = (u', v', a_u, a_v)`` with ``a`` from the Christoffel
symbols, using classical RK4 at a fixed arc-length step.  Every step is kept
so that intersection search and triangle boundaries never re-integrate.

Between two stored states a path is *defined* by one RK4 step of the
appropriate partial length from the earlier state.  That makes
:meth:`GeodesicPath.state_at` reproduce the stored nodes exactly and agree
bit-for-bit with a fresh :func:`integrate` call of the same length.
"""

from __future__ import annotations

import bisect
import functools
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ChartBoundaryExceeded, InvalidParameter, NoConvergence, ZeroVector
from .surface import Surface

ZERO_NORM = 1e-14
SPEED_TOL = 1e-8
CONNECT_TOL = 1e-10
CONNECT_MAX_ITER = 100


@dataclass(frozen=True)
class TangentVector:
    base: tuple
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "base", (float(self.base[0]), float(self.base[1])))
        object.__setattr__(self, "components", (float(self.components[0]), float(self.components[1])))

    def __neg__(self):
        return TangentVector(self.base, (-self.components[0], -self.components[1]))

    def scaled(self, factor: float) -> "TangentVector":
        return TangentVector(self.base, (factor * self.components[0], factor * self.components[1]))


VectorLike = Union[TangentVector, Sequence[float]]


def _comps(w: VectorLike):
    if isinstance(w, TangentVector):
        return w.components
    return float(w[0]), float(w[1])


def _inner(E, F, G, a, b):
    return E * a[0] * b[0] + F * (a[0] * b[1] + a[1] * b[0]) + G * a[1] * b[1]


def metric_norm(surface: Surface, at, w: VectorLike) -> float:
    E, F, G = surface.metric(*at)
    a = _comps(w)
    return math.sqrt(max(_inner(E, F, G, a, a), 0.0))


def _normalized(surface, at, w):
    n = metric_norm(surface, at, w)
    if n < ZERO_NORM:
        raise ZeroVector(f"zero tangent vector at {at}")
    a = _comps(w)
    return a[0] / n, a[1] / n


def angle_between(surface: Surface, at, w1: VectorLike, w2: VectorLike) -> float:
    """Unsigned angle in [0, pi] between two tangent vectors at ``at``.

    Evaluated as ``atan2(|g-cross|, g-dot)``, which equals the clamped arccos
    of the normalized inner product but keeps full precision near 0 and pi.
    """
    return abs(signed_angle(surface, at, w1, w2))


def signed_angle(surface: Surface, at, w1: VectorLike, w2: VectorLike) -> float:
    """Angle from ``w1`` to ``w2``, positive when the turn agrees with the chart orientation."""
    E, F, G = surface.metric(*at)
    a, b = _comps(w1), _comps(w2)
    if _inner(E, F, G, a, a) < ZERO_NORM ** 2 or _inner(E, F, G, b, b) < ZERO_NORM ** 2:
        raise ZeroVector(f"zero tangent vector at {at}")
    area = math.sqrt(E * G - F * F) * (a[0] * b[1] - a[1] * b[0])
    return math.atan2(area, _inner(E, F, G, a, b))


def rotate_tangent(surface: Surface, at, w: VectorLike, theta: float, orientation: int = 1) -> TangentVector:
    """Rotate ``w`` by ``theta`` in the tangent plane, keeping its metric norm.

    The positive side is the chart orientation; ``orientation=-1`` turns the
    other way.
    """
    E, F, G = surface.metric(*at)
    a = _comps(w)
    n = math.sqrt(max(_inner(E, F, G, a, a), 0.0))
    if n < ZERO_NORM:
        raise ZeroVector(f"zero tangent vector at {at}")
    e1 = (a[0] / n, a[1] / n)
    rd = math.sqrt(E * G - F * F)
    e2 = (-(F * e1[0] + G * e1[1]) / rd, (E * e1[0] + F * e1[1]) / rd)
    c, s = math.cos(theta), orientation * math.sin(theta)
    return TangentVector(at, (n * (c * e1[0] + s * e2[0]), n * (c * e1[1] + s * e2[1])))


def unit_direction(surface: Surface, at, theta: float) -> TangentVector:
    """Unit vector at ``at`` making angle ``theta`` with the u-coordinate line."""
    E = surface.metric(*at)[0]
    return rotate_tangent(surface, at, (1.0 / math.sqrt(E), 0.0), theta)


def _rk4_step(surface, u, v, du, dv, h, check):
    acc = surface.geodesic_acceleration
    a1u, a1v = acc(u, v, du, dv)
    hh = 0.5 * h
    u2, v2, du2, dv2 = u + hh * du, v + hh * dv, du + hh * a1u, dv + hh * a1v
    check(u2, v2)
    a2u, a2v = acc(u2, v2, du2, dv2)
    u3, v3, du3, dv3 = u + hh * du2, v + hh * dv2, du + hh * a2u, dv + hh * a2v
    check(u3, v3)
    a3u, a3v = acc(u3, v3, du3, dv3)
    u4, v4, du4, dv4 = u + h * du3, v + h * dv3, du + h * a3u, dv + h * a3v
    check(u4, v4)
    a4u, a4v = acc(u4, v4, du4, dv4)
    h6 = h / 6.0
    un = u + h6 * (du + 2.0 * du2 + 2.0 * du3 + du4)
    vn = v + h6 * (dv + 2.0 * dv2 + 2.0 * dv3 + dv4)
    check(un, vn)
    return (
        un,
        vn,
        du + h6 * (a1u + 2.0 * a2u + 2.0 * a3u + a4u),
        dv + h6 * (a1v + 2.0 * a2v + 2.0 * a3v + a4v),
    )


def _boundary_checker(surface):
    (u0, u1), (v0, v1) = surface.domain

    def check(u, v):
        if not (u0 < u < u1 and v0 < v < v1):
            raise ChartBoundaryExceeded(f"geodesic left the {surface.name} chart at ({u:.6g}, {v:.6g})")

    return check


def _no_check(u, v):
    pass


def integrate_states(surface, state, s0, length, step_h, stop_at_boundary=False):
    """RK4 states ``(s, u, v, du, dv)`` following ``state`` for ``length``.

    The returned list excludes the initial state.  With ``stop_at_boundary``
    the integration ends quietly before the first step that would leave the
    chart.
    """
    check = _boundary_checker(surface)
    u, v, du, dv = state
    out = []
    nfull = int(length / step_h)
    if (nfull + 1) * step_h <= length:
        nfull += 1
    for i in range(1, nfull + 1):
        try:
            u, v, du, dv = _rk4_step(surface, u, v, du, dv, step_h, check)
        except ChartBoundaryExceeded:
            if stop_at_boundary:
                return out
            raise
        out.append((s0 + i * step_h, u, v, du, dv))
    rest = length - nfull * step_h
    if rest > 1e-12 * step_h:
        try:
            u, v, du, dv = _rk4_step(surface, u, v, du, dv, rest, check)
        except ChartBoundaryExceeded:
            if stop_at_boundary:
                return out
            raise
        out.append((s0 + length, u, v, du, dv))
    return out


class GeodesicPath:
    """Arc-length sampled geodesic: ``states`` rows are ``(s, u, v, du, dv)``."""

    def __init__(self, surface: Surface, states, step_h: float):
        self.surface = surface
        self.states = np.asarray(states, dtype=float)
        self.step_h = float(step_h)
        if self.states.ndim != 2 or self.states.shape[1] != 5 or len(self.states) < 1:
            raise ValueError("states must be an (n, 5) array")

    def __len__(self):
        return len(self.states)

    def __repr__(self):
        return (f"GeodesicPath({self.surface.name}, {len(self)} states, "
                f"length={self.total_length:.6g}, start={self.start}, end={self.end})")

    @property
    def total_length(self) -> float:
        return float(self.states[-1, 0])

    @property
    def positions(self) -> np.ndarray:
        return self.states[:, 1:3]

    @property
    def start(self):
        return float(self.states[0, 1]), float(self.states[0, 2])

    @property
    def end(self):
        return float(self.states[-1, 1]), float(self.states[-1, 2])

    @functools.cached_property
    def _rows(self):
        return self.states.tolist()

    @functools.cached_property
    def _nodes(self):
        return [row[0] for row in self._rows]

    def state_at(self, s: float):
        """``(u, v, du, dv)`` at arc length ``s`` (small extrapolation allowed)."""
        s = float(s)
        nodes = self._nodes
        i = min(max(bisect.bisect_right(nodes, s) - 1, 0), len(nodes) - 1)
        _, u, v, du, dv = self._rows[i]
        sigma = s - nodes[i]
        if sigma == 0.0:
            return u, v, du, dv
        return _rk4_step(self.surface, u, v, du, dv, sigma, _no_check)

    def point_at(self, s: float):
        return self.state_at(s)[:2]

    def tangent_at(self, s: float) -> TangentVector:
        u, v, du, dv = self.state_at(s)
        return TangentVector((u, v), (du, dv))

    def start_tangent(self) -> TangentVector:
        r = self.states[0]
        return TangentVector((r[1], r[2]), (r[3], r[4]))

    def end_tangent(self) -> TangentVector:
        r = self.states[-1]
        return TangentVector((r[1], r[2]), (r[3], r[4]))

    def reversed(self) -> "GeodesicPath":
        st = self.states[::-1].copy()
        st[:, 0] = self.total_length - st[:, 0]
        st[0, 0] = 0.0
        st[:, 3:] *= -1.0
        return GeodesicPath(self.surface, st, self.step_h)

    def subpath(self, s0: float, s1: float) -> "GeodesicPath":
        """Portion between arc lengths ``s0 < s1``, re-based to start at 0."""
        if not s1 > s0:
            raise InvalidParameter(f"empty subpath [{s0}, {s1}]")
        nodes = self.states[:, 0]
        inner = self.states[(nodes > s0) & (nodes < s1)]
        first = (s0, *self.state_at(s0))
        last = (s1, *self.state_at(s1))
        st = np.vstack([np.array([first]), inner, np.array([last])]) if len(inner) else np.array([first, last])
        st[:, 0] -= s0
        st[0, 0] = 0.0
        st[-1, 0] = s1 - s0
        return GeodesicPath(self.surface, st, self.step_h)

    def truncated(self, s: float) -> "GeodesicPath":
        return self.subpath(0.0, s)

    def speed_deviation(self) -> float:
        """Largest departure of the metric speed from 1 over the stored states."""
        u, v, du, dv = self.states[:, 1], self.states[:, 2], self.states[:, 3], self.states[:, 4]
        E, F, G = self.surface.metric(u, v)
        return float(np.max(np.abs(np.sqrt(E * du * du + 2 * F * du * dv + G * dv * dv) - 1.0)))


@dataclass(frozen=True)
class GeodesicSegment:
    path: GeodesicPath
    P: tuple
    Q: tuple
    length: float


def integrate(surface: Surface, start, direction: VectorLike, length: float, step_h: float = 1e-3,
              stop_at_boundary: bool = False) -> GeodesicPath:
    """Integrate the unit-speed geodesic from ``start`` along ``direction``.

    ``direction`` is normalized to unit metric norm before use.

    Raises:
        ChartBoundaryExceeded: an RK4 stage left the domain (unless
            ``stop_at_boundary``, which truncates the path instead).
    """
    if not length > 0 or not step_h > 0:
        raise InvalidParameter("length and step_h must be positive")
    surface.check(*start)
    du, dv = _normalized(surface, start, direction)
    u, v = float(start[0]), float(start[1])
    states = [(0.0, u, v, du, dv)]
    states.extend(integrate_states(surface, (u, v, du, dv), 0.0, length, step_h, stop_at_boundary))
    return GeodesicPath(surface, states, step_h)


def exp_map(surface: Surface, p, w: VectorLike, step_h: float = 1e-3):
    """Endpoint of the geodesic from ``p`` with initial velocity ``w``."""
    n = metric_norm(surface, p, w)
    if n < ZERO_NORM:
        surface.check(*p)
        return float(p[0]), float(p[1])
    return integrate(surface, p, w, n, step_h).end


def _closest_approach(surface, path, Q):
    """Arc length along ``path`` where the chart distance to ``Q`` is stationary."""
    d = path.positions - np.asarray(Q)
    i = int(np.argmin(np.einsum("ij,ij->i", d, d)))
    s = float(path.states[i, 0])
    for _ in range(50):
        u, v, du, dv = path.state_at(s)
        au, av = surface.geodesic_acceleration(u, v, du, dv)
        xu, xv = u - Q[0], v - Q[1]
        g = du * xu + dv * xv
        gp = du * du + dv * dv + au * xu + av * xv
        if gp <= 0.0:
            break
        step = g / gp
        s -= step
        if abs(step) <= 1e-16 * max(1.0, abs(s)):
            break
    return s


def connect(surface: Surface, P, Q, step_h: float = 1e-3, tol: float = CONNECT_TOL,
            max_iter: int = CONNECT_MAX_ITER) -> GeodesicSegment:
    """Geodesic segment from ``P`` to ``Q`` by shooting on the initial angle.

    The initial angle is measured from the u-coordinate line at ``P``; a
    secant iteration drives the signed chart-space miss at the point of
    closest approach to zero.  The first guess is the chart straight line.

    Raises:
        NoConvergence: the miss stayed above ``tol`` for ``max_iter`` steps.
    """
    P = (float(P[0]), float(P[1]))
    Q = (float(Q[0]), float(Q[1]))
    if P == Q:
        raise InvalidParameter("connect needs two distinct points")
    surface.check(*P)
    surface.check(*Q)
    chord = (Q[0] - P[0], Q[1] - P[1])
    E = surface.metric(*P)[0]
    theta0 = signed_angle(surface, P, (1.0, 0.0), chord)
    mid = (0.5 * (P[0] + Q[0]), 0.5 * (P[1] + Q[1]))
    reach = 1.5 * metric_norm(surface, mid, chord) + 10.0 * step_h

    def shoot(theta):
        nonlocal reach
        d = rotate_tangent(surface, P, (1.0 / math.sqrt(E), 0.0), theta)
        while True:
            path = integrate(surface, P, d, reach, step_h, stop_at_boundary=True)
            s = _closest_approach(surface, path, Q)
            if s < path.total_length - step_h or path.total_length < reach:
                break
            reach *= 2.0
        s = min(s, path.total_length)
        u, v, du, dv = path.state_at(s)
        miss = (du * (Q[1] - v) - dv * (Q[0] - u)) / math.hypot(du, dv)
        return miss, path, s

    t0, t1 = theta0, theta0 + 1e-3
    m0, path, s = shoot(t0)
    if abs(m0) < tol:
        return _segment(path, s, P, Q)
    m1, path, s = shoot(t1)
    for _ in range(max_iter):
        if abs(m1) < tol:
            return _segment(path, s, P, Q)
        if m1 == m0:
            break
        t0, t1, m0 = t1, t1 - m1 * (t1 - t0) / (m1 - m0), m1
        m1, path, s = shoot(t1)
    raise NoConvergence(f"connect {P} -> {Q} on {surface.name}: miss {abs(m1):.3g} after {max_iter} iterations")


def _segment(path, s, P, Q):
    seg = path.truncated(s)
    return GeodesicSegment(path=seg, P=P, Q=Q, length=float(s))
