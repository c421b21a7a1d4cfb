"""Parametric surfaces: fundamental forms, Christoffel symbols and curvature.

A :class:`Surface` wraps a chart ``r(u, v)`` on an open rectangle.  Gallery
surfaces (see :mod:`anglediv.gallery`) supply a *jet* function returning the
chart together with its first and second partial derivatives; user charts
without a jet fall back to central finite differences.

Every vector in this module is a plain 3-tuple of components so that the same
code path serves Python floats (through :mod:`math`) and numpy arrays (through
:mod:`numpy`).  The scalar path is what the geodesic integrator hammers, and it
is several times faster than calling numpy on 0-d values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DegenerateMetric, OutOfDomain

REGULARITY_FLOOR = 1e-12
METRIC_FLOOR = 1e-14
DEFAULT_ZERO_TOL = 1e-7

Vec = tuple  # (x, y, z) of floats or arrays
Jet = tuple  # (r, r_u, r_v, r_uu, r_uv, r_vv)


class PointKind(str, enum.Enum):
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"

    def __str__(self):
        return self.value


def _dot(a: Vec, b: Vec):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a: Vec, b: Vec) -> Vec:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _xp(*values):
    return np if any(isinstance(x, np.ndarray) for x in values) else math


@dataclass(frozen=True)
class FundamentalForms:
    E: float
    F: float
    G: float
    L: float
    M: float
    N: float
    at: tuple

    @property
    def det_first(self) -> float:
        return self.E * self.G - self.F * self.F


@dataclass(frozen=True)
class CurvatureData:
    K: float
    k1: float
    k2: float
    H: float


@dataclass(frozen=True)
class ChristoffelSymbols:
    """The six independent symbols; ``u_vv`` is Γ^u_{vv} and so on."""

    u_uu: float
    u_uv: float
    u_vv: float
    v_uu: float
    v_uv: float
    v_vv: float

    def as_array(self) -> np.ndarray:
        """Return Γ as a (2, 2, 2) array indexed ``[i, j, k]``, symmetric in j, k."""
        g = np.empty((2, 2, 2))
        g[0] = [[self.u_uu, self.u_uv], [self.u_uv, self.u_vv]]
        g[1] = [[self.v_uu, self.v_uv], [self.v_uv, self.v_vv]]
        return g


def _christoffel_from_jet(jet: Jet):
    _, ru, rv, ruu, ruv, rvv = jet
    E = _dot(ru, ru)
    F = _dot(ru, rv)
    G = _dot(rv, rv)
    D = E * G - F * F
    Eu = 2.0 * _dot(ruu, ru)
    Ev = 2.0 * _dot(ruv, ru)
    Fu = _dot(ruu, rv) + _dot(ru, ruv)
    Fv = _dot(ruv, rv) + _dot(ru, rvv)
    Gu = 2.0 * _dot(ruv, rv)
    Gv = 2.0 * _dot(rvv, rv)
    d2 = 2.0 * D
    return (
        (G * Eu - 2.0 * F * Fu + F * Ev) / d2,
        (G * Ev - F * Gu) / d2,
        (2.0 * G * Fv - G * Gu - F * Gv) / d2,
        (2.0 * E * Fu - E * Ev - F * Eu) / d2,
        (E * Gu - F * Ev) / d2,
        (E * Gv - 2.0 * F * Fv + F * Gu) / d2,
    ), D


def _forms_from_jet(jet: Jet, xp):
    _, ru, rv, ruu, ruv, rvv = jet
    E = _dot(ru, ru)
    F = _dot(ru, rv)
    G = _dot(rv, rv)
    nvec = _cross(ru, rv)
    nn = xp.sqrt(_dot(nvec, nvec))
    # a zero normal is reported by the caller as DegenerateMetric
    safe = np.where(nn > 0, nn, 1.0) if xp is np else (nn or 1.0)
    L = _dot(ruu, nvec) / safe
    M = _dot(ruv, nvec) / safe
    N = _dot(rvv, nvec) / safe
    return E, F, G, L, M, N, nn


def _principal(E, F, G, L, M, N):
    """Gaussian, mean and ordered principal curvatures (scalars).

    The shape operator is expressed in the orthonormal frame from the Cholesky
    factor of the metric, where it is a symmetric matrix ``[[a, b], [b, c]]``.
    Its eigenvalue gap ``sqrt(((a - c)/2)^2 + b^2)`` has no cancellation, so
    principal curvatures stay accurate at and near umbilics.
    """
    D = E * G - F * F
    K = (L * N - M * M) / D
    a = L / E
    b = (M - F * L / E) / math.sqrt(D)
    c = (E / D) * (N - 2.0 * (F / E) * M + (F / E) ** 2 * L)
    H = 0.5 * (a + c)
    root = math.hypot(0.5 * (a - c), b)
    big = H + math.copysign(root, H)
    if big == 0.0:
        return K, 0.0, 0.0, H
    small = K / big
    return K, max(big, small), min(big, small), H


class Surface:
    """A regular surface given by one chart on an open rectangle.

    Args:
        domain: ``((u_min, u_max), (v_min, v_max))``, open.
        jet: ``jet(u, v, xp) -> (r, r_u, r_v, r_uu, r_uv, r_vv)`` with ``xp``
            either :mod:`math` or :mod:`numpy`.  Selects analytic mode.
        chart: ``chart(u, v) -> (x, y, z)``.  Required when ``jet`` is absent,
            which selects finite-difference mode.
        h_fd: central-difference step for first derivatives.
        h_fd2: step of the fourth-order stencils used for second derivatives.
        name, params: gallery bookkeeping, echoed in reports.
        constant_metric: declares E, F, G constant over the chart, so every
            Christoffel symbol vanishes and geodesics are chart lines.
    """

    def __init__(
        self,
        domain,
        jet: Optional[Callable] = None,
        chart: Optional[Callable] = None,
        h_fd: float = 1e-5,
        h_fd2: float = 1e-3,
        name: str = "custom",
        params: Optional[dict] = None,
        default_point: Optional[Sequence[float]] = None,
        constant_metric: bool = False,
    ):
        if jet is None and chart is None:
            raise ValueError("either jet or chart is required")
        (u0, u1), (v0, v1) = domain
        if not (u0 < u1 and v0 < v1):
            raise ValueError(f"empty domain {domain!r}")
        self.domain = ((float(u0), float(u1)), (float(v0), float(v1)))
        self._jet_fn = jet
        self._chart_fn = chart
        self.h_fd = float(h_fd)
        self.h_fd2 = float(h_fd2)
        self.name = name
        self.params = dict(params or {})
        if default_point is None:
            default_point = (0.5 * (u0 + u1), 0.5 * (v0 + v1))
        self.default_point = (float(default_point[0]), float(default_point[1]))
        self.constant_metric = bool(constant_metric)

    def __repr__(self):
        return f"Surface({self.name!r}, params={self.params}, mode={self.derivative_mode})"

    @property
    def derivative_mode(self) -> str:
        return "analytic" if self._jet_fn is not None else "finite-difference"

    # -- domain ---------------------------------------------------------------

    def contains(self, u, v) -> bool:
        (u0, u1), (v0, v1) = self.domain
        return u0 < u < u1 and v0 < v < v1

    def check(self, u, v):
        if not self.contains(u, v):
            raise OutOfDomain(f"({u!r}, {v!r}) outside {self.name} domain {self.domain}")

    # -- derivatives ------------------------------------------------------------

    def _chart(self, u, v) -> Vec:
        if self._jet_fn is not None:
            return self._jet_fn(u, v, _xp(u, v))[0]
        x, y, z = self._chart_fn(u, v)
        return (x, y, z)

    def jet(self, u, v) -> Jet:
        """Chart value and partials up to order two, no domain check."""
        if self._jet_fn is not None:
            return self._jet_fn(u, v, _xp(u, v))
        return self._fd_jet(u, v)

    def _fd_jet(self, u, v) -> Jet:
        c = self._chart
        h, k = self.h_fd, self.h_fd2
        r = c(u, v)

        def comb(terms, scale):
            return tuple(sum(w * p[i] for w, p in terms) * scale for i in range(3))

        ru = comb([(1.0, c(u + h, v)), (-1.0, c(u - h, v))], 1.0 / (2.0 * h))
        rv = comb([(1.0, c(u, v + h)), (-1.0, c(u, v - h))], 1.0 / (2.0 * h))
        # fourth-order stencils: a plain second difference at 1e-5 sits on a 1e-6 roundoff floor
        ruu = comb(
            [(-1.0, c(u + 2 * k, v)), (16.0, c(u + k, v)), (-30.0, r), (16.0, c(u - k, v)), (-1.0, c(u - 2 * k, v))],
            1.0 / (12.0 * k * k),
        )
        rvv = comb(
            [(-1.0, c(u, v + 2 * k)), (16.0, c(u, v + k)), (-30.0, r), (16.0, c(u, v - k)), (-1.0, c(u, v - 2 * k))],
            1.0 / (12.0 * k * k),
        )

        def mixed(s):
            return comb(
                [(1.0, c(u + s, v + s)), (-1.0, c(u + s, v - s)), (-1.0, c(u - s, v + s)), (1.0, c(u - s, v - s))],
                1.0 / (4.0 * s * s),
            )

        m1, m2 = mixed(k), mixed(2 * k)
        ruv = tuple((4.0 * a - b) / 3.0 for a, b in zip(m1, m2))
        return (r, ru, rv, ruu, ruv, rvv)

    # -- public operations --------------------------------------------------------

    def evaluate(self, u, v) -> np.ndarray:
        self.check(u, v)
        return np.array([float(x) for x in self._chart(u, v)])

    def fundamental_forms(self, u, v) -> FundamentalForms:
        self.check(u, v)
        E, F, G, L, M, N, nn = _forms_from_jet(self.jet(u, v), math)
        if nn <= REGULARITY_FLOOR or E * G - F * F <= METRIC_FLOOR:
            raise DegenerateMetric(f"singular metric at ({u}, {v}) on {self.name}")
        return FundamentalForms(E, F, G, L, M, N, (u, v))

    def curvature(self, u, v) -> CurvatureData:
        ff = self.fundamental_forms(u, v)
        K, k1, k2, H = _principal(ff.E, ff.F, ff.G, ff.L, ff.M, ff.N)
        return CurvatureData(K=K, k1=k1, k2=k2, H=H)

    def christoffel(self, u, v) -> ChristoffelSymbols:
        self.check(u, v)
        gam, D = _christoffel_from_jet(self.jet(u, v))
        if D <= METRIC_FLOOR:
            raise DegenerateMetric(f"singular metric at ({u}, {v}) on {self.name}")
        return ChristoffelSymbols(*gam)

    def classify_by_curvature(self, u, v, zero_tol: float = DEFAULT_ZERO_TOL) -> PointKind:
        """Sign-of-K classification, the reference the limit classifier is checked against."""
        K = self.curvature(u, v).K
        if K > zero_tol:
            return PointKind.ELLIPTIC
        if K < -zero_tol:
            return PointKind.HYPERBOLIC
        return PointKind.PARABOLIC

    # -- fast paths used by other modules ---------------------------------------

    def metric(self, u, v):
        _, ru, rv, *_ = self.jet(u, v)
        return _dot(ru, ru), _dot(ru, rv), _dot(rv, rv)

    def geodesic_acceleration(self, u, v, du, dv):
        """Second derivatives (u'', v'') from the geodesic equation."""
        if self.constant_metric:
            return 0.0, 0.0
        (uuu, uuv, uvv, vuu, vuv, vvv), _ = _christoffel_from_jet(self.jet(u, v))
        return (
            -(uuu * du * du + 2.0 * uuv * du * dv + uvv * dv * dv),
            -(vuu * du * du + 2.0 * vuv * du * dv + vvv * dv * dv),
        )

    def gauss_and_area_element(self, u, v):
        """Vectorized ``(K, sqrt(EG - F^2))`` over arrays of chart points."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        E, F, G, L, M, N, nn = _forms_from_jet(self.jet(u, v), np)
        D = E * G - F * F
        return (L * N - M * M) / D, np.sqrt(D)

    # -- derived surfaces -------------------------------------------------------------

    def swapped(self) -> "Surface":
        """Same surface with u and v exchanged, which flips the chart orientation."""
        (u0, u1), (v0, v1) = self.domain
        dp = (self.default_point[1], self.default_point[0])
        if self._jet_fn is not None:
            jet = self._jet_fn

            def swapped_jet(a, b, xp):
                r, ru, rv, ruu, ruv, rvv = jet(b, a, xp)
                return (r, rv, ru, rvv, ruv, ruu)

            return Surface(((v0, v1), (u0, u1)), jet=swapped_jet, name=self.name + "-swapped",
                           params=self.params, default_point=dp, constant_metric=self.constant_metric)
        chart = self._chart_fn
        return Surface(((v0, v1), (u0, u1)), chart=lambda a, b: chart(b, a), h_fd=self.h_fd,
                       h_fd2=self.h_fd2, name=self.name + "-swapped", params=self.params, default_point=dp)

    def finite_difference(self, h_fd: float = 1e-5, h_fd2: float = 1e-3) -> "Surface":
        """Copy of this surface that ignores analytic derivatives."""
        return Surface(self.domain, chart=self._chart, h_fd=h_fd, h_fd2=h_fd2,
                       name=self.name, params=self.params, default_point=self.default_point)
