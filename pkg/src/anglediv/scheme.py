"""The angle-division dynamical system on a geodesic triangle.

Two geodesic rays leave a vertex V at angle ``mu``.  Starting from a
transversal ``A_1 B_1``, the construction alternates

* from ``B_k`` shoot the geodesic making angle ``beta_k`` with ``B_k V``
  (towards A) and call its crossing with ``V A_k`` the point ``A_{k+1}``;
  ``alpha_{k+1} = angle(V A_{k+1} B_k) / (1 + p(A_{k+1}))``;
* from ``A_{k+1}`` shoot the geodesic making angle ``alpha_{k+1}`` with
  ``A_{k+1} V`` and call its crossing with ``V B_k`` the point ``B_{k+1}``;
  ``beta_{k+1} = angle(V B_{k+1} A_{k+1}) / (1 + q(B_{k+1}))``.

Both divided angles open from the ray towards V.  The limits are
``q(V)(pi - mu) / (p + q + pq)`` for alpha and ``p(V)(pi - mu) / (p + q + pq)``
for beta, independent of the initial transversal and of the curvature.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import DivisionDomain, InvalidParameter, NoConvergence
from .gaussbonnet import GeodesicTriangle, absolute_curvature_integral, curvature_integral
from .geodesic import (GeodesicPath, TangentVector, angle_between, integrate, rotate_tangent, signed_angle,
                       unit_direction)
from .intersection import shoot
from .surface import Surface

DEFAULT_CONV_TOL = 1e-10
DEFAULT_MAX_ITERS = 200
STEPS_PER_DIAMETER = 2000
SHOT_REACH = 10.0

TRACE_COLUMNS = ("k", "au", "av", "bu", "bv", "len_VA", "len_VB", "alpha", "beta", "raw_alpha", "raw_beta",
                 "int_ABA", "int_ABV", "eps", "res_eq1", "res_eq2")


@dataclass(frozen=True)
class DivisionFunctions:
    """Positive division functions ``p`` and ``q`` of a chart point ``(u, v)``."""

    p: Callable[[float, float], float]
    q: Callable[[float, float], float]
    label: str = "custom"

    @classmethod
    def constant(cls, p: float, q: float) -> "DivisionFunctions":
        if not (p > 0 and q > 0):
            raise InvalidParameter(f"division constants must be positive, got p={p}, q={q}")
        p, q = float(p), float(q)
        return cls(lambda u, v: p, lambda u, v: q, label=f"const({p:g},{q:g})")

    def p_at(self, point) -> float:
        value = float(self.p(*point))
        if not value > 0:
            raise InvalidParameter(f"p({point}) = {value} is not positive")
        return value

    def q_at(self, point) -> float:
        value = float(self.q(*point))
        if not value > 0:
            raise InvalidParameter(f"q({point}) = {value} is not positive")
        return value


@dataclass(frozen=True)
class LimitPair:
    alpha_inf: float
    beta_inf: float


def theoretical_limits(pV: float, qV: float, mu: float) -> LimitPair:
    """Closed-form limits of the divided angles given p(V), q(V) and the vertex angle."""
    if not (pV > 0 and qV > 0):
        raise InvalidParameter(f"p(V) and q(V) must be positive, got {pV}, {qV}")
    if not 0 <= mu <= math.pi:
        raise InvalidParameter(f"mu={mu} outside [0, pi]")
    denom = pV + qV + pV * qV
    return LimitPair(qV * (math.pi - mu) / denom, pV * (math.pi - mu) / denom)


def plane_oracle(p: float, q: float, mu: float, alpha1: float, n: int):
    """Exact angle sequences on the plane for constant ``p`` and ``q``.

    With zero curvature the triangle angle sums give the affine recurrence
    ``alpha_{k+1} = (alpha_k + q (pi - mu)) / ((1 + p)(1 + q))`` and
    ``beta_k = (pi - mu - alpha_k) / (1 + q)``.

    Returns:
        ``(alphas, betas)``, arrays of length ``n`` starting at index 1.
    """
    if not (p > 0 and q > 0):
        raise InvalidParameter("p and q must be positive")
    c = math.pi - mu
    alphas = np.empty(n)
    betas = np.empty(n)
    a = alpha1
    for k in range(n):
        alphas[k] = a
        betas[k] = (c - a) / (1.0 + q)
        a = (a + q * c) / ((1.0 + p) * (1.0 + q))
    return alphas, betas


def _estimate_diameter(mu, a1, alpha1_hat):
    gamma = math.pi - mu - alpha1_hat
    if gamma <= 0.05:
        return 20.0 * a1
    vb = a1 * math.sin(alpha1_hat) / math.sin(gamma)
    ab = a1 * math.sin(mu) / math.sin(gamma)
    return min(max(a1, vb, ab), 20.0 * a1)


@dataclass(frozen=True)
class TriangleConfig:
    """Initial geodesic triangle and integration settings.

    ``ray_a`` and ``ray_b`` are unit tangent vectors at ``V``; ``A_1`` sits at
    arc length ``a1`` along the first ray and the first transversal leaves it
    at angle ``alpha1_hat`` from ``A_1 V``.
    """

    surface: Surface
    V: tuple
    ray_a: TangentVector
    ray_b: TangentVector
    mu: float
    a1: float
    alpha1_hat: float
    step_h: float
    max_iters: int = DEFAULT_MAX_ITERS
    conv_tol: float = DEFAULT_CONV_TOL
    ray_b_length: Optional[float] = None

    def __post_init__(self):
        self.surface.check(*self.V)
        if not 0 < self.mu < math.pi:
            raise InvalidParameter(f"mu={self.mu} must lie in (0, pi)")
        if not 0 < self.alpha1_hat < math.pi:
            raise InvalidParameter(f"alpha1_hat={self.alpha1_hat} must lie in (0, pi)")
        if not (self.a1 > 0 and self.step_h > 0 and self.conv_tol > 0 and self.max_iters >= 1):
            raise InvalidParameter("a1, step_h, conv_tol and max_iters must be positive")
        measured = angle_between(self.surface, self.V, self.ray_a, self.ray_b)
        if abs(measured - self.mu) > 1e-10:
            raise InvalidParameter(f"rays meet at {measured!r}, not mu={self.mu!r}")

    @classmethod
    def from_angles(cls, surface: Surface, mu: float, a1: float, alpha1_hat: float, V=None,
                    ray_angle: float = 0.0, step_h: Optional[float] = None, validate: bool = True,
                    **kwargs) -> "TriangleConfig":
        """Rays at ``ray_angle`` and ``ray_angle + mu`` from the u-coordinate line at V.

        ``step_h`` defaults to the planar estimate of the triangle diameter / 2000.
        With ``validate`` the first transversal is shot once, so a configuration
        whose initial shot misses ray B fails here with ``NoIntersection``.
        """
        V = surface.default_point if V is None else (float(V[0]), float(V[1]))
        ray_a = unit_direction(surface, V, ray_angle)
        ray_b = rotate_tangent(surface, V, ray_a, mu)
        if step_h is None:
            step_h = _estimate_diameter(mu, a1, alpha1_hat) / STEPS_PER_DIAMETER
        config = cls(surface=surface, V=V, ray_a=ray_a, ray_b=ray_b, mu=mu, a1=a1, alpha1_hat=alpha1_hat,
                     step_h=step_h, **kwargs)
        if validate:
            check_transversal(config)
        return config

    @property
    def orientation(self) -> int:
        """+1 when ray B lies on the positive (chart-oriented) side of ray A."""
        return 1 if signed_angle(self.surface, self.V, self.ray_a, self.ray_b) > 0 else -1

    def resolved_ray_b_length(self) -> float:
        if self.ray_b_length is not None:
            return self.ray_b_length
        return 2.0 * _estimate_diameter(self.mu, self.a1, self.alpha1_hat)


@dataclass
class StepRecord:
    k: int
    a: tuple
    b: tuple
    len_va: float
    len_vb: float
    alpha: float
    beta: float
    raw_alpha: float
    raw_beta: float
    p_a: float = math.nan
    q_b: float = math.nan
    int_aba: float = math.nan
    int_abv: float = math.nan
    eps: float = math.nan
    res_eq1: float = math.nan
    res_eq2: float = math.nan

    def row(self):
        return (self.k, self.a[0], self.a[1], self.b[0], self.b[1], self.len_va, self.len_vb, self.alpha,
                self.beta, self.raw_alpha, self.raw_beta, self.int_aba, self.int_abv, self.eps, self.res_eq1,
                self.res_eq2)


@dataclass
class IterationTrace:
    """Per-step record of the construction plus the geodesics it produced.

    ``shots_a[k-1]`` runs from ``A_k`` to ``B_k`` and ``shots_b[k-1]`` from
    ``B_k`` to ``A_{k+1}``; both rays start at V.
    """

    config: TriangleConfig
    divisions: DivisionFunctions
    ray_a: GeodesicPath
    ray_b: GeodesicPath
    records: List[StepRecord] = field(default_factory=list)
    shots_a: List[GeodesicPath] = field(default_factory=list)
    shots_b: List[GeodesicPath] = field(default_factory=list)
    converged: bool = False

    def __len__(self):
        return len(self.records)

    @property
    def alphas(self) -> np.ndarray:
        return np.array([r.alpha for r in self.records])

    @property
    def betas(self) -> np.ndarray:
        return np.array([r.beta for r in self.records])

    @property
    def limits(self) -> LimitPair:
        last = self.records[-1]
        return LimitPair(last.alpha, last.beta)

    def to_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for rec in self.records:
            writer.writerow([str(x) if isinstance(x, int) else format_float(x) for x in rec.row()])


def format_float(x: float) -> str:
    return format(float(x), ".17g")


class AngleDivision:
    """Stateful engine behind :func:`run`; one instance per run."""

    def __init__(self, config: TriangleConfig, divisions: DivisionFunctions):
        self.config = config
        self.divisions = divisions
        self.surface = config.surface
        h = config.step_h
        self.ray_a = integrate(self.surface, config.V, config.ray_a, config.a1, h)
        self.ray_b = integrate(self.surface, config.V, config.ray_b, config.resolved_ray_b_length(), h,
                               stop_at_boundary=True)
        sign = config.orientation
        self.turn_a = -sign
        self.turn_b = sign

    def _toward_v(self, ray: GeodesicPath, t: float):
        u, v, du, dv = ray.state_at(t)
        return (u, v), TangentVector((u, v), (-du, -dv))

    def _divided(self, raw, label):
        if not 0 < raw < math.pi:
            raise DivisionDomain(f"raw angle {label}={raw!r} outside (0, pi)")

    def shot_from_a(self, t_a: float, angle: float, target_len: float, reach: float, first_chunk=None):
        """Shoot from the point at ``t_a`` on ray A; returns ``(t_b, raw angle at B, path)``."""
        at, tv = self._toward_v(self.ray_a, t_a)
        d = rotate_tangent(self.surface, at, tv, angle, self.turn_a)
        target = self.ray_b if target_len is None else self.ray_b.subpath(0.0, target_len)
        hit, path = shoot(self.surface, at, d, target, self.config.step_h, reach, first_chunk=first_chunk)
        # both the returning shot and the ray towards V are reversed, which leaves the angle unchanged
        raw = angle_between(self.surface, hit.point, hit.shot_state[2:], hit.target_state[2:])
        return hit.t_target, raw, path

    def shot_from_b(self, t_b: float, angle: float, target_len: float, reach: float, first_chunk=None):
        at, tv = self._toward_v(self.ray_b, t_b)
        d = rotate_tangent(self.surface, at, tv, angle, self.turn_b)
        target = self.ray_a.subpath(0.0, target_len)
        hit, path = shoot(self.surface, at, d, target, self.config.step_h, reach, first_chunk=first_chunk)
        raw = angle_between(self.surface, hit.point, hit.shot_state[2:], hit.target_state[2:])
        return hit.t_target, raw, path

    def point_a(self, t):
        return self.ray_a.point_at(t)

    def point_b(self, t):
        return self.ray_b.point_at(t)

    def initial_transversal(self):
        """Place ``A_1``, shoot the first transversal and measure ``beta_1``."""
        cfg = self.config
        reach = SHOT_REACH * (cfg.a1 + self.ray_b.total_length)
        t_b, raw_b, path = self.shot_from_a(cfg.a1, cfg.alpha1_hat, None, reach)
        self._divided(raw_b, "angle(V B1 A1)")
        b1 = self.point_b(t_b)
        q = self.divisions.q_at(b1)
        return t_b, raw_b, raw_b / (1.0 + q), q, path


def initial_transversal(config: TriangleConfig, divisions: DivisionFunctions):
    """``(B_1, alpha_1, beta_1, segment A_1 B_1)`` for a configuration."""
    eng = AngleDivision(config, divisions)
    t_b, raw_b, beta1, _, path = eng.initial_transversal()
    return eng.point_b(t_b), config.alpha1_hat, beta1, path


def check_transversal(config: TriangleConfig):
    """Raise if the first transversal cannot be built (e.g. ``NoIntersection``)."""
    initial_transversal(config, DivisionFunctions.constant(1.0, 1.0))


def run(config: TriangleConfig, divisions: DivisionFunctions, diagnostics: bool = True) -> IterationTrace:
    """Iterate the construction until successive angles settle within ``conv_tol``.

    Raises:
        NoConvergence: ``max_iters`` reached; the partial trace is attached.
        NoIntersection, TangentialIntersection, DivisionDomain: geometric failure.
    """
    eng = AngleDivision(config, divisions)
    trace = IterationTrace(config=config, divisions=divisions, ray_a=eng.ray_a, ray_b=eng.ray_b)
    t_a = config.a1
    t_b, raw_b, beta, q_b, shot = eng.initial_transversal()
    alpha = config.alpha1_hat
    trace.shots_a.append(shot)
    trace.records.append(StepRecord(1, eng.point_a(t_a), eng.point_b(t_b), t_a, t_b, alpha, beta,
                                    alpha, raw_b, q_b=q_b))
    for k in range(2, config.max_iters + 2):
        perimeter = t_a + t_b + shot.total_length
        t_a_new, raw_a, shot_b = eng.shot_from_b(t_b, beta, t_a, SHOT_REACH * perimeter, first_chunk=perimeter)
        eng._divided(raw_a, f"angle(V A{k} B{k - 1})")
        a_new = eng.point_a(t_a_new)
        p_a = divisions.p_at(a_new)
        alpha_new = raw_a / (1.0 + p_a)

        perimeter = t_a_new + t_b + shot_b.total_length
        t_b_new, raw_b, shot = eng.shot_from_a(t_a_new, alpha_new, t_b, SHOT_REACH * perimeter,
                                               first_chunk=perimeter)
        eng._divided(raw_b, f"angle(V B{k} A{k})")
        b_new = eng.point_b(t_b_new)
        q_b = divisions.q_at(b_new)
        beta_new = raw_b / (1.0 + q_b)

        trace.shots_b.append(shot_b)
        trace.shots_a.append(shot)
        trace.records.append(StepRecord(k, a_new, b_new, t_a_new, t_b_new, alpha_new, beta_new, raw_a, raw_b,
                                        p_a=p_a, q_b=q_b))
        done = abs(alpha_new - alpha) < config.conv_tol and abs(beta_new - beta) < config.conv_tol
        t_a, t_b, alpha, beta = t_a_new, t_b_new, alpha_new, beta_new
        if done:
            trace.converged = True
            break
    if diagnostics:
        _attach_diagnostics(trace)
    if not trace.converged:
        raise NoConvergence(f"no convergence to {config.conv_tol:g} within {config.max_iters} iterations",
                            trace=trace)
    return trace


def triangles(trace: IterationTrace, k: int):
    """The triangles ``A_k B_k A_{k+1}`` (None at the last step) and ``A_k B_k V`` (1-based ``k``)."""
    surface = trace.config.surface
    rec = trace.records[k - 1]
    ab = trace.shots_a[k - 1]
    abv = GeodesicTriangle.from_sides(surface, ab, trace.ray_b.subpath(0.0, rec.len_vb).reversed(),
                                      trace.ray_a.subpath(0.0, rec.len_va))
    aba = None
    if k < len(trace.records):
        nxt = trace.records[k]
        aba = GeodesicTriangle.from_sides(surface, ab, trace.shots_b[k - 1],
                                          trace.ray_a.subpath(nxt.len_va, rec.len_va))
    return aba, abv


@dataclass(frozen=True)
class RecurrenceCheck:
    int_aba: np.ndarray
    int_abv: np.ndarray
    res_eq1: np.ndarray
    res_eq2: np.ndarray


def verify_recurrence(trace: IterationTrace, surface: Optional[Surface] = None) -> RecurrenceCheck:
    """Residuals of the two Gauss-Bonnet recurrences at every recorded step.

    With ``I1`` the curvature integral over ``A_k B_k A_{k+1}`` and ``I2`` over
    ``A_k B_k V``:

    * ``res_eq1`` checks ``alpha_{k+1} = (alpha_k + q(B_k) beta_k - I1) / (1 + p(A_{k+1}))``
    * ``res_eq2`` checks ``beta_k = (pi - mu - alpha_k + I2) / (1 + q(B_k))``

    Entry ``k - 1`` of each array belongs to step ``k``; ``res_eq1`` has no value
    at the final step.
    """
    surface = surface or trace.config.surface
    recs = trace.records
    n = len(recs)
    if n < 2:
        raise InvalidParameter("recurrence check needs at least two steps")
    mu = trace.config.mu
    i1 = np.full(n, math.nan)
    i2 = np.full(n, math.nan)
    r1 = np.full(n, math.nan)
    r2 = np.full(n, math.nan)
    for k in range(1, n + 1):
        rec = recs[k - 1]
        aba, abv = triangles(trace, k)
        i2[k - 1] = curvature_integral(surface, abv)
        r2[k - 1] = abs(rec.beta - (math.pi - mu - rec.alpha + i2[k - 1]) / (1.0 + rec.q_b))
        if aba is not None:
            nxt = recs[k]
            i1[k - 1] = curvature_integral(surface, aba)
            rhs = (rec.alpha + rec.q_b * rec.beta - i1[k - 1]) / (1.0 + nxt.p_a)
            r1[k - 1] = abs(nxt.alpha - rhs)
    return RecurrenceCheck(i1, i2, r1, r2)


@dataclass(frozen=True)
class ContractionReport:
    rho: float
    fixed_point: float
    eps: np.ndarray
    ratio: np.ndarray

    def T(self, phi):
        return self.rho * phi + (1.0 - self.rho) * self.fixed_point


def contraction_diagnostics(trace: IterationTrace, divisions: Optional[DivisionFunctions] = None,
                            mu: Optional[float] = None) -> ContractionReport:
    """Compare the iteration with the affine contraction ``T`` built from p(V), q(V).

    ``T(phi) = (phi + q(V)(pi - mu)) / ((1 + p(V))(1 + q(V)))``.  ``eps[k-1]``
    is ``|alpha_{k+1} - T(alpha_k)|`` and ``ratio[k-1]`` is
    ``|alpha_{k+1} - alpha_inf| / |alpha_k - alpha_inf|`` (NaN when undefined).
    """
    divisions = divisions or trace.divisions
    mu = trace.config.mu if mu is None else mu
    V = trace.config.V
    pV, qV = divisions.p_at(V), divisions.q_at(V)
    rho = 1.0 / ((1.0 + pV) * (1.0 + qV))
    fixed = theoretical_limits(pV, qV, mu).alpha_inf
    a = trace.alphas
    T = rho * a[:-1] + qV * (math.pi - mu) * rho
    eps = np.abs(a[1:] - T)
    err = np.abs(a - fixed)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(err[:-1] > 0, err[1:] / err[:-1], math.nan)
    return ContractionReport(rho=rho, fixed_point=fixed, eps=eps, ratio=ratio)


def _attach_diagnostics(trace: IterationTrace):
    recs = trace.records
    if len(recs) >= 2:
        check = verify_recurrence(trace)
        for i, rec in enumerate(recs):
            rec.int_aba = float(check.int_aba[i])
            rec.int_abv = float(check.int_abv[i])
            rec.res_eq1 = float(check.res_eq1[i])
            rec.res_eq2 = float(check.res_eq2[i])
        report = contraction_diagnostics(trace)
        for i, e in enumerate(report.eps):
            recs[i].eps = float(e)


def variation_bound(trace: IterationTrace):
    """``(sum_k |∬_{A_k B_k A_{k+1}} K|, ∬_{A_1 B_1 V} |K|)``; the first never exceeds the second."""
    total = float(np.nansum(np.abs([r.int_aba for r in trace.records])))
    _, abv = triangles(trace, 1)
    return total, absolute_curvature_integral(trace.config.surface, abv)
