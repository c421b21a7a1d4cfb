"""Point classification from the limits of the angle-division dynamics.

With the curvature-derived division functions

    p = 1 + |K (k1 + k2)|,    q = 1 + |K| (|k1| + |k2|)

the two limits coincide at (pi - mu)/3 on parabolic points, coincide below
that value on elliptic points and differ on hyperbolic points.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional, Sequence

from .errors import GeometryError, InconclusiveClassification, InvalidParameter, NoConvergence
from .scheme import DivisionFunctions, LimitPair, TriangleConfig, format_float, run, theoretical_limits
from .surface import PointKind, Surface

THEORETICAL_TOL = 1e-6
EMPIRICAL_TOL = 1e-4

REPORT_COLUMNS = ("surface", "u", "v", "K", "k1", "k2", "p", "q", "alpha_inf_theory", "beta_inf_theory",
                  "alpha_inf_emp", "beta_inf_emp", "kind_limits", "kind_oracle", "agree")


class Evidence(str, Enum):
    THEORETICAL = "theoretical"
    EMPIRICAL = "empirical"


def corollary_p(surface: Surface, u: float, v: float) -> float:
    c = surface.curvature(u, v)
    return 1.0 + abs(c.K * (c.k1 + c.k2))


def corollary_q(surface: Surface, u: float, v: float) -> float:
    c = surface.curvature(u, v)
    return 1.0 + abs(c.K) * (abs(c.k1) + abs(c.k2))


def corollary_divisions(surface: Surface) -> DivisionFunctions:
    """Division functions ``(corollary_p, corollary_q)`` bound to ``surface``."""
    return DivisionFunctions(lambda u, v: corollary_p(surface, u, v), lambda u, v: corollary_q(surface, u, v),
                             label="corollary2")


@dataclass(frozen=True)
class PointType:
    kind: PointKind
    limit_pair: LimitPair
    evidence: Evidence


@dataclass(frozen=True)
class RunTemplate:
    """Initial-triangle settings used to place an empirical run around a point."""

    a1: float = 0.2
    alpha1_hat: float = math.pi / 4
    ray_angle: float = 0.0
    step_h: Optional[float] = None
    max_iters: int = 200
    conv_tol: float = 1e-10

    def config(self, surface: Surface, V, mu: float) -> TriangleConfig:
        return TriangleConfig.from_angles(surface, mu, self.a1, self.alpha1_hat, V=V, ray_angle=self.ray_angle,
                                          step_h=self.step_h, max_iters=self.max_iters, conv_tol=self.conv_tol)


def decide(limits: LimitPair, mu: float, decision_tol: float) -> PointKind:
    """Apply the trichotomy to a limit pair.

    Raises:
        InconclusiveClassification: equal limits above (pi - mu)/3 + decision_tol.
    """
    third = (math.pi - mu) / 3.0
    a, b = limits.alpha_inf, limits.beta_inf
    if abs(a - b) > decision_tol:
        return PointKind.HYPERBOLIC
    if abs(a - third) <= decision_tol:
        return PointKind.PARABOLIC
    if a < third - decision_tol:
        return PointKind.ELLIPTIC
    raise InconclusiveClassification(
        f"limits ({a:.10g}, {b:.10g}) fit no class for mu={mu:.10g} at tolerance {decision_tol:g}",
        limit_pair=limits)


def empirical_limits(surface: Surface, V, mu: float, template: Optional[RunTemplate] = None) -> LimitPair:
    cfg = (template or RunTemplate()).config(surface, V, mu)
    return run(cfg, corollary_divisions(surface), diagnostics=False).limits


def classify_via_limits(surface: Surface, V, mu: float, mode: str = "theoretical",
                        decision_tol: Optional[float] = None, template: Optional[RunTemplate] = None) -> PointType:
    """Classify the point ``V`` from the limit pair under the curvature-derived ``p, q``.

    Args:
        mode: ``"theoretical"`` evaluates the closed-form limits at V;
            ``"empirical"`` runs the iteration on a triangle built from ``template``.
        decision_tol: defaults to 1e-6 (theoretical) or 1e-4 (empirical).
    """
    evidence = Evidence(mode)
    if not 0 < mu < math.pi:
        raise InvalidParameter(f"mu={mu} must lie in (0, pi)")
    u, v = float(V[0]), float(V[1])
    surface.check(u, v)
    if evidence is Evidence.THEORETICAL:
        limits = theoretical_limits(corollary_p(surface, u, v), corollary_q(surface, u, v), mu)
        tol = THEORETICAL_TOL if decision_tol is None else decision_tol
    else:
        limits = empirical_limits(surface, (u, v), mu, template)
        tol = EMPIRICAL_TOL if decision_tol is None else decision_tol
    return PointType(decide(limits, mu, tol), limits, evidence)


@dataclass
class ReportRow:
    surface: str
    u: float
    v: float
    K: float = math.nan
    k1: float = math.nan
    k2: float = math.nan
    p: float = math.nan
    q: float = math.nan
    theory: Optional[LimitPair] = None
    empirical: Optional[LimitPair] = None
    kind_theory: Optional[str] = None
    kind_empirical: Optional[str] = None
    kind_oracle: Optional[str] = None
    errors: List[str] = field(default_factory=list)

    @property
    def kind_limits(self) -> str:
        kinds = {k for k in (self.kind_theory, self.kind_empirical) if k is not None}
        if self.errors or len(kinds) != 1:
            return "error" if self.errors else "/".join(sorted(kinds)) or "error"
        return kinds.pop()

    @property
    def agree(self) -> bool:
        return not self.errors and self.kind_oracle is not None and self.kind_limits == self.kind_oracle

    def values(self):
        nan2 = (math.nan, math.nan)
        th = (self.theory.alpha_inf, self.theory.beta_inf) if self.theory else nan2
        em = (self.empirical.alpha_inf, self.empirical.beta_inf) if self.empirical else nan2
        nums = [self.u, self.v, self.K, self.k1, self.k2, self.p, self.q, *th, *em]
        return [self.surface, *(format_float(x) for x in nums), self.kind_limits, self.kind_oracle or "error",
                str(self.agree).lower()]


@dataclass
class CrossValidationReport:
    rows: List[ReportRow] = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    @property
    def agreement(self) -> float:
        """Fraction of rows agreeing with the curvature-sign oracle (1.0 for an empty report)."""
        if not self.rows:
            return 1.0
        return sum(r.agree for r in self.rows) / len(self.rows)

    def limit_gaps(self) -> List[float]:
        return [max(abs(r.theory.alpha_inf - r.empirical.alpha_inf), abs(r.theory.beta_inf - r.empirical.beta_inf))
                if r.theory and r.empirical else math.nan for r in self.rows]

    def to_csv(self, fh, header: bool = True):
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            writer.writerow(REPORT_COLUMNS)
        for row in self.rows:
            writer.writerow(row.values())


def _label(surface: Surface) -> str:
    return surface.name or "surface"


def classify_point(surface: Surface, V, mu: float, modes: Sequence[str] = ("theoretical", "empirical"),
                   template: Optional[RunTemplate] = None, zero_tol: float = 1e-7) -> ReportRow:
    """One report row; failures are recorded in ``row.errors`` instead of raised."""
    u, v = float(V[0]), float(V[1])
    row = ReportRow(_label(surface), u, v)
    try:
        c = surface.curvature(u, v)
        row.K, row.k1, row.k2 = c.K, c.k1, c.k2
        row.p, row.q = corollary_p(surface, u, v), corollary_q(surface, u, v)
        row.kind_oracle = surface.classify_by_curvature(u, v, zero_tol=zero_tol).value
    except GeometryError as exc:
        row.errors.append(f"curvature: {exc}")
        return row
    for mode in modes:
        try:
            result = classify_via_limits(surface, (u, v), mu, mode, template=template)
            kind = result.kind.value
            limits = result.limit_pair
        except InconclusiveClassification as exc:
            kind, limits = "inconclusive", exc.limit_pair
        except NoConvergence as exc:
            row.errors.append(f"{mode}: {exc}")
            continue
        except GeometryError as exc:
            row.errors.append(f"{mode}: {type(exc).__name__}: {exc}")
            continue
        if mode == "theoretical":
            row.kind_theory, row.theory = kind, limits
        else:
            row.kind_empirical, row.empirical = kind, limits
    return row


def cross_validate(points: Iterable, mu: float, template: Optional[RunTemplate] = None,
                   modes: Sequence[str] = ("theoretical", "empirical")) -> CrossValidationReport:
    """Compare limit-based and curvature-sign classification over ``(surface, (u, v))`` pairs.

    A failing point is flagged in its row and the batch continues.
    """
    report = CrossValidationReport()
    for surface, V in points:
        report.rows.append(classify_point(surface, V, mu, modes, template))
    return report


def gallery_points():
    """The eight standard test points: one per gallery surface, torus twice."""
    from .gallery import cylinder, ellipsoid, monkey_saddle, plane, saddle, sphere, torus

    return [
        (plane(), (0.0, 0.0)),
        (cylinder(), (0.0, 0.0)),
        (sphere(), (math.pi / 2, 0.0)),
        (ellipsoid(), (math.pi / 2, 0.0)),
        (saddle(), (0.0, 0.0)),
        (torus(), (0.0, 0.0)),
        (torus(), (math.pi, 0.0)),
        (monkey_saddle(), (0.0, 0.0)),
    ]
