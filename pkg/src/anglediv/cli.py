"""Command-line experiment harness.

Subcommands ``run``, ``classify``, ``gbcheck`` and ``gallery``.  Exit codes:
0 success, 1 geometric, configuration or IO failure, 2 non-convergence,
3 inconclusive classification, 4 Gauss-Bonnet check failure.

``run`` settings may come from a config file of ``key = value`` lines
(``#`` starts a comment); keys are the long flag names without dashes.
Flags given on the command line override file values.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields
from typing import Optional

from .classifier import CrossValidationReport, RunTemplate, classify_point, corollary_divisions
from .errors import GeometryError, InconclusiveClassification, NoConvergence
from .gallery import GALLERY, make_surface
from .gaussbonnet import GeodesicTriangle, angle_excess, curvature_integral
from .scheme import DivisionFunctions, TriangleConfig, format_float, run, theoretical_limits
from .surface import Surface

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_NO_CONVERGENCE = 2
EXIT_INCONCLUSIVE = 3
EXIT_GB_FAILED = 4

GB_THRESHOLD = 1e-5
SHAPE_KEYS = ("radius", "R", "r", "a", "b", "c")


def _radial(scale):
    return lambda u, v: 1.0 + scale * (u * u + v * v)


NAMED_DIVISIONS = {
    "bisection": lambda surface: DivisionFunctions.constant(1.0, 1.0),
    "corollary2": corollary_divisions,
    "radial": lambda surface: DivisionFunctions(_radial(1.0), _radial(2.0), label="radial"),
}


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    """Every setting of a ``run``; ``None`` means "use the default for this surface"."""

    surface: str = "plane"
    radius: Optional[float] = None
    R: Optional[float] = None
    r: Optional[float] = None
    a: Optional[float] = None
    b: Optional[float] = None
    c: Optional[float] = None
    vu: Optional[float] = None
    vv: Optional[float] = None
    mu: float = math.pi / 2
    ray_angle: float = 0.0
    a1: float = 0.2
    alpha1: float = math.pi / 4
    pq: str = "const"
    p_const: float = 1.0
    q_const: float = 1.0
    step_h: Optional[float] = None
    max_iters: int = 200
    conv_tol: float = 1e-10
    output: Optional[str] = None

    @staticmethod
    def key(name: str) -> str:
        return name.replace("_", "-")

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            text = repr(value) if isinstance(value, float) else str(value)
            lines.append(f"{self.key(f.name)} = {text}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        return cls(**parse_config_text(text))

    def surface_params(self) -> dict:
        return {k: getattr(self, k) for k in SHAPE_KEYS if getattr(self, k) is not None}

    def build_surface(self) -> Surface:
        return make_surface(self.surface, **self.surface_params())

    def divisions(self, surface: Surface) -> DivisionFunctions:
        if self.pq == "const":
            return DivisionFunctions.constant(self.p_const, self.q_const)
        try:
            return NAMED_DIVISIONS[self.pq](surface)
        except KeyError:
            raise UsageError(f"unknown --pq {self.pq!r}; choose const or one of {', '.join(NAMED_DIVISIONS)}")

    def triangle(self, surface: Surface) -> TriangleConfig:
        V = surface.default_point if self.vu is None and self.vv is None else (
            surface.default_point[0] if self.vu is None else self.vu,
            surface.default_point[1] if self.vv is None else self.vv)
        return TriangleConfig.from_angles(surface, self.mu, self.a1, self.alpha1, V=V, ray_angle=self.ray_angle,
                                          step_h=self.step_h, max_iters=self.max_iters, conv_tol=self.conv_tol)


_FIELD_TYPES = {f.name: f for f in fields(ExperimentConfig)}


def _convert(name: str, text: str):
    if name in ("surface", "pq", "output"):
        return text
    if name == "max_iters":
        return int(text)
    return float(text)


def parse_config_text(text: str) -> dict:
    """``key = value`` lines to a dict of typed config values."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        name = key.replace("-", "_")
        if name not in _FIELD_TYPES:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[name] = _convert(name, value)
        except ValueError:
            raise UsageError(f"config line {lineno}: bad value {value!r} for {key}") from None
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _shape_flags(p):
    p.add_argument("--surface", default=argparse.SUPPRESS, help="gallery surface id")
    for key in SHAPE_KEYS:
        p.add_argument(f"--{key}", type=float, default=argparse.SUPPRESS, help="surface shape parameter")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="anglediv", description="Angle-division dynamics on geodesic triangles.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_run = sub.add_parser("run", help="iterate the construction and write the trace CSV")
    _shape_flags(p_run)
    S = argparse.SUPPRESS
    p_run.add_argument("--config", help="key = value settings file; flags override it")
    p_run.add_argument("--vu", type=float, default=S, help="u coordinate of the vertex V")
    p_run.add_argument("--vv", type=float, default=S, help="v coordinate of the vertex V")
    p_run.add_argument("--mu", type=float, default=S, help="angle at V in radians")
    p_run.add_argument("--ray-angle", dest="ray_angle", type=float, default=S,
                       help="direction of ray A from the u-line, radians")
    p_run.add_argument("--a1", type=float, default=S, help="arc length of A1 along ray A")
    p_run.add_argument("--alpha1", type=float, default=S, help="initial angle V A1 B1 in radians")
    p_run.add_argument("--pq", default=S, help="const, bisection, corollary2 or radial")
    p_run.add_argument("--p-const", dest="p_const", type=float, default=S)
    p_run.add_argument("--q-const", dest="q_const", type=float, default=S)
    p_run.add_argument("--step-h", dest="step_h", type=float, default=S)
    p_run.add_argument("--max-iters", dest="max_iters", type=int, default=S)
    p_run.add_argument("--conv-tol", dest="conv_tol", type=float, default=S)
    p_run.add_argument("--output", "-o", default=S, help="trace CSV path ('-' for standard output)")
    p_run.add_argument("--save-config", dest="save_config", help="write the resolved settings to this file")

    p_cls = sub.add_parser("classify", help="classify one surface point")
    _shape_flags(p_cls)
    p_cls.add_argument("--u", type=float, required=True)
    p_cls.add_argument("--v", type=float, required=True)
    p_cls.add_argument("--mu", type=float, default=math.pi / 2)
    p_cls.add_argument("--mode", choices=("theoretical", "empirical", "both"), default="theoretical")
    p_cls.add_argument("--a1", type=float, default=0.2)
    p_cls.add_argument("--alpha1", type=float, default=math.pi / 4)
    p_cls.add_argument("--step-h", dest="step_h", type=float, default=None)

    p_gb = sub.add_parser("gbcheck", help="Gauss-Bonnet check on a geodesic triangle")
    _shape_flags(p_gb)
    p_gb.add_argument("--vertex", nargs=2, type=float, action="append", metavar=("U", "V"), required=True,
                      help="triangle vertex; give exactly three")
    p_gb.add_argument("--step-h", dest="step_h", type=float, default=1e-3)

    p_gal = sub.add_parser("gallery", help="list the built-in surfaces")
    p_gal.add_argument("--surface", default=None)
    return parser


def _surface_from(args) -> Surface:
    params = {k: getattr(args, k) for k in SHAPE_KEYS if hasattr(args, k)}
    return make_surface(getattr(args, "surface", "plane"), **params)


def resolve_config(args) -> ExperimentConfig:
    values = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read()))
    for name in _FIELD_TYPES:
        if hasattr(args, name):
            values[name] = getattr(args, name)
    if "pq" not in values and ("p_const" in values or "q_const" in values):
        values["pq"] = "const"
    return ExperimentConfig(**values)


def _write_trace(trace, output):
    if output is None:
        return
    if output == "-":
        trace.to_csv(sys.stdout)
        return
    with open(output, "w", encoding="utf-8", newline="") as fh:
        trace.to_csv(fh)


def cmd_run(args) -> int:
    cfg = resolve_config(args)
    if args.save_config:
        with open(args.save_config, "w", encoding="utf-8") as fh:
            fh.write(cfg.to_text())
    surface = cfg.build_surface()
    divisions = cfg.divisions(surface)
    tri = cfg.triangle(surface)
    theory = theoretical_limits(divisions.p_at(tri.V), divisions.q_at(tri.V), tri.mu)
    out = sys.stderr if cfg.output == "-" else sys.stdout
    try:
        trace = run(tri, divisions)
        code = EXIT_OK
    except NoConvergence as exc:
        trace = exc.trace
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_NO_CONVERGENCE
    _write_trace(trace, cfg.output)
    emp = trace.limits
    print(f"steps = {len(trace)}", file=out)
    print(f"alpha_inf_theory = {format_float(theory.alpha_inf)}", file=out)
    print(f"beta_inf_theory = {format_float(theory.beta_inf)}", file=out)
    print(f"alpha_inf_emp = {format_float(emp.alpha_inf)}", file=out)
    print(f"beta_inf_emp = {format_float(emp.beta_inf)}", file=out)
    print(f"gap = {format_float(max(abs(emp.alpha_inf - theory.alpha_inf), abs(emp.beta_inf - theory.beta_inf)))}",
          file=out)
    return code


def cmd_classify(args) -> int:
    surface = _surface_from(args)
    modes = ("theoretical", "empirical") if args.mode == "both" else (args.mode,)
    template = RunTemplate(a1=args.a1, alpha1_hat=args.alpha1, step_h=args.step_h)
    row = classify_point(surface, (args.u, args.v), args.mu, modes, template)
    report = CrossValidationReport([row])
    report.to_csv(sys.stdout)
    for err in row.errors:
        print(f"error: {err}", file=sys.stderr)
    if row.errors:
        return EXIT_FAILURE
    if "inconclusive" in row.kind_limits:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_gbcheck(args) -> int:
    if len(args.vertex) != 3:
        raise UsageError("gbcheck needs exactly three --vertex U V")
    surface = _surface_from(args)
    X, Y, Z = (tuple(v) for v in args.vertex)
    tri = GeodesicTriangle.from_vertices(surface, X, Y, Z, args.step_h)
    integral = curvature_integral(surface, tri)
    excess = angle_excess(surface, tri)
    residual = abs(integral - excess)
    print(f"curvature_integral = {format_float(integral)}")
    print(f"angle_excess = {format_float(excess)}")
    print(f"residual = {format_float(residual)}")
    return EXIT_OK if residual < GB_THRESHOLD else EXIT_GB_FAILED


def _describe(surface_id: str) -> str:
    entry = GALLERY[surface_id]
    surface = entry.factory(**entry.defaults)
    (u0, u1), (v0, v1) = surface.domain
    params = ", ".join(f"{k}={v:g}" for k, v in entry.defaults.items()) or "-"
    return (f"{surface_id}\tparams: {params}\tdomain: u in ({u0:.6g}, {u1:.6g}), v in ({v0:.6g}, {v1:.6g})"
            f"\t{entry.character}")


def cmd_gallery(args) -> int:
    if args.surface is None:
        for surface_id in GALLERY:
            print(_describe(surface_id))
        return EXIT_OK
    if args.surface not in GALLERY:
        raise UsageError(f"unknown surface {args.surface!r}; choose from {', '.join(GALLERY)}")
    print(_describe(args.surface))
    return EXIT_OK


COMMANDS = {"run": cmd_run, "classify": cmd_classify, "gbcheck": cmd_gbcheck, "gallery": cmd_gallery}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except InconclusiveClassification as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (GeometryError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
