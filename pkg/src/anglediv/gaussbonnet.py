"""Curvature integrals over geodesic triangles and Gauss-Bonnet consistency checks.

The integral of ``K dS`` is computed in chart space as ``∬ K sqrt(EG - F^2)
du dv`` over the polygon traced by the three side polylines.  The polygon is
split into a fan of signed triangles around its vertex centroid and each is
integrated with the 7-point degree-5 Gauss rule; the fan is refined by
uniform 4-way splitting until two successive levels agree.  Signed triangles
cancel outside the polygon, so the fan is exact for any simple polygon, star
shaped or not, and needs no ear clipping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, NonSimplePolygon
from .geodesic import GeodesicPath, angle_between, connect
from .surface import Surface

QUAD_TOL = 1e-10
MAX_LEVELS = 7
CLOSURE_TOL = 1e-9
MIN_SIDE_POINTS = 16
MAX_CHORD = 1e-3
CHECK_POINTS = 64

_S15 = math.sqrt(15.0)
_A1, _B1 = (9.0 - 2.0 * _S15) / 21.0, (6.0 + _S15) / 21.0
_A2, _B2 = (9.0 + 2.0 * _S15) / 21.0, (6.0 - _S15) / 21.0
GAUSS7_BARY = np.array([
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    [_A1, _B1, _B1], [_B1, _A1, _B1], [_B1, _B1, _A1],
    [_A2, _B2, _B2], [_B2, _A2, _B2], [_B2, _B2, _A2],
])
GAUSS7_WEIGHTS = np.array([9.0 / 40.0] + [(155.0 + _S15) / 1200.0] * 3 + [(155.0 - _S15) / 1200.0] * 3)


def _resampled(path: GeodesicPath) -> GeodesicPath:
    """Densify a side so that its polygon follows the curve.

    The area between a chord and the curve is O(length^3), so the polygon
    error falls with the square of the spacing; sides are sampled at least
    every ``MAX_CHORD`` of arc length and never with fewer than
    ``MIN_SIDE_POINTS`` points.
    """
    # on a constant-metric chart the geodesic is the chord itself
    if path.surface.constant_metric:
        return path
    L = path.total_length
    n = max(MIN_SIDE_POINTS, int(math.ceil(L / MAX_CHORD)) + 1)
    if len(path) >= n:
        return path
    rows = [(s, *path.state_at(s)) for s in np.linspace(0.0, L, n)]
    rows[-1] = tuple(path.states[-1])
    return GeodesicPath(path.surface, rows, path.step_h)


@dataclass(frozen=True)
class GeodesicTriangle:
    """Triangle XYZ with sides XY, YZ, ZX given as geodesic paths."""

    vertices: tuple
    sides: tuple
    angles: tuple

    @classmethod
    def from_sides(cls, surface: Surface, xy: GeodesicPath, yz: GeodesicPath, zx: GeodesicPath,
                   closure_tol: float = CLOSURE_TOL) -> "GeodesicTriangle":
        for a, b in ((xy, yz), (yz, zx), (zx, xy)):
            gap = math.dist(a.end, b.start)
            if gap > closure_tol:
                raise InvalidParameter(f"triangle sides do not close (gap {gap:.3g})")
        X, Y, Z = xy.start, yz.start, zx.start
        angles = (
            angle_between(surface, X, xy.start_tangent(), -zx.end_tangent()),
            angle_between(surface, Y, yz.start_tangent(), -xy.end_tangent()),
            angle_between(surface, Z, zx.start_tangent(), -yz.end_tangent()),
        )
        sides = (_resampled(xy), _resampled(yz), _resampled(zx))
        return cls(vertices=(X, Y, Z), sides=sides, angles=angles)

    @classmethod
    def from_vertices(cls, surface: Surface, X, Y, Z, step_h: float = 1e-3) -> "GeodesicTriangle":
        """Connect three points pairwise with :func:`~anglediv.geodesic.connect`."""
        xy = connect(surface, X, Y, step_h).path
        yz = connect(surface, Y, Z, step_h).path
        zx = connect(surface, Z, X, step_h).path
        # vertex positions come from the shooting endpoints, which land within the connect tolerance
        return cls.from_sides(surface, xy, yz, zx, closure_tol=max(CLOSURE_TOL, 1e-9))

    def polygon(self) -> np.ndarray:
        return np.vstack([side.positions[:-1] for side in self.sides])

    @property
    def side_lengths(self):
        return tuple(side.total_length for side in self.sides)


def _signed_area(poly: np.ndarray) -> float:
    local = poly - poly[0]
    x, y = local[:, 0], local[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _decimated(triangle: GeodesicTriangle) -> np.ndarray:
    parts = []
    for side in triangle.sides:
        idx = np.unique(np.linspace(0, len(side) - 1, min(len(side), CHECK_POINTS)).round().astype(int))
        parts.append(side.positions[idx[:-1]])
    return np.vstack(parts)


def check_simple(triangle: GeodesicTriangle):
    """Raise :class:`NonSimplePolygon` for degenerate or self-crossing boundaries.

    Crossings are tested on a decimated copy of the boundary; zero area is
    tested relative to the squared perimeter.
    """
    poly = triangle.polygon()
    closed = np.vstack([poly, poly[:1]])
    perimeter = float(np.sum(np.hypot(*np.diff(closed, axis=0).T)))
    if perimeter == 0.0 or abs(_signed_area(poly)) <= 1e-10 * perimeter * perimeter:
        raise NonSimplePolygon("triangle boundary encloses no area (collinear or coincident vertices)")
    pts = _decimated(triangle)
    n = len(pts)
    a, b = pts, np.roll(pts, -1, axis=0)
    r = (b - a)[:, None, :]
    s = (b - a)[None, :, :]
    ca = a[None, :, :] - a[:, None, :]
    denom = r[..., 0] * s[..., 1] - r[..., 1] * s[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = (ca[..., 0] * s[..., 1] - ca[..., 1] * s[..., 0]) / denom
        mu = (ca[..., 0] * r[..., 1] - ca[..., 1] * r[..., 0]) / denom
    i, j = np.indices((n, n))
    gap = (j - i) % n
    nonadjacent = (gap > 1) & (gap < n - 1)
    eps = 1e-12
    hit = nonadjacent & (denom != 0) & (lam > eps) & (lam < 1 - eps) & (mu > eps) & (mu < 1 - eps)
    if hit.any():
        raise NonSimplePolygon("triangle boundary intersects itself")


def _fan(poly: np.ndarray):
    center = poly.mean(axis=0)
    B = poly
    C = np.roll(poly, -1, axis=0)
    A = np.broadcast_to(center, B.shape).copy()
    return A, B, C


def _split(A, B, C):
    ab, bc, ca = 0.5 * (A + B), 0.5 * (B + C), 0.5 * (C + A)
    return (np.concatenate([A, ab, ca, ab]), np.concatenate([ab, B, bc, bc]), np.concatenate([ca, bc, C, ca]))


def _quadrature(surface, A, B, C, integrand):
    area = 0.5 * ((B[:, 0] - A[:, 0]) * (C[:, 1] - A[:, 1]) - (B[:, 1] - A[:, 1]) * (C[:, 0] - A[:, 0]))
    pts = (GAUSS7_BARY[None, :, 0, None] * A[:, None, :] + GAUSS7_BARY[None, :, 1, None] * B[:, None, :]
           + GAUSS7_BARY[None, :, 2, None] * C[:, None, :])
    K, dA = surface.gauss_and_area_element(pts[..., 0], pts[..., 1])
    if integrand == "K":
        f = K * dA
    elif integrand == "absK":
        f = np.abs(K) * dA
    else:
        f = dA
    return float(np.sum(area * (f @ GAUSS7_WEIGHTS)))


def _integrate(surface: Surface, triangle: GeodesicTriangle, integrand: str, tol: float) -> float:
    check_simple(triangle)
    poly = triangle.polygon()
    sign = 1.0 if _signed_area(poly) > 0 else -1.0
    A, B, C = _fan(poly)
    prev = _quadrature(surface, A, B, C, integrand)
    for _ in range(MAX_LEVELS):
        A, B, C = _split(A, B, C)
        cur = _quadrature(surface, A, B, C, integrand)
        if abs(cur - prev) < tol:
            return sign * cur
        prev = cur
    return sign * prev


def curvature_integral(surface: Surface, triangle: GeodesicTriangle, tol: float = QUAD_TOL) -> float:
    """Total Gaussian curvature ∬ K dS over the triangle."""
    return _integrate(surface, triangle, "K", tol)


def absolute_curvature_integral(surface: Surface, triangle: GeodesicTriangle, tol: float = QUAD_TOL) -> float:
    return _integrate(surface, triangle, "absK", tol)


def triangle_area(surface: Surface, triangle: GeodesicTriangle, tol: float = QUAD_TOL) -> float:
    return _integrate(surface, triangle, "area", tol)


def angle_excess(surface: Surface, triangle: GeodesicTriangle) -> float:
    return sum(triangle.angles) - math.pi


def gauss_bonnet_residual(surface: Surface, triangle: GeodesicTriangle) -> float:
    """|∬ K dS - angle excess|; small values certify the whole pipeline on this triangle."""
    return abs(curvature_integral(surface, triangle) - angle_excess(surface, triangle))
