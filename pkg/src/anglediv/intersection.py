"""First transversal crossing of a shot geodesic with a target geodesic segment.

Crossings are located in chart space: a vectorized segment-segment test over
the two polylines finds the bracketing cells, then the crossing is refined on
the true curves with Brent's bracketed root finder applied to the signed
distance of the shot point from the target curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.optimize import brentq

from .errors import EndpointHit, NoIntersection, TangentialIntersection
from .geodesic import GeodesicPath, GeodesicSegment, TangentVector, angle_between, integrate_states, _normalized
from .surface import Surface

ANGLE_FLOOR = 1e-6
ENDPOINT_TOL = 1e-9
CHUNK_STEPS = 200


@dataclass(frozen=True)
class IntersectionResult:
    s_shot: float
    t_target: float
    point: tuple
    crossing_angle: float
    shot_state: tuple
    target_state: tuple


def _as_path(target: Union[GeodesicPath, GeodesicSegment]) -> GeodesicPath:
    return target.path if isinstance(target, GeodesicSegment) else target


def crossing_cells(shot_xy: np.ndarray, target_xy: np.ndarray, first: int = 0):
    """Earliest chord crossing between two polylines.

    Returns ``(i, j, lam, mu)`` meaning shot cell ``i`` (between rows ``i`` and
    ``i + 1``) meets target cell ``j`` at chord fractions ``lam`` and ``mu``,
    or ``None``.  Only shot cells ``>= first`` are examined.
    """
    a = shot_xy[first:-1]
    b = shot_xy[first + 1:]
    c = target_xy[:-1]
    d = target_xy[1:]
    if len(a) == 0 or len(c) == 0:
        return None
    lo = target_xy.min(axis=0)
    hi = target_xy.max(axis=0)
    slack = 1e-12 * (1.0 + np.abs(hi - lo).max())
    keep = np.nonzero(
        (np.minimum(a, b) <= hi + slack).all(axis=1) & (np.maximum(a, b) >= lo - slack).all(axis=1)
    )[0]
    if len(keep) == 0:
        return None
    a, b = a[keep], b[keep]
    r = (b - a)[:, None, :]
    s = (d - c)[None, :, :]
    ca = c[None, :, :] - a[:, None, :]
    denom = r[..., 0] * s[..., 1] - r[..., 1] * s[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = (ca[..., 0] * s[..., 1] - ca[..., 1] * s[..., 0]) / denom
        mu = (ca[..., 0] * r[..., 1] - ca[..., 1] * r[..., 0]) / denom
    hit = (denom != 0) & (lam >= 0) & (lam <= 1) & (mu >= 0) & (mu <= 1)
    rows, cols = np.nonzero(hit)
    if len(rows) == 0:
        return None
    order = np.lexsort((lam[rows, cols], rows))
    k = order[0]
    i, j = int(rows[k]), int(cols[k])
    return int(keep[i]) + first, j, float(lam[i, j]), float(mu[i, j])


class _SideFunction:
    """Signed chart distance of ``shot(s)`` from the target curve, with the foot point kept warm."""

    def __init__(self, shot: GeodesicPath, target: GeodesicPath, t_guess: float):
        self.shot = shot
        self.target = target
        self.t = t_guess

    def foot(self, x, y):
        t = self.t
        for _ in range(40):
            tu, tv, tdu, tdv = self.target.state_at(t)
            dt = (tdu * (x - tu) + tdv * (y - tv)) / (tdu * tdu + tdv * tdv)
            t += dt
            if abs(dt) <= 1e-13 * abs(t) or dt == 0.0:
                break
        self.t = t
        return t, self.target.state_at(t)

    def __call__(self, s):
        x, y, _, _ = self.shot.state_at(s)
        _, (tu, tv, tdu, tdv) = self.foot(x, y)
        return (tdu * (y - tv) - tdv * (x - tu)) / math.hypot(tdu, tdv)


def _refine(shot: GeodesicPath, target: GeodesicPath, i, j, lam, mu):
    snodes = shot.states[:, 0]
    tnodes = target.states[:, 0]
    t_guess = tnodes[j] + mu * (tnodes[j + 1] - tnodes[j])
    side = _SideFunction(shot, target, t_guess)
    lo, hi = i, i + 1
    f_lo, f_hi = side(snodes[lo]), side(snodes[hi])
    # chord and curve can disagree near cell ends; widen the bracket by a cell at a time
    for _ in range(3):
        if f_lo == 0.0 or f_hi == 0.0 or (f_lo < 0) != (f_hi < 0):
            break
        side.t = t_guess
        if lo > 0:
            lo -= 1
            f_lo = side(snodes[lo])
        if hi < len(snodes) - 1:
            hi += 1
            f_hi = side(snodes[hi])
    else:
        if not (f_lo == 0.0 or f_hi == 0.0 or (f_lo < 0) != (f_hi < 0)):
            return None
    if f_lo == 0.0:
        s = float(snodes[lo])
    elif f_hi == 0.0:
        s = float(snodes[hi])
    else:
        width = snodes[hi] - snodes[lo]
        side.t = t_guess
        s = brentq(side, snodes[lo], snodes[hi], xtol=max(1e-15 * width, 1e-300), rtol=9e-16, maxiter=200)
    x, y, du, dv = shot.state_at(s)
    t, tstate = side.foot(x, y)
    return float(s), float(t), (x, y, du, dv), tstate


def first_intersection(surface: Surface, shot: GeodesicPath, target: Union[GeodesicPath, GeodesicSegment],
                       angle_floor: float = ANGLE_FLOOR, endpoint_tol: float = ENDPOINT_TOL,
                       first_cell: int = 0) -> IntersectionResult:
    """Earliest crossing (in shot arc length) of ``shot`` with ``target``.

    ``endpoint_tol`` is relative to the target length, so the test keeps its
    meaning on the shrinking triangles of a long iteration.

    Raises:
        NoIntersection: the shot polyline never crosses the target.
        TangentialIntersection: crossing angle within ``angle_floor`` of 0 or pi.
        EndpointHit: the crossing sits on a target endpoint.
    """
    tpath = _as_path(target)
    start = first_cell
    while True:
        cell = crossing_cells(shot.positions, tpath.positions, start)
        if cell is None:
            raise NoIntersection(f"shot of length {shot.total_length:.6g} does not cross the target")
        refined = _refine(shot, tpath, *cell)
        if refined is not None:
            break
        start = cell[0] + 1
    s, t, xs, ts = refined
    L = tpath.total_length
    if t <= endpoint_tol * L or t >= (1.0 - endpoint_tol) * L:
        raise EndpointHit(f"crossing at t={t:.6g} is on an endpoint of a target of length {L:.6g}")
    angle = angle_between(surface, xs[:2], xs[2:], ts[2:])
    if angle < angle_floor or angle > math.pi - angle_floor:
        raise TangentialIntersection(f"crossing angle {angle:.3g} below transversality floor")
    return IntersectionResult(s_shot=s, t_target=t, point=(xs[0], xs[1]), crossing_angle=angle,
                              shot_state=xs, target_state=ts)


def shoot(surface: Surface, start, direction, target: Union[GeodesicPath, GeodesicSegment], step_h: float,
          max_length: float, chunk_steps: int = CHUNK_STEPS, first_chunk: Optional[float] = None,
          angle_floor: float = ANGLE_FLOOR, endpoint_tol: float = ENDPOINT_TOL):
    """Integrate from ``start`` in chunks until the geodesic crosses ``target``.

    The first chunk may be capped at ``first_chunk`` arc length; later chunks
    are ``chunk_steps`` steps long, up to ``max_length`` in total.

    Returns:
        ``(IntersectionResult, path)`` where ``path`` runs from ``start`` to the
        crossing point.
    """
    du, dv = _normalized(surface, start, direction)
    states = [(0.0, float(start[0]), float(start[1]), du, dv)]
    tpath = _as_path(target)
    scanned = 0
    done = 0.0
    chunk = chunk_steps * step_h
    if first_chunk is not None:
        chunk = min(chunk, first_chunk)
    while done < max_length:
        length = min(chunk, max_length - done)
        new = integrate_states(surface, states[-1][1:], done, length, step_h, stop_at_boundary=True)
        states.extend(new)
        path = GeodesicPath(surface, states, step_h)
        try:
            hit = first_intersection(surface, path, tpath, angle_floor, endpoint_tol, first_cell=scanned)
        except NoIntersection:
            hit = None
        if hit is not None:
            return hit, path.truncated(hit.s_shot)
        if len(new) == 0 or new[-1][0] < done + length:
            break
        scanned = len(states) - 1
        done = states[-1][0]
        chunk = chunk_steps * step_h
    raise NoIntersection(f"geodesic from {start} did not reach the target within length {max_length:.6g}")
