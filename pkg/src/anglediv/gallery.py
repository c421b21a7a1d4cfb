"""Built-in test surfaces with analytic chart jets.

Charts with coordinate singularities (sphere and ellipsoid poles, the
periodic seam of the cylinder and torus) are given rectangles that exclude
the singular locus, so every gallery surface is a single regular chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .surface import Surface

EDGE = 1e-3


def _plane_jet(u, v, xp):
    z = 0.0 * u + 0.0 * v
    one = z + 1.0
    zero = (z, z, z)
    return (u + z, v + z, z), (one, z, z), (z, one, z), zero, zero, zero


def _sphere_jet(radius):
    R = radius

    def jet(u, v, xp):
        su, cu, sv, cv = xp.sin(u), xp.cos(u), xp.sin(v), xp.cos(v)
        z = 0.0 * su * sv
        return (
            (R * su * cv, R * su * sv, R * cu),
            (R * cu * cv, R * cu * sv, -R * su),
            (-R * su * sv, R * su * cv, z),
            (-R * su * cv, -R * su * sv, -R * cu),
            (-R * cu * sv, R * cu * cv, z),
            (-R * su * cv, -R * su * sv, z),
        )

    return jet


def _cylinder_jet(radius):
    a = radius

    def jet(u, v, xp):
        su, cu = xp.sin(u), xp.cos(u)
        z = 0.0 * su + 0.0 * v
        zero = (z, z, z)
        return (
            (a * cu, a * su, v + z),
            (-a * su, a * cu, z),
            (z, z, z + 1.0),
            (-a * cu, -a * su, z),
            zero,
            zero,
        )

    return jet


def _torus_jet(R, r):
    def jet(u, v, xp):
        su, cu, sv, cv = xp.sin(u), xp.cos(u), xp.sin(v), xp.cos(v)
        w = R + r * cu
        z = 0.0 * su * sv
        return (
            (w * cv, w * sv, r * su),
            (-r * su * cv, -r * su * sv, r * cu),
            (-w * sv, w * cv, z),
            (-r * cu * cv, -r * cu * sv, -r * su),
            (r * su * sv, -r * su * cv, z),
            (-w * cv, -w * sv, z),
        )

    return jet


def _saddle_jet(u, v, xp):
    z = 0.0 * u + 0.0 * v
    return (
        (u + z, v + z, u * u - v * v),
        (z + 1.0, z, 2.0 * u + z),
        (z, z + 1.0, -2.0 * v + z),
        (z, z, z + 2.0),
        (z, z, z),
        (z, z, z - 2.0),
    )


def _monkey_saddle_jet(u, v, xp):
    z = 0.0 * u + 0.0 * v
    return (
        (u + z, v + z, u ** 3 - 3.0 * u * v * v),
        (z + 1.0, z, 3.0 * u * u - 3.0 * v * v),
        (z, z + 1.0, -6.0 * u * v),
        (z, z, 6.0 * u + z),
        (z, z, -6.0 * v + z),
        (z, z, -6.0 * u + z),
    )


def _ellipsoid_jet(a, b, c):
    def jet(u, v, xp):
        su, cu, sv, cv = xp.sin(u), xp.cos(u), xp.sin(v), xp.cos(v)
        z = 0.0 * su * sv
        return (
            (a * su * cv, b * su * sv, c * cu),
            (a * cu * cv, b * cu * sv, -c * su),
            (-a * su * sv, b * su * cv, z),
            (-a * su * cv, -b * su * sv, -c * cu),
            (-a * cu * sv, b * cu * cv, z),
            (-a * su * cv, -b * su * sv, z),
        )

    return jet


_POLAR = ((EDGE, math.pi - EDGE), (-math.pi + EDGE, math.pi - EDGE))
_SEAM = (-0.5 * math.pi + EDGE, 1.5 * math.pi - EDGE)


def plane() -> Surface:
    return Surface(((-10.0, 10.0), (-10.0, 10.0)), jet=_plane_jet, name="plane",
                   default_point=(0.0, 0.0), constant_metric=True)


def sphere(radius: float = 1.0) -> Surface:
    return Surface(_POLAR, jet=_sphere_jet(radius), name="sphere", params={"radius": radius},
                   default_point=(math.pi / 2, 0.0))


def cylinder(radius: float = 1.0) -> Surface:
    return Surface((_SEAM, (-10.0, 10.0)), jet=_cylinder_jet(radius), name="cylinder",
                   params={"radius": radius}, default_point=(0.0, 0.0), constant_metric=True)


def torus(R: float = 2.0, r: float = 1.0) -> Surface:
    if not R > r > 0:
        raise ValueError("torus needs R > r > 0")
    return Surface((_SEAM, (-math.pi + EDGE, math.pi - EDGE)), jet=_torus_jet(R, r), name="torus",
                   params={"R": R, "r": r}, default_point=(0.0, 0.0))


def saddle() -> Surface:
    return Surface(((-2.0, 2.0), (-2.0, 2.0)), jet=_saddle_jet, name="saddle",
                   default_point=(0.0, 0.0))


def ellipsoid(a: float = 2.0, b: float = 1.5, c: float = 1.0) -> Surface:
    return Surface(_POLAR, jet=_ellipsoid_jet(a, b, c), name="ellipsoid",
                   params={"a": a, "b": b, "c": c}, default_point=(math.pi / 2, 0.0))


def monkey_saddle() -> Surface:
    return Surface(((-2.0, 2.0), (-2.0, 2.0)), jet=_monkey_saddle_jet, name="monkey-saddle",
                   default_point=(0.0, 0.0))


@dataclass(frozen=True)
class GalleryEntry:
    factory: Callable[..., Surface]
    defaults: dict = field(default_factory=dict)
    character: str = ""


GALLERY = {
    "plane": GalleryEntry(plane, {}, "K = 0 everywhere"),
    "sphere": GalleryEntry(sphere, {"radius": 1.0}, "K = 1/radius^2 > 0 everywhere"),
    "cylinder": GalleryEntry(cylinder, {"radius": 1.0}, "K = 0 everywhere"),
    "torus": GalleryEntry(
        torus, {"R": 2.0, "r": 1.0},
        "K = cos u / (r (R + r cos u)): K > 0 for |u| < pi/2 (outer), K < 0 for pi/2 < u < 3pi/2 (inner)",
    ),
    "saddle": GalleryEntry(saddle, {}, "z = u^2 - v^2, K = -4/(1 + 4u^2 + 4v^2)^2 < 0 everywhere"),
    "ellipsoid": GalleryEntry(ellipsoid, {"a": 2.0, "b": 1.5, "c": 1.0}, "K > 0 everywhere"),
    "monkey-saddle": GalleryEntry(
        monkey_saddle, {}, "z = u^3 - 3uv^2, K < 0 except K = 0 at the planar point (0, 0)"
    ),
}


def make_surface(surface_id: str, **params) -> Surface:
    """Build a gallery surface by id; unknown parameter names raise ``ValueError``."""
    try:
        entry = GALLERY[surface_id]
    except KeyError:
        raise ValueError(f"unknown surface {surface_id!r}; choose from {', '.join(GALLERY)}") from None
    unknown = set(params) - set(entry.defaults)
    if unknown:
        raise ValueError(f"{surface_id} takes no parameter(s) {sorted(unknown)}")
    return entry.factory(**{**entry.defaults, **params})
