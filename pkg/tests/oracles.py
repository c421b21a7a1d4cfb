"""Independent reference computations used by the tests.

Nothing here imports the package: curvature comes from symbolic
differentiation of the chart, spherical triangles from classical spherical
trigonometry and the plane iteration from the affine recurrence.
"""

import math

import numpy as np
import sympy as sp
from scipy.linalg import eigh

U, V = sp.symbols("u v", real=True)


def _charts():
    su, cu, sv, cv = sp.sin(U), sp.cos(U), sp.sin(V), sp.cos(V)
    R, r = 2, 1
    return {
        "plane": sp.Matrix([U, V, 0]),
        "sphere": sp.Matrix([su * cv, su * sv, cu]),
        "cylinder": sp.Matrix([cu, su, V]),
        "torus": sp.Matrix([(R + r * cu) * cv, (R + r * cu) * sv, r * su]),
        "saddle": sp.Matrix([U, V, U ** 2 - V ** 2]),
        "ellipsoid": sp.Matrix([2 * su * cv, sp.Rational(3, 2) * su * sv, cu]),
        "monkey-saddle": sp.Matrix([U, V, U ** 3 - 3 * U * V ** 2]),
    }


# sampling boxes kept away from the chart edges and the polar caps
SAMPLE_BOXES = {
    "plane": ((-5.0, 5.0), (-5.0, 5.0)),
    "sphere": ((0.3, math.pi - 0.3), (-3.0, 3.0)),
    "cylinder": ((-1.4, 4.5), (-5.0, 5.0)),
    "torus": ((-1.4, 4.5), (-3.0, 3.0)),
    "saddle": ((-1.5, 1.5), (-1.5, 1.5)),
    "ellipsoid": ((0.3, math.pi - 0.3), (-3.0, 3.0)),
    "monkey-saddle": ((-1.5, 1.5), (-1.5, 1.5)),
}


def _symbolic_curvature(chart):
    ru, rv = chart.diff(U), chart.diff(V)
    n = ru.cross(rv)
    E, F, G = ru.dot(ru), ru.dot(rv), rv.dot(rv)
    norm = sp.sqrt(n.dot(n))
    L = chart.diff(U, 2).dot(n) / norm
    M = chart.diff(U, V).dot(n) / norm
    N = chart.diff(V, 2).dot(n) / norm
    gam = _symbolic_christoffel(E, F, G)
    return sp.lambdify((U, V), [E, F, G, L, M, N], "numpy"), sp.lambdify((U, V), gam, "numpy")


def _symbolic_christoffel(E, F, G):
    g = sp.Matrix([[E, F], [F, G]])
    ginv = g.inv()
    x = (U, V)
    out = []
    for i in range(2):
        for j, k in ((0, 0), (0, 1), (1, 1)):
            out.append(sum(ginv[i, l] * (sp.diff(g[l, j], x[k]) + sp.diff(g[l, k], x[j]) - sp.diff(g[j, k], x[l]))
                           for l in range(2)) / 2)
    return out


_CACHE = {}


def curvature_oracle(surface_id):
    """``f(u, v) -> (K, H, k_big, k_small)`` and ``gamma(u, v)`` for a default-shaped gallery surface."""
    if surface_id not in _CACHE:
        _CACHE[surface_id] = _symbolic_curvature(_charts()[surface_id])
    forms, gam = _CACHE[surface_id]

    def curv(u, v):
        E, F, G, L, M, N = (float(x) for x in forms(u, v))
        k = eigh(np.array([[L, M], [M, N]]), np.array([[E, F], [F, G]]), eigvals_only=True)
        K = (L * N - M * M) / (E * G - F * F)
        return K, 0.5 * (k[0] + k[1]), k[1], k[0]

    def christoffel(u, v):
        return np.array([float(x) for x in gam(u, v)])

    return curv, christoffel


def lhuilier_excess(a, b, c):
    """Spherical excess of a unit-sphere triangle from its side lengths."""
    s = 0.5 * (a + b + c)
    t = math.tan(s / 2) * math.tan((s - a) / 2) * math.tan((s - b) / 2) * math.tan((s - c) / 2)
    return 4.0 * math.atan(math.sqrt(max(t, 0.0)))


def sphere_xyz(u, v):
    return np.array([math.sin(u) * math.cos(v), math.sin(u) * math.sin(v), math.cos(u)])


def great_circle_distance(p, q):
    a, b = sphere_xyz(*p), sphere_xyz(*q)
    return math.atan2(np.linalg.norm(np.cross(a, b)), float(a @ b))


def great_circle_point(p, w, s):
    """Point at arc length ``s`` from chart point ``p`` along chart direction ``w`` on the unit sphere."""
    u, v = p
    x = sphere_xyz(u, v)
    eu = np.array([math.cos(u) * math.cos(v), math.cos(u) * math.sin(v), -math.sin(u)])
    ev = np.array([-math.sin(u) * math.sin(v), math.sin(u) * math.cos(v), 0.0])
    t = w[0] * eu + w[1] * ev
    t /= np.linalg.norm(t)
    y = math.cos(s) * x + math.sin(s) * t
    return math.acos(max(-1.0, min(1.0, y[2]))), math.atan2(y[1], y[0])


def plane_affine(p, q, mu, alpha1, n):
    """Plane iteration written directly from the triangle angle sums.

    In triangle V B_k A_k the angles are mu, alpha_k and the raw angle at
    B_k; in triangle V A_{k+1} B_k they are mu, beta_k and the raw angle at
    A_{k+1}.
    """
    alphas, betas = [], []
    a = alpha1
    for _ in range(n):
        raw_b = math.pi - mu - a
        b = raw_b / (1 + q)
        alphas.append(a)
        betas.append(b)
        raw_a = math.pi - mu - b
        a = raw_a / (1 + p)
    return np.array(alphas), np.array(betas)
