"""Angle-division dynamics on geodesic triangles of parametric surfaces."""

from .classifier import (PointType, RunTemplate, classify_via_limits, corollary_divisions, corollary_p,
                         corollary_q, cross_validate)
from .errors import (ChartBoundaryExceeded, DegenerateMetric, DivisionDomain, EndpointHit, GeometryError,
                     InconclusiveClassification, InvalidParameter, NoConvergence, NoIntersection,
                     NonSimplePolygon, OutOfDomain, TangentialIntersection, ZeroVector)
from .gallery import GALLERY, make_surface
from .gaussbonnet import (GeodesicTriangle, angle_excess, curvature_integral, gauss_bonnet_residual,
                          triangle_area)
from .geodesic import (GeodesicPath, TangentVector, angle_between, connect, exp_map, integrate,
                       rotate_tangent)
from .intersection import first_intersection, shoot
from .scheme import (DivisionFunctions, IterationTrace, LimitPair, TriangleConfig, contraction_diagnostics,
                     plane_oracle, run, theoretical_limits, verify_recurrence)
from .surface import PointKind, Surface

__version__ = "0.1.0"
