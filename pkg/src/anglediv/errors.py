"""Exception hierarchy shared by all modules."""


class GeometryError(Exception):
    """Base class for every failure raised by the library."""


class InvalidParameter(GeometryError, ValueError):
    pass


class OutOfDomain(GeometryError):
    pass


class DegenerateMetric(GeometryError):
    pass


class ChartBoundaryExceeded(GeometryError):
    pass


class ZeroVector(GeometryError):
    pass


class NoIntersection(GeometryError):
    pass


class TangentialIntersection(GeometryError):
    pass


class EndpointHit(GeometryError):
    pass


class DivisionDomain(GeometryError):
    pass


class NonSimplePolygon(GeometryError):
    pass


class NoConvergence(GeometryError):
    """Iteration limit reached; ``trace`` holds whatever was computed."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class InconclusiveClassification(GeometryError):
    def __init__(self, message, limit_pair=None):
        super().__init__(message)
        self.limit_pair = limit_pair
