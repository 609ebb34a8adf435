"""Exception types shared across the package."""


class GnetError(Exception):
    """Base class for all library errors."""


# -- surface / chart errors ------------------------------------------------

class OutOfChart(GnetError):
    """Coordinates outside the valid domain of the surface chart."""


class CoincidentPoints(GnetError):
    pass


class AntipodalPoints(GnetError):
    """Spherical chart forbids antipodal pairs (geodesic not unique)."""


class MismatchedSurface(GnetError):
    """Operands live on different surface models."""


class MismatchedBasePoint(GnetError):
    """Tangent directions compared at different base points."""


class SelfIntersectingPolygon(GnetError):
    pass


class UnsupportedSurface(GnetError):
    """Operation not defined on this surface model."""


# -- net errors --------------------------------------------------------------

class NetInvariantViolated(GnetError):
    def __init__(self, which, detail=""):
        self.which = which
        super().__init__(f"{which}: {detail}" if detail else which)


class NetDegenerate(GnetError):
    """Two incident edges share a tangent direction at a vertex."""


class UnknownVertex(GnetError):
    pass


class DegreeTooSmall(GnetError):
    pass


# -- walk errors -------------------------------------------------------------

class NonAdjacentEdges(GnetError):
    pass


class NotClosed(GnetError):
    pass


class NotEssentiallySimple(GnetError):
    pass


class AmbiguousReversal(GnetError):
    """Turn angle of +/-180 degrees outside a declared backtrack."""


class PreconditionViolated(GnetError):
    def __init__(self, clause, detail=""):
        self.clause = clause
        super().__init__(f"{clause}: {detail}" if detail else clause)


class ConditionsNotMet(GnetError):
    """Path-independence hypotheses failed; .clauses lists the offenders."""

    def __init__(self, clauses):
        self.clauses = list(clauses)
        super().__init__("conditions not met: " + ", ".join(self.clauses))


# -- staircase ---------------------------------------------------------------

class StartOutsideRegion(GnetError):
    pass


# -- relaxation --------------------------------------------------------------

class Degenerated(GnetError):
    def __init__(self, reason):
        self.reason = reason
        super().__init__(reason)


class MaxItersExceeded(GnetError):
    pass


class VertexCollision(GnetError):
    pass


class CollinearInput(GnetError):
    pass


class NoFermatPoint(GnetError):
    pass


# -- constructions -----------------------------------------------------------

class ParamConstraintViolated(GnetError):
    def __init__(self, which, detail=""):
        self.which = which
        super().__init__(f"{which}: {detail}" if detail else which)


class BisectionNoSignChange(GnetError):
    pass


# -- file format -------------------------------------------------------------

class SchemaError(GnetError):
    def __init__(self, field, reason):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")
