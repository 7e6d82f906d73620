"""Exception types shared across the package."""


class BergsplitError(Exception):
    """Base class for all package-specific failures."""


class UnsupportedGeometry(BergsplitError):
    """The requested operation has no closed-form/geometric handling for this domain."""


class NotConvex(BergsplitError):
    """Vertex list does not describe a convex counterclockwise polygon."""


class EmptyRegion(BergsplitError):
    """A half-plane intersection turned out to be empty."""


class PoleDomainMismatch(BergsplitError):
    """Kernel pole does not lie in the open domain."""


class OpeningOutOfRange(BergsplitError):
    """Half planes do not bound a sector with opening in (0, pi)."""


class NotSeparated(BergsplitError):
    """The two domain differences are not at positive distance."""


class NoExteriorPoint(BergsplitError):
    """No point at positive distance from the (unbounded) union could be found."""


class BasePointOutsideDomain(BergsplitError):
    """Antiderivative base point must lie inside the declared domain."""


class NoConvergence(BergsplitError):
    """Adaptive quadrature exhausted its budget before reaching the tolerance."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class DivergentNorm(BergsplitError):
    """Norm integrals keep growing as the truncation radius doubles."""


class BranchCutViolation(BergsplitError):
    """A conformal power map was evaluated outside its branch of analyticity."""


class CompressionError(BergsplitError):
    """Rational compression of an evaluator failed validation."""


class DivergesOnSquare(BergsplitError):
    """Mode coefficients grow too fast for the series to converge on the square."""


class NotUnbounded(BergsplitError):
    """Operation requires an unbounded region."""
