"""Exception types raised across the package."""


class FenchelYoungError(Exception):
    """Base class for all package-specific errors."""


class NoConvergence(FenchelYoungError, RuntimeError):
    """An iterative solver hit its iteration budget before its tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class BoundaryGradient(FenchelYoungError, ValueError):
    """Gradient requested on the simplex boundary of an essentially smooth entropy."""


class TargetOutsideDomain(FenchelYoungError, ValueError):
    """A target vector does not lie in the domain of the regularizer."""


class InvalidStructure(FenchelYoungError, ValueError):
    """A structure vector is not a vertex of the polytope it claims to be."""


class UnequalNorms(FenchelYoungError, ValueError):
    """Structured margin check on a vertex set that is not on a common sphere."""


class InfeasibleDual(FenchelYoungError, ValueError):
    """A dual iterate left the domain of the output regularizer."""
