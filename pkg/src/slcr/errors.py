"""Exception types shared across the package."""


class SlcrError(Exception):
    """Base class for all package-specific errors."""


class InvalidShapeError(SlcrError):
    """Domain shape parameters are degenerate (non-positive extents or radius)."""


class ResolutionError(SlcrError):
    """Grid resolution below the supported minimum."""


class UndefinedDerivativeError(SlcrError):
    """Derivative queried on the set where the family is not differentiable."""


class NonPositiveScaleError(SlcrError):
    """Scaling parameter t of a homogeneity check must be positive."""


class PathDependenceError(SlcrError):
    """Loop integrals of v dx + u dy exceed tolerance; input is not a solution."""


class NonInjectiveMapError(SlcrError):
    """The planar map (x, y) -> (u, v) folds or its Jacobian degenerates."""


class IdenticalPairsError(SlcrError):
    """Zero search requested for two solution pairs that coincide."""


class ZeroOnLoopError(SlcrError):
    """A winding-number loop sample hits the origin."""


class InadequateSamplingError(SlcrError):
    """Consecutive winding-number samples subtend an angle >= pi."""


class ZeroClusterError(SlcrError):
    """Two candidate zeros closer than the resolvable limit."""


class IllConditionedFitError(SlcrError):
    """Least-squares ring fit of the local zero model is degenerate."""


class NotMorseError(SlcrError):
    """Boundary data fails the Morse classification required by the audit."""


class NotTransverseError(SlcrError):
    """Boundary data fails the transverse classification required by the audit."""


class ZeroDerivativeDataError(SlcrError):
    """Derivative data (p0, q0) = (0, 0) is excluded from the transform."""


class ZeroARejectedError(SlcrError):
    """The fibre parameter a must be nonzero for this operation."""


class UndefinedCoefficientError(SlcrError):
    """The flux coefficient is undefined at y = a = 0."""


class SingularFibreError(SlcrError):
    """Lift requested at a point with z1 = 0, where the circle fibre collapses."""
