"""Exception hierarchy shared by the algebra, geometry and dynamics modules."""


class PGAError(ValueError):
    """Base class for every error raised by this package."""


class AlgebraMismatchError(PGAError):
    """Operands belong to different algebras."""


class GradeError(PGAError):
    """A grade index or an element's grade is not the one required."""


class DependentArgumentsError(PGAError):
    """A construction degenerated to zero (coincident points, identical lines, ...)."""


class NotNormalizedError(PGAError):
    """An argument that must be normalized is not."""


class IdealElementError(PGAError):
    """A euclidean element was required but an ideal one was given."""


class PreconditionError(PGAError):
    """A formula-specific precondition does not hold."""


class DegeneratePencilError(PGAError):
    """A common normal was requested for parallel lines."""


class BranchError(PGAError):
    """The logarithm is ambiguous (rotation by pi)."""


class SingularInertiaError(PGAError):
    """The inertia map cannot be inverted on the excited directions."""


class IntegrationError(PGAError):
    """The integrator produced a non-finite state."""


class ExpressionError(PGAError):
    """An expression string could not be parsed or uses unsupported syntax."""


class DualDomainError(PGAError):
    """An analytic function was evaluated outside its real domain."""

    def __init__(self, message: str, value: float):
        super().__init__(f"{message} (value={value!r})")
        self.value = value
