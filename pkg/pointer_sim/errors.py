"""
Error hierarchy for the pointer-state simulator.

Every error carries the process exit code the CLI reports for it and,
for physics errors, a remediation hint shown to the user.
"""


class PointerSimError(Exception):
    """Base class for all simulator errors."""

    exit_code = 1

    def __init__(self, message, hint=None):
        super().__init__(message)
        self.hint = hint

    def __str__(self):
        message = super().__str__()
        if self.hint:
            return f"{message} (hint: {self.hint})"
        return message


# Validation errors (exit 2)

class ValidationFailure(PointerSimError):
    exit_code = 2


class InvalidState(ValidationFailure):
    """A system state is not normalized or has dimension < 2."""


class ShapeMismatch(ValidationFailure):
    """Operands disagree in dimension or live on different grids."""


class InvalidProjector(ValidationFailure):
    """A matrix failed the Hermiticity/idempotency/spectrum checks."""


class InvalidMatrix(ValidationFailure):
    """A matrix has non-finite entries."""


class InvalidGrid(ValidationFailure):
    """Grid parameters violate the grid invariants."""


class IncommensurateShift(ValidationFailure):
    """Roll mode was requested for a shift that is not a whole number of grid steps."""


class ScenarioError(ValidationFailure):
    """A scenario file could not be read or is inconsistent."""


# Physics errors (exit 3)

class PhysicsError(PointerSimError):
    exit_code = 3


class OrthogonalPostselection(PhysicsError):
    """The pre- and postselected states are (numerically) orthogonal."""

    def __init__(self, message, hint="choose a postselected state with non-zero overlap"):
        super().__init__(message, hint)


class NumericalDegeneracy(PhysicsError):
    """A closed-form quantity is undefined for the given inputs."""


class GridTooSmall(PhysicsError):
    """The pointer does not fit on the grid."""

    def __init__(self, message, hint="enlarge the grid bounds or reduce sigma"):
        super().__init__(message, hint)


class GridOverflow(PhysicsError):
    """A translation would push significant amplitude across the grid edge."""

    def __init__(self, message, hint="enlarge the grid or reduce |gamma|"):
        super().__init__(message, hint)


class PostselectionImpossible(PhysicsError):
    """Projection onto the postselected state leaves no amplitude."""

    def __init__(self, message, hint="the postselected state is orthogonal to the measured state"):
        super().__init__(message, hint)


class DegenerateOverlap(PhysicsError):
    """Two pointer states are too close to orthogonal to compare phases."""


# Tolerance breaches (exit 4)

class ToleranceBreach(PointerSimError):
    exit_code = 4
