"""Exception hierarchy shared by all modules.

InputError subclasses signal malformed or contract-violating inputs and map to
CLI exit code 2; NumericalAbort signals a computation that had to stop (state
blow-up, overflow) and maps to exit code 3.
"""


class ToolkitError(Exception):
    pass


class InputError(ToolkitError):
    """Bad input: parsing, shape, or precondition failure."""


class ParseError(InputError):
    pass


class ShapeError(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class OrderOutOfRange(InputError):
    pass


class RankOutOfRange(InputError):
    pass


class NotInV(InputError):
    pass


class NonpositiveScale(InputError):
    pass


class NonpositiveParameter(InputError):
    pass


class SingularMatrix(InputError):
    pass


class StepTooLarge(InputError):
    pass


class ZeroInitialCondition(InputError):
    pass


class NotMetzler(InputError):
    pass


class OutOfUnitCube(InputError):
    pass


class InadmissibleState(InputError):
    pass


class NumericalAbort(ToolkitError):
    """The computation was stopped because its numbers are no longer meaningful."""
