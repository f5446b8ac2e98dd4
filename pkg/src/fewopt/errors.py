"""Exception hierarchy shared across the package."""


class FewoptError(ValueError):
    """Base class for every error raised by fewopt."""


class ZeroCoefficientError(FewoptError):
    pass


class DuplicateExponentError(FewoptError):
    pass


class DimensionMismatchError(FewoptError):
    pass


class SubsetBudgetExceededError(FewoptError):
    pass


class NonpositiveCoordinateError(FewoptError):
    pass


class NonpositiveBaseError(FewoptError):
    pass


class SingularMatrixError(FewoptError):
    pass


class SingularMapError(FewoptError):
    pass


class NotInClassError(FewoptError):
    """Input lies outside the fewnomial class an operation supports."""


class PrecisionExhaustedError(FewoptError, ArithmeticError):
    """A sign could not be certified before the precision cap was reached."""

    def __init__(self, message, bits=None):
        super().__init__(message)
        self.bits = bits


class SignPreconditionViolatedError(FewoptError):
    pass


class DegreeNotFourError(FewoptError):
    pass


class ExhaustedAttemptsError(FewoptError, RuntimeError):
    pass


class ParseError(FewoptError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position
