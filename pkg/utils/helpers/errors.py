__all__ = ['DataError', 'EmptyReportError', 'FrameEmptyError', 'MixedSessionError', 'MouseTrustError', 'NonFiniteError', 'NumericError', 'OutOfOrderEventError', 'ParseError', 'ShapeMismatchError', 'SingleClassError', 'StratificationError', 'TraceTooShortError', 'UnknownModelError', 'UnknownTargetError', 'UsageError']


# Base class. exit_code is what the management commands return when the error escapes a command.
class MouseTrustError(Exception):
    exit_code = 1


class UsageError(MouseTrustError):
    exit_code = 2


class DataError(MouseTrustError):
    exit_code = 3


class NumericError(MouseTrustError):
    exit_code = 4


#-----------------------------------------------------------------------------

class ParseError(DataError):
    def __init__(self, line_number, message):
        self.line_number = line_number
        self.message = message
        super().__init__(f'line {line_number}: {message}')


class TraceTooShortError(DataError):
    pass


class MixedSessionError(DataError):
    pass


class OutOfOrderEventError(DataError):
    pass


class FrameEmptyError(DataError):
    pass


class ShapeMismatchError(DataError):
    pass


class SingleClassError(DataError):
    pass


class StratificationError(DataError):
    pass


class EmptyReportError(DataError):
    pass


class UnknownTargetError(UsageError):
    pass


class UnknownModelError(UsageError):
    pass


# Raised when a loss, gradient or kinematic value stops being finite
class NonFiniteError(NumericError):
    pass
