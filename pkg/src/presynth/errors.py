"""Exception hierarchy shared by every module."""


class PresynthError(Exception):
    """Base class for all package errors."""


class WidthExceeded(PresynthError):
    pass


class DimMismatch(PresynthError):
    pass


class ParseError(PresynthError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class UnrepresentableGate(PresynthError):
    pass


class IndexOutOfRange(PresynthError):
    pass


class EqualIndices(PresynthError):
    pass


class SynthFailure(PresynthError):
    pass


class BudgetExhausted(SynthFailure):
    pass


class NumericalInstability(SynthFailure):
    pass


class NetTooCoarse(SynthFailure):
    pass


class MixedEndpoints(PresynthError):
    pass


class CeilingExceeded(PresynthError):
    pass


class InvalidAction(PresynthError):
    pass


class ConfigError(PresynthError):
    pass
