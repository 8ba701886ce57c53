"""Exception hierarchy shared by every module of the package."""


class HyperhybridError(Exception):
    """Base class for all errors raised by this package."""


class InvariantViolation(HyperhybridError):
    """An internal consistency check failed (maps to CLI exit code 2)."""


class DuplicateMode(HyperhybridError):
    pass


class UnknownMode(HyperhybridError):
    pass


class UnknownPath(HyperhybridError):
    pass


class BasisMismatch(HyperhybridError):
    pass


class NotUnitary(InvariantViolation):
    pass


class InvalidPair(HyperhybridError):
    pass


class WrongParticleNumber(HyperhybridError):
    pass


class NoCoincidences(InvariantViolation):
    pass


class ImpossibleEvent(HyperhybridError):
    pass


class CircuitSourceError(HyperhybridError):
    """A circuit document could not be turned into a circuit.

    Carries the 1-based ``line`` and ``col`` of the offending token and the
    source ``filename`` (``"<string>"`` when parsed from memory).
    """

    def __init__(self, message, line, col, filename="<string>"):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.filename = filename

    def __str__(self):
        return f"{self.filename}:{self.line}:{self.col}: {self.message}"


class CircuitSyntaxError(CircuitSourceError):
    pass


class CircuitSemanticError(CircuitSourceError):
    pass
