"""Exception hierarchy shared by every module."""


class DQDError(Exception):
    """Base class for all errors raised by dqdnoise."""


class InvalidParameter(DQDError, ValueError):
    pass


class DegenerateNormalizer(DQDError, ArithmeticError):
    """Closed-form eigenvectors are singular (V = 0 and N+ or N- = 0)."""


class BoltzmannOverflow(DQDError, OverflowError):
    pass


class NotAState(DQDError, ValueError):
    """Matrix is not Hermitian, unit-trace and positive semidefinite."""


class NotCPTP(DQDError, ValueError):
    """Kraus set fails the completeness relation sum K^dag K = I."""


class ComplexEigenvalue(DQDError, ArithmeticError):
    """Closed-form R-matrix eigenvalue left the real non-negative axis."""


class InvalidSampleCount(DQDError, ValueError):
    pass


class SpecError(DQDError, ValueError):
    """Sweep specification violates its invariants."""


class ParseError(DQDError, ValueError):
    """Config file is malformed; message names the offending field."""


class UnknownPreset(DQDError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown preset"
