"""Exception hierarchy.  Everything raised on bad input derives from ``QRNGError``."""


class QRNGError(ValueError):
    pass


class NotHermitian(QRNGError):
    pass


class NoConvergence(QRNGError, ArithmeticError):
    pass


class InvalidDensity(QRNGError):
    pass


class TraceError(InvalidDensity):
    pass


class PositivityError(InvalidDensity):
    pass


class DomainError(QRNGError):
    pass


class InvalidDistribution(QRNGError):
    pass


class InvalidParams(QRNGError):
    pass


class MissingState(QRNGError):
    pass


class DegenerateBin(QRNGError):
    pass


class InconsistentModel(QRNGError):
    pass


class InsufficientBins(QRNGError):
    pass


class CutoffTooSmall(QRNGError):
    pass


class UnboundedEntropyFlag(QRNGError):
    pass


class SeedLengthMismatch(QRNGError):
    pass
