"""Exception hierarchy shared by every module."""


class NuChernError(Exception):
    pass


class DuplicateName(NuChernError):
    pass


class RegistryMismatch(NuChernError):
    pass


class NonInvertibleBody(NuChernError, ZeroDivisionError):
    pass


class UndefinedNu(NuChernError):
    pass


class UnresolvableNu(UndefinedNu):
    pass


class ParityMismatch(NuChernError):
    pass


class PoleAtPoint(NuChernError, ZeroDivisionError):
    pass


class BranchCut(NuChernError, ValueError):
    pass


class ZeroBody(NuChernError, ValueError):
    pass


class DimensionMismatch(NuChernError, ValueError):
    pass


class NonInvertibleBlock(NonInvertibleBody):
    pass


class BadDimensions(NuChernError, ValueError):
    pass


class IndexOutOfRange(NuChernError, IndexError):
    pass


class BadCount(NuChernError, ValueError):
    pass


class TruncationOverflow(NuChernError):
    pass


class SnapError(NuChernError, ValueError):
    """A numeric kernel value was too far from a half-integer to snap."""


class BadConfig(NuChernError, ValueError):
    pass


class ParseError(NuChernError, ValueError):
    pass
