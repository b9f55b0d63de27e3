"""Exception hierarchy.

Everything raised on bad input derives from :class:`DataError` so the CLI can
map it to a single exit code.
"""


class BmsInferError(Exception):
    """Base class for all package errors."""


class DataError(BmsInferError, ValueError):
    """Input data violates a precondition."""


# ingest
class EmptyFile(DataError):
    pass


class MalformedHeader(DataError):
    pass


class AllMissing(DataError):
    pass


class NoFiles(DataError):
    pass


# features
class TooShort(DataError):
    pass


class SeriesTooShort(TooShort):
    pass


class WindowTooShort(TooShort):
    pass


class DegenerateTrajectory(DataError):
    pass


class BadDimension(DataError):
    pass


class ZeroVector(DataError):
    pass


class LengthMismatch(DataError):
    pass


class EmptyLabel(DataError):
    pass


# linalg / clustering
class NoConvergence(BmsInferError, ArithmeticError):
    pass


class BadK(DataError):
    pass


# classification
class SingleClass(DataError):
    pass


class EmptyData(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class ClassTooSmall(DataError):
    pass


class EmptyGrid(DataError):
    pass


# evaluation / experiment
class LabelOutOfRange(DataError):
    pass


class EmptyMatrix(DataError):
    pass


class TooFewSamples(DataError):
    pass


class BadSpec(DataError):
    pass
