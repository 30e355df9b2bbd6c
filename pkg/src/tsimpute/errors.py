"""Exception types.

Everything raised on bad input derives from :class:`DataError`; the CLI maps
it to exit status 2.
"""


class DataError(ValueError):
    pass


class NonDivisorPeriod(DataError):
    pass


class PeriodExceedsLength(DataError):
    pass


class PreexistingMissing(DataError):
    pass


class RateOutOfRange(DataError):
    pass


class EmptyTrainingSet(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class AllMissing(DataError):
    pass


class SingleColumn(DataError):
    pass


class MissingPeriod(DataError):
    pass


class UnexpectedPeriod(DataError):
    pass


class SingleClass(DataError):
    pass


class MulticlassUnsupported(DataError):
    pass


class KTooLarge(DataError):
    pass


class ClassTooSmall(DataError):
    pass


class EmptyMask(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class LengthMismatch(DataError):
    pass


class MissingFile(DataError):
    pass


class MalformedCsv(DataError):
    pass


class NonFiniteValue(DataError):
    pass


class InconsistentChannelCount(DataError):
    pass
