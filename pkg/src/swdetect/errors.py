"""Exception hierarchy shared by every stage of the detector."""


class SwdError(Exception):
    """Base class; ``code`` is the stable name printed by the CLI."""

    @property
    def code(self) -> str:
        return type(self).__name__


# ingestion
class MalformedCsv(SwdError):
    pass


class InconsistentRate(SwdError):
    pass


class EmptyFile(SwdError):
    pass


class MalformedJson(SwdError):
    pass


class UnknownChannel(SwdError):
    pass


class OutOfRange(SwdError):
    pass


class BadLabel(SwdError):
    pass


class InvalidRecording(SwdError):
    pass


# segmentation / transform
class SignalTooShort(SwdError):
    pass


class BadBand(SwdError):
    pass


class GridRateMismatch(SwdError):
    pass


# estimation
class DegenerateData(SwdError):
    pass


class DegenerateCoefficients(DegenerateData):
    pass


class NoConvergence(SwdError):
    pass


# classification
class ZeroSpread(SwdError):
    pass


class EmptyModel(SwdError):
    pass


class SingleClass(SwdError):
    pass


class TooFewPoints(SwdError):
    pass


class TooFewAugment(SwdError):
    pass


class EmptyTestSet(SwdError):
    pass


class IncompatibleModel(SwdError):
    pass
