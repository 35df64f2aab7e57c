"""Exception hierarchy shared by every stage of the pipeline."""


class CacheboundError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDemand(CacheboundError):
    pass


class DuplicateDemand(CacheboundError):
    pass


class UniverseTooLarge(CacheboundError):
    pass


class ImageOutsideUniverse(CacheboundError):
    pass


class NumericOverflow(CacheboundError):
    pass


class NotOptimal(CacheboundError):
    pass


class EmptyRegion(CacheboundError):
    pass


class LinearizationFailed(CacheboundError):
    pass


class DocumentError(CacheboundError):
    """A certificate or model document is malformed."""


class ParseError(CacheboundError):
    """A user-supplied string (rational, inequality, term) does not parse."""
