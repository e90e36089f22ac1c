"""Exception types raised across the package."""


class CropFoldError(Exception):
    """Base class for all cropfold errors."""


class ParameterError(CropFoldError, ValueError):
    """An argument violates an operation's precondition."""


class ValidationError(CropFoldError, ValueError):
    """An input array or value fails invariant checks; names the offending field."""


class ShapeMismatchError(CropFoldError, ValueError):
    """Two images that must share a shape do not."""


class RawFormatError(CropFoldError, ValueError):
    """A raw tensor byte stream violates the file format."""


class UnsupportedVersionError(RawFormatError):
    """A raw tensor file declares a version this implementation cannot read."""


class TruncatedFileError(RawFormatError):
    """A raw tensor file ends before its declared payload."""


class DataRangeError(RawFormatError):
    """A raw tensor payload value is non-finite or outside [0, 1]."""


class RawIOError(CropFoldError, IOError):
    """An underlying I/O failure while reading or writing a raw tensor."""


class ConfigError(CropFoldError, ValueError):
    """A configuration document or mapping is invalid."""


class ReplayError(CropFoldError, ValueError):
    """A recorded plan is inconsistent with the config or source it is replayed against."""


class DecodeError(CropFoldError, ValueError):
    """An image file could not be decoded; names the path."""
