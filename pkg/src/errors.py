"""Exception hierarchy shared by the pansharpening pipeline."""


class FGFGANError(Exception):
    """Base class for every error raised by this package."""


class ImageFormatError(FGFGANError):
    """Raised when an image file has a bad magic, header or container type."""


class TruncatedImageError(ImageFormatError):
    """Raised when an image payload does not match its header dimensions."""


class ShapeError(FGFGANError, ValueError):
    """Raised on any shape, channel or scale mismatch between tensors."""


class EmptyResultError(FGFGANError):
    """Raised when an operation would produce nothing (e.g. no patch fits)."""


class NonFiniteError(FGFGANError, FloatingPointError):
    """Raised when a gradient or loss stops being finite."""


class CheckpointError(FGFGANError):
    """Raised on malformed checkpoints or tensor mismatches on load."""


class DatasetError(FGFGANError):
    """Raised on missing or mismatched image pairs and split shortfalls."""


class ConfigError(FGFGANError):
    """Raised on unknown or unparsable configuration keys."""
