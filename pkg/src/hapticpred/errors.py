"""Exception hierarchy shared by all pipeline stages."""


class HapticError(Exception):
    """Base class for every error raised by this package."""

    #: process exit code used by the command-line interface
    exit_code = 3


class ConfigError(HapticError, ValueError):
    exit_code = 2


class ArgError(HapticError, ValueError):
    exit_code = 2


class ShapeError(HapticError, ValueError):
    pass


class IngestError(HapticError):
    pass


class CropError(HapticError, ValueError):
    pass


class FilterError(HapticError, ValueError):
    pass


class NormalError(HapticError, ValueError):
    pass


class SegmentError(HapticError, ValueError):
    pass


class SequenceError(HapticError, ValueError):
    pass


class GlcmError(HapticError, ValueError):
    pass


class FormatError(HapticError):
    pass


class AggregateError(HapticError):
    pass


class ManifestError(HapticError):
    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path


class TrainingAbort(HapticError):
    exit_code = 4

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch
