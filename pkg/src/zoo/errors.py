"""Exception hierarchy shared by every module."""


class ZooError(Exception):
    """Base class; ``exit_code`` is what the CLI returns when this escapes."""

    exit_code = 3


class DomainError(ZooError, ValueError):
    exit_code = 2


class ArgumentError(ZooError, ValueError):
    exit_code = 2


class RangeError(ZooError, ValueError):
    exit_code = 2


class BoundaryError(ZooError, ValueError):
    exit_code = 2


class TermCapExceeded(ZooError):
    pass


class ConvergenceError(ZooError):
    pass


class ResourceError(ZooError):
    pass


class ToleranceNotMet(ZooError):
    """Raised with the best available result attached as ``.result``."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class UnknownEntry(ZooError, KeyError):
    exit_code = 2


class ParamError(ZooError, ValueError):
    exit_code = 2


class ConfigError(ZooError, ValueError):
    exit_code = 2
