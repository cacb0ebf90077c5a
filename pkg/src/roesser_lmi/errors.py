"""Exception types shared across the package."""


class RoesserError(Exception):
    """Base class for all package errors."""


class SingularMatrix(RoesserError):
    pass


class NoConvergence(RoesserError):
    pass


class NotHermitian(RoesserError):
    pass


class PoleHit(RoesserError):
    """(I - delta*A22) is singular at the requested boundary point."""


class ConfigTooLarge(RoesserError):
    pass


class UnsupportedKind(RoesserError):
    pass


class NumericalBreakdown(RoesserError):
    pass


class ModelFileError(RoesserError):
    """Raised on malformed model files. ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
