"""Exception hierarchy.

The CLI maps these onto exit codes: usage/validation -> 1, numeric -> 2,
resource -> 3.
"""


class TwistlError(Exception):
    exit_code = 2


class ValidationError(TwistlError, ValueError):
    exit_code = 1


class DomainError(TwistlError, ValueError):
    """Argument outside the region where an operation is defined or reliable."""

    exit_code = 2


class ResourceError(TwistlError, RuntimeError):
    exit_code = 3


class CoverageError(TwistlError, RuntimeError):
    """A zero list does not cover the window an operation needs."""

    exit_code = 2


class PathError(TwistlError, RuntimeError):
    """Phase tracking failed: a zero sits on (or too close to) the path.

    ``where`` carries the offending point (sigma for horizontal walks, a
    complex boundary point for rectangle contours).
    """

    exit_code = 2

    def __init__(self, message, where=None, failed=None):
        super().__init__(message)
        self.where = where
        self.failed = failed


class AuditError(TwistlError, RuntimeError):
    exit_code = 2

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class QuadratureError(TwistlError, RuntimeError):
    exit_code = 2
