class MetricApproxError(Exception):
    """Base class for library errors."""


class InvalidArgument(MetricApproxError, ValueError):
    pass


class UnsupportedSpace(MetricApproxError):
    pass


class DomainError(MetricApproxError):
    pass


class Undecided(MetricApproxError):
    """Raised when an exact query cannot be settled within the allowed depth."""


class ConstructionFailed(MetricApproxError):
    def __init__(self, level, diagnostic):
        super().__init__(f"construction failed at level {level}: {diagnostic}")
        self.level = level
        self.diagnostic = diagnostic


class ResourceLimit(MetricApproxError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class InconsistentBracket(MetricApproxError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
