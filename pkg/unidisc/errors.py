"""Exception hierarchy for the toolkit"""

from typing import Optional


class ToolkitError(Exception):
    """Base class for all toolkit errors"""
    pass


class DomainError(ToolkitError):
    """Raised when a point lies outside the open unit disc"""
    pass


class SingularPointError(ToolkitError):
    """Raised when an expression is evaluated at a declared singularity"""

    def __init__(self, message: str, point: Optional[complex] = None):
        super().__init__(message)
        self.point = point


class CriticalPointError(ToolkitError):
    """Raised when f' vanishes (to the configured threshold) at a point"""

    def __init__(self, message: str, point: Optional[complex] = None):
        super().__init__(message)
        self.point = point


class ConvergenceError(ToolkitError):
    """Raised when a numerical procedure misses its tolerance"""
    pass


class BudgetExceededError(ConvergenceError):
    """Raised when a refinement budget runs out"""
    pass


class IndeterminateIntegralError(ConvergenceError):
    """Raised when an improper integral is neither convergent nor divergent within budget"""
    pass


class ConditionViolatedError(ToolkitError):
    """Raised when a hypothesis checked on a grid fails, with the witness point"""

    def __init__(self, message: str, witness: Optional[complex] = None, margin: Optional[float] = None):
        super().__init__(message)
        self.witness = witness
        self.margin = margin


class InapplicableError(ToolkitError):
    """Raised when a bound is queried outside its range of applicability"""
    pass


class ContourError(ToolkitError):
    """Raised when no admissible contour avoids the target value"""
    pass


class DegenerateDilatationError(ToolkitError):
    """Raised when |omega| >= 1, i.e. the Jacobian is not positive"""

    def __init__(self, message: str, point: Optional[complex] = None):
        super().__init__(message)
        self.point = point


class PredicateNoiseError(ToolkitError):
    """Raised when a bisected predicate is not monotone across the final bracket"""

    def __init__(self, message: str, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class ConfigError(ToolkitError):
    """Raised for unreadable or invalid experiment configuration"""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        super().__init__(message)
        self.field = field
        self.line = line
