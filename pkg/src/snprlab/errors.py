"""Exception types shared across the package."""


class SnprLabError(Exception):
    """Base class for all package errors."""


class ParseError(SnprLabError):
    """Raised when input text cannot be parsed.

    Carries an optional character offset into the input.
    """

    def __init__(self, message, pos=None):
        if pos is not None:
            message = "%s (at position %d)" % (message, pos)
        super().__init__(message)
        self.pos = pos


class InvalidNetworkError(SnprLabError):
    """Raised when a structure fails network validation.

    ``violations`` lists human-readable reasons.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InvalidDigraphError(SnprLabError):
    """Raised when a structure fails leaf/phylo digraph validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class MoveError(SnprLabError):
    """Raised when a rearrangement move is not applicable."""


class EmbeddingError(SnprLabError):
    """Raised when no embedding (or extension) exists where one is required."""


class BudgetExceededError(SnprLabError):
    """Raised when a bounded search exhausts its budget without an answer."""


class ContractViolationError(SnprLabError):
    """Raised when an internal invariant that should always hold fails.

    Seeing this means a bug, not bad input.
    """
