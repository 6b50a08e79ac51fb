"""Shared exception types."""


class ParseError(ValueError):
    """Malformed surface syntax; carries a character position when known."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ArityError(ValueError):
    """A scheme was instantiated with the wrong number of formulas."""


class UnknownAtomError(KeyError):
    """A formula mentions an atom the model or system does not declare."""


class BudgetExceededError(RuntimeError):
    """An enumeration would exceed its configured budget."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class CapExceededError(ValueError):
    """A size cap on frames or structures was exceeded."""
