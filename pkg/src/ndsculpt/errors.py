"""Exception types shared across the engine.

Everything the engine raises on purpose derives from EngineError so the
session layer can turn it into a structured error reply while letting
genuine bugs propagate.
"""


class EngineError(Exception):
    """Base class for all expected engine failures."""


class ParseError(EngineError):
    """Malformed dataset or script text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(EngineError):
    """A command or argument violates a precondition."""


class DegenerateInputError(EngineError):
    """Input collapses to something the operation cannot interpret."""


class BudgetExhaustedError(EngineError):
    """A bounded sampling loop ran out of attempts."""


class EmptyMapError(EngineError):
    """An edit would leave a probability map with zero total mass."""
