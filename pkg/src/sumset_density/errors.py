"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An operation was called with arguments outside its documented domain."""


class UndecidableAtPrecision(ArithmeticError):
    """Refinement budget ran out before a comparison could be decided.

    For inputs that really are irrational this does not happen; seeing it
    usually means the caller passed a rational value where an irrational one
    was promised.
    """


class InternalConsistencyError(RuntimeError):
    """A computed result failed its own post-verification. Never ignore."""


class SetSyntaxError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        pointer = " " * position + "^"
        super().__init__(f"{message} at position {position}\n  {text}\n  {pointer}")
