"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter lies outside the admissible range (domain error)."""


class DegenerateRegimeError(ParameterError):
    """sp = k + alpha + beta: the sharp constant vanishes and every check is vacuous."""


class NonIntegrableError(ValueError):
    """A requested integral diverges for the given exponents."""


class PreconditionError(ValueError):
    """An input violates an operation's precondition (wrong class of test function, etc.)."""
