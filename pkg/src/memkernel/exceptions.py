"""Exception types raised by memkernel.

Every error derives from :class:`MemKernelError`. Validation problems
(bad arguments, bad configs) derive from :class:`ValidationError` as well
as :class:`ValueError`; numerical breakdowns derive from
:class:`NumericalError`. The CLI maps the two families to exit codes 2 and 3.
"""


class MemKernelError(Exception):
    """Base class for all memkernel errors."""


class ValidationError(MemKernelError, ValueError):
    """Invalid argument or configuration."""


class NumericalError(MemKernelError, ArithmeticError):
    """A numerical stage failed (divergence, ill-conditioning, ...)."""


class InvalidKernelError(ValidationError):
    """Kernel violates its invariants (e.g. a non-decaying exponent)."""


class DegenerateInputError(ValidationError):
    """Input carries no information (e.g. an all-zero correlation)."""


class ConstraintError(ValidationError):
    """A linear equality constraint cannot be satisfied."""


class DivergenceError(NumericalError):
    """A simulated state became non-finite."""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"trajectory diverged at step {step}")


class PoleError(NumericalError):
    """Evaluation point coincides with a pole."""


class ConstraintViolationError(NumericalError):
    """A quantity that a fitted constraint should make vanish does not."""


class IllConditionedError(NumericalError):
    """Decomposition is too ill-conditioned to be trusted."""


class InstabilityError(NumericalError):
    """A derived transfer function has poles in the right half plane."""


class CoercivityError(NumericalError):
    """A coercivity constant is not strictly positive."""


class AccuracyError(NumericalError):
    """Quadrature did not reach the requested accuracy."""
