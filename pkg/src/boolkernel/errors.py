"""Shared exception types with a documented CLI exit code per class."""


class BoolKernelError(Exception):
    """Base class for package errors."""

    exit_code = 1


class GuardExceeded(BoolKernelError):
    """A resource guard (vector length, support weight, enumeration size) was hit."""

    exit_code = 3


class VerificationFailure(BoolKernelError):
    """A checked claim about a simulation trace or report failed."""

    exit_code = 4

    def __init__(self, step, claim, detail=""):
        self.step = step
        self.claim = claim
        self.detail = detail
        super().__init__(f"step {step}: {claim}" + (f" ({detail})" if detail else ""))


class ParameterViolation(BoolKernelError):
    """Derived reduction parameters violate one of their defining constraints."""

    exit_code = 5

    def __init__(self, constraint, detail=""):
        self.constraint = constraint
        super().__init__(f"{constraint}" + (f": {detail}" if detail else ""))


class GenerationFailed(BoolKernelError):
    """Seeded sampling exhausted its attempt budget without a valid object."""

    exit_code = 6


class SlackBudgetError(BoolKernelError):
    """Internal inconsistency: the slack-variable cursor ran past its block."""

    exit_code = 1
