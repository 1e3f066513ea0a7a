"""Exception hierarchy shared by every module of the package."""


class FoitsmcError(Exception):
    """Base class for all package errors."""


class DomainError(FoitsmcError, ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidAlphaError(DomainError):
    pass


class InvalidGainsError(DomainError):
    pass


class InvalidSplitError(DomainError):
    """The Lyapunov split constant is not strictly inside (0, rate)."""


class SingularGainError(FoitsmcError, ZeroDivisionError):
    pass


class MissingBoundError(FoitsmcError):
    """A disturbance signal has no declared bound on its time derivative."""


class ScenarioError(FoitsmcError, ValueError):
    """A scenario file or object failed validation."""


class NumericBlowupError(FoitsmcError, ArithmeticError):
    """Non-finite state or derivative encountered during integration."""

    def __init__(self, t: float, message: str = "non-finite value") -> None:
        self.t = t
        super().__init__(f"{message} at t={t:.6g} s")
