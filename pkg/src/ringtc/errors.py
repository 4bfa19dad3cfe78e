"""Exception types shared across the package."""


class RingTCError(Exception):
    """Base class for all errors raised by ringtc."""


class ParameterError(RingTCError, ValueError):
    """A model or sweep parameter violates one of its invariants.

    ``invariant`` names the violated condition so callers (and the CLI) can
    report it without parsing the message.
    """

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class NumericalError(RingTCError, RuntimeError):
    """An eigensolver or integrator failed to meet its accuracy contract."""


class GridMismatchError(RingTCError, ValueError):
    """Two trajectories that must share a time grid do not."""


class WindowError(RingTCError, ValueError):
    """An averaging or integration window lies outside the allowed range."""


class FitError(RingTCError, ValueError):
    """A power-law fit cannot be performed on the given samples."""


class NoSlowPeakError(RingTCError, ValueError):
    """No low-frequency component rises above the noise floor."""
