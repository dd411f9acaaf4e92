"""Exception types raised by the library."""


class UnlockableError(Exception):
    """Base class for all library errors."""


class ArgumentError(UnlockableError, ValueError):
    """Malformed argument: unknown labels, bad cut, non-Hermitian input, ..."""


class LayoutError(UnlockableError, ValueError):
    """Subsystem layouts that do not fit together."""


class CapacityError(UnlockableError, ValueError):
    """Requested Hilbert space exceeds the dense-storage cap."""


class UnsupportedScenarioError(UnlockableError, ValueError):
    """A cut or protocol configuration for which no construction is offered."""
