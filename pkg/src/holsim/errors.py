"""Exception types shared across the package."""


class HolsimError(Exception):
    """Base class for all errors raised by holsim."""

    category = "error"


class ValidationError(HolsimError, ValueError):
    """Invalid input: malformed network, bath, scenario or argument.

    ``errors`` holds every problem found, each as a human-readable string,
    so callers can report them all at once.
    """

    category = "validation"

    def __init__(self, message, errors=None):
        self.errors = list(errors) if errors else [message]
        super().__init__(message)


class IntegratorError(HolsimError, RuntimeError):
    """Time propagation failed (no convergence, lost positivity, ...)."""

    category = "integrator"

    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)


class ResourceError(HolsimError, MemoryError):
    """The requested operation would exceed a configured size limit."""

    category = "resource"
