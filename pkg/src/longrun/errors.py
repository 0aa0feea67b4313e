"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A model or solver parameter is outside its admissible range."""


class SizeLimitError(ValueError):
    """An exhaustive-enumeration routine was asked for a size it refuses."""


class NoCoexistenceError(ValueError):
    """No gas/liquid coexistence exists at the requested temperature."""


class NoTransitionError(ValueError):
    """No phase transition exists for the requested fugacity."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to converge; carries the last iterate."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate
