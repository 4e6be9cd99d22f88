"""Exception types shared across the library."""


class InputError(ValueError):
    """Bad user input: dimension mismatch, invalid configuration, malformed data."""


class NumericError(ArithmeticError):
    """A computation produced a non-finite or otherwise unusable numeric result."""


class InvalidStructureError(InputError):
    """A composite structure fails one of its construction-time consistency checks."""


class IntegrationDivergedError(NumericError):
    """Time integration hit a non-finite state.

    ``last_good_step`` is the index of the last sample with finite state.
    """

    def __init__(self, message, last_good_step):
        super().__init__(message)
        self.last_good_step = last_good_step
