"""Exception types shared across the package.

The CLI maps these onto exit codes: DataError (and OSError) exit 3,
NumericalError and its subclasses exit 4.
"""


class DataError(ValueError):
    """Malformed or inconsistent input data (files, headers, geometry)."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its advertised accuracy."""


class QuadratureError(NumericalError):
    """Adaptive integration stopped before meeting the tolerance.

    Carries the best estimate and its error bound so callers can decide
    whether the partial answer is still usable.
    """

    def __init__(self, message, value=float("nan"), error=float("inf")):
        super().__init__(message)
        self.value = value
        self.error = error
