"""Exception hierarchy shared across the toolkit.

Data problems (unreadable, silent, or degenerate inputs) and numeric
problems (failed fits, unsolvable gains) are kept on separate branches so
the CLI can map them to distinct exit codes.
"""


class AirForgeError(Exception):
    """Base class for all toolkit errors."""


class DataError(AirForgeError):
    """Input data is unusable (missing files, bad formats, shortfalls)."""


class DegenerateInputError(DataError):
    """Signal is empty, all-zero, or too short for the operation."""


class AnechoicInputError(DataError):
    """Late-field energy is zero; DRR and decay operations are undefined."""


class SilenceError(DataError):
    """Level measurement found no signal to measure."""


class NumericError(AirForgeError):
    """A numeric procedure failed to produce a usable result."""


class NoSolutionError(NumericError):
    """The DRR gain quadratic has no real root for the requested target."""

    def __init__(self, message: str, discriminant: float):
        super().__init__(message)
        self.discriminant = discriminant


class DecayFitError(NumericError):
    """Decay-model optimization did not converge within its budget.

    Carries the best parameters seen so far in ``model``.
    """

    def __init__(self, message: str, model=None, band_index=None):
        super().__init__(message)
        self.model = model
        self.band_index = band_index


class FilterbankDesignError(NumericError):
    """A filterbank design failed its power-complementarity check."""
