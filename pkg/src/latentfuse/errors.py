"""Exception hierarchy.

CLI exit codes key off these classes: parameter/format problems map to 2,
numerical failures to 3.
"""


class LatentFuseError(Exception):
    """Base class for all errors raised by latentfuse."""


class ParameterError(LatentFuseError, ValueError):
    """A parameter is out of range or inconsistent with the data."""


class InvalidInputError(LatentFuseError, ValueError):
    """Input data is malformed (wrong shape, non-finite entries)."""


class FormatError(InvalidInputError):
    """A file does not follow the expected CSV schema."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericalError(LatentFuseError, ArithmeticError):
    """A numerical routine failed or produced an unusable result."""


class DegenerateScaleError(NumericalError):
    """An adaptive kernel scale is zero."""

    def __init__(self, index):
        self.index = int(index)
        super().__init__(
            f"kernel scale of sample {self.index} is zero "
            "(its nearest neighbors are exact duplicates); increase k or deduplicate"
        )


class DegenerateGraphError(NumericalError):
    """A graph has an isolated column (zero column sum)."""


class DegenerateSpectrumError(NumericalError):
    """The stochastic matrix has no spectral gap (e.g. the identity)."""


class SpectralError(NumericalError):
    """Leading eigenvalues of a non-symmetric kernel are complex."""


class NoPeakError(NumericalError):
    """A signal has no non-zero frequency content."""
