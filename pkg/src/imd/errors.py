"""Exception taxonomy shared by the library and the CLI."""


class ImdError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ImdError):
    """Input file is malformed (bad magic, ragged row, unreadable token)."""


class NonFiniteValue(ImdError):
    """A NaN or infinity was found in numeric input."""

    def __init__(self, row: int, col: int, value: float):
        self.row = row
        self.col = col
        self.value = value
        super().__init__(f"non-finite value {value!r} at row {row}, column {col}")


class EmptyInput(ImdError):
    """Input contains no points (or no coordinates)."""


class SampleTooLarge(ImdError):
    """Requested subsample is larger than the population."""


class InvalidK(ImdError):
    """Neighbor count k is outside [1, n-1]."""


class NonUnitStartVector(ImdError):
    """Lanczos start vector is not unit length."""


class TooLargeForOracle(ImdError):
    """Matrix exceeds the dense-eigendecomposition size cap."""


class GridMismatch(ImdError):
    """Two descriptors were built on different temperature grids."""


class DegenerateNullModel(ImdError):
    """Average degree too small for the random-graph null spectrum (needs k > 4)."""


class VersionMismatch(ImdError):
    """Descriptor file uses an unsupported schema version."""


class SchemaError(ImdError):
    """Descriptor JSON violates the schema."""


class DimensionMismatch(ImdError):
    """Two point sets have different ambient dimensions."""


class SampleSizeMismatchWarning(UserWarning):
    """Comparing descriptors built from different sample counts; heat traces
    scale with n, so the resulting distance mixes size and shape effects."""
