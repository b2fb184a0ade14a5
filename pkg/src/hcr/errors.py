"""Exception types raised across the package."""


class HcrError(Exception):
    """Base class for all package errors."""


class ConfigError(HcrError, ValueError):
    """A parameter lies outside its allowed range."""


class PairingError(HcrError, ValueError):
    """Two samples do not have the same number of rows."""


class ParseError(HcrError, ValueError):
    """A table cell could not be parsed as a number."""

    def __init__(self, row, col, text):
        self.row = row
        self.col = col
        self.text = text
        super().__init__(f"non-numeric cell at row {row}, column {col}: {text!r}")


class SampleTooSmall(HcrError, ValueError):
    pass


class DegenerateColumn(HcrError, ValueError):
    """A column has zero variance."""


class DegenerateSample(HcrError, ValueError):
    """All points coincide, so no bandwidth can be chosen."""


class DegenerateFeature(HcrError, ValueError):
    """A feature has zero empirical variance and cannot be standardized."""

    def __init__(self, j, k):
        self.j = j
        self.k = k
        super().__init__(f"feature ({j}, {k}) has zero variance")


class DomainError(HcrError, ValueError):
    """Argument outside the domain of a basis function."""


class DimError(HcrError, ValueError):
    """Dimension mismatch between arguments."""


class EmptyFeatures(HcrError, ValueError):
    pass
