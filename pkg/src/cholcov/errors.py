"""Exception hierarchy shared across the package."""


class CholcovError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(CholcovError):
    """Operands have incompatible shapes."""


class NotSymmetric(CholcovError):
    """A matrix required to be symmetric is not, beyond tolerance."""


class NotPositiveDefinite(CholcovError):
    """A matrix required to be positive definite has a nonpositive pivot."""


class EmptySample(CholcovError):
    """An operation requiring observations received none."""


class ZeroVariance(CholcovError):
    """A data column is constant and cannot be standardized."""

    def __init__(self, column: int):
        self.column = column
        super().__init__(f"column {column} has zero sample variance")


class LineSearchStall(CholcovError):
    """Backtracking shrank the step below the underflow guard without
    finding an acceptable point."""


class BandTooLarge(CholcovError):
    """Band parameter k must be smaller than min(N - 1, p)."""


class SingularDesign(CholcovError):
    """A least-squares design matrix is rank deficient."""


class ConvergenceFailure(CholcovError):
    """An iterative solver exhausted its sweep budget before meeting
    its tolerance."""


class UndefinedMetric(CholcovError):
    """A ratio metric has a zero denominator; reported instead of
    silently coerced to 0."""


class LabelMismatch(CholcovError):
    """A label falls outside the declared class set."""


class ClassMissingInSplit(CholcovError):
    """A train/test split left some class without observations on one side."""


class ParseError(CholcovError):
    """A CSV field failed to parse; carries the 1-based row and column."""

    def __init__(self, row: int, column: int, message: str):
        self.row = row
        self.column = column
        super().__init__(f"row {row}, column {column}: {message}")


class RaggedRows(CholcovError):
    """A CSV row has a different field count than the first row."""

    def __init__(self, row: int, expected: int, got: int):
        self.row = row
        super().__init__(f"row {row}: expected {expected} fields, got {got}")
