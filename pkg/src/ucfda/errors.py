"""Exception hierarchy shared by every module.

All errors derive from :class:`DiscriminantError` so callers (the benchmark in
particular) can catch library failures without swallowing programming bugs.
"""

from __future__ import annotations


class DiscriminantError(Exception):
    """Base class for library errors."""


class ConfigError(DiscriminantError, ValueError):
    pass


# --- linear algebra -------------------------------------------------------


class NotPositiveDefinite(DiscriminantError, ValueError):
    def __init__(self, pivot_index: int, pivot: float):
        self.pivot_index = pivot_index
        self.pivot = pivot
        super().__init__(f"matrix is not positive definite (pivot {pivot_index} = {pivot:.3e})")


class NoConvergence(DiscriminantError, RuntimeError):
    pass


class DimensionMismatch(DiscriminantError, ValueError):
    pass


# --- statistics -------------------------------------------------------------


class EmptyDataset(DiscriminantError, ValueError):
    pass


class ClassTooSmall(DiscriminantError, ValueError):
    def __init__(self, class_id, n: int, required: int = 2):
        self.class_id = class_id
        self.n = n
        super().__init__(f"class {class_id!r} has {n} sample(s); at least {required} required")


class SingleClass(DiscriminantError, ValueError):
    pass


class DegenerateDenominator(DiscriminantError, ValueError):
    pass


class ZeroVariance(DiscriminantError, ValueError):
    pass


class RankDeficient(DiscriminantError, ValueError):
    def __init__(self, requested: int, available: int):
        self.requested = requested
        self.available = available
        super().__init__(f"requested {requested} discriminant direction(s), only {available} available")


class DegenerateVariance(DiscriminantError, ValueError):
    def __init__(self, class_id, direction: int, variance: float):
        self.class_id = class_id
        self.direction = direction
        self.variance = variance
        super().__init__(
            f"projected variance of class {class_id!r} on direction {direction} is {variance:.3e}"
        )


class SingularCovariance(DiscriminantError, ValueError):
    def __init__(self, class_id):
        self.class_id = class_id
        super().__init__(f"covariance matrix of class {class_id!r} is singular")


class ZeroDenominator(DiscriminantError, ValueError):
    pass


class InternalConsistencyError(DiscriminantError, AssertionError):
    """Two independent computations of the same quantity disagree."""


# --- hypothesis tests -------------------------------------------------------


class LogZero(DiscriminantError, ValueError):
    def __init__(self, which: str):
        self.which = which
        super().__init__(f"log of a non-positive determinant ({which})")


class ZeroSpread(DiscriminantError, ValueError):
    pass


# --- data -------------------------------------------------------------------


class DataError(DiscriminantError, ValueError):
    pass


class ParseError(DataError):
    def __init__(self, line: int, col: int, message: str = "malformed row"):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, column {col}: {message}")


class NonNumericFeature(ParseError):
    def __init__(self, line: int, col: int, value: str):
        self.value = value
        super().__init__(line, col, f"non-numeric feature value {value!r}")


class MissingLabelColumn(DataError):
    pass


class AllColumnsDropped(DataError):
    pass


class KTooLarge(DataError):
    pass
