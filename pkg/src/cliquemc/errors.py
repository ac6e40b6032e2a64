"""Exception types shared across the package."""


class CliqueMCError(Exception):
    """Base class for all library errors."""


class UnknownPolymerError(CliqueMCError):
    """A polymer id does not exist in the model."""


class EnumerationCapError(CliqueMCError):
    """A brute-force enumeration would exceed the configured cap."""


class InvalidFamilyError(CliqueMCError):
    """A set of polymer ids contains an incompatible pair."""


class ConditionInputError(CliqueMCError):
    """Bad input to a condition checker (missing or non-positive f, bad g)."""


class PreconditionError(CliqueMCError):
    """A documented precondition of a sampler/estimator does not hold."""


class DegenerateRatioError(CliqueMCError):
    """An estimated clique ratio came out zero (undersampling)."""

    def __init__(self, clique_index, message=None):
        self.clique_index = clique_index
        super().__init__(message or f"estimated ratio for clique {clique_index} is zero")


class GraphFormatError(CliqueMCError):
    """A graph file could not be parsed."""
