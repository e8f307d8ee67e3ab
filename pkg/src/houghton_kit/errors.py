"""Shared exception types."""


class DomainError(ValueError):
    """Input outside the domain of an operation (bad ray index, wrong n, ...)."""


class InvalidElementError(ValueError):
    """An element representation violates a structural invariant.

    ``invariant`` names the failed invariant: one of ``zero-sum``,
    ``translation-validity``, ``bijection``, ``canonical-form``, ``format``.
    """

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class UnsupportedCaseError(ValueError):
    """The operation is not defined for these parameters."""


class DegreeCapError(ValueError):
    """Finite permutation degree above the supported cap."""


class InconclusiveError(RuntimeError):
    """A window-scale computation could not settle the question.

    Not a disproof; carries an optional hint (e.g. a larger window depth
    that may settle it).
    """

    def __init__(self, message: str, hint=None):
        super().__init__(message)
        self.hint = hint
