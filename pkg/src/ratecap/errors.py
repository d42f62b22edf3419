"""Exception types.  ``exit_code`` is what the CLI returns for each."""


class RatecapError(Exception):
    exit_code = 1


class InputError(RatecapError, ValueError):
    """Malformed or inconsistent input (bad lengths, negative entries, ...)."""

    exit_code = 2


class InfeasibleServiceError(InputError):
    """A service violates E <= m*T (or E >= 0, m >= 1)."""

    exit_code = 3

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InadequateSupplyError(RatecapError):
    """The supply cannot serve every unit-rate service.

    ``tail_index`` is the 0-based start of the worst tail deficit,
    ``unmet`` lists rows left short, ``partial`` is the allocation reached.
    """

    exit_code = 3

    def __init__(self, message, tail_index=None, unmet=(), partial=None):
        super().__init__(message)
        self.tail_index = tail_index
        self.unmet = tuple(unmet)
        self.partial = partial


class InvariantViolation(RatecapError, AssertionError):
    exit_code = 4


class BoundsExceeded(InputError):
    """Instance too large for exhaustive enumeration."""
