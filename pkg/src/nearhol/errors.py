"""Exception hierarchy shared by all modules."""


class NearholError(Exception):
    pass


class ParameterError(NearholError, ValueError):
    """Invalid family parameters or malformed input."""


class DomainError(NearholError, ValueError):
    """Argument outside the domain of an operation (non-dominant weight, wrong shape, ...)."""


class IntegrityError(NearholError, RuntimeError):
    """Internal consistency check failed; indicates wrong data, not wrong input."""


class UnsupportedError(NearholError, NotImplementedError):
    """Requested feature is not available for this space or bundle."""


class SingularityError(NearholError, ArithmeticError):
    pass


class BudgetError(NearholError, RuntimeError):
    """A numerical budget (interpolation nodes, samples) was exhausted."""
