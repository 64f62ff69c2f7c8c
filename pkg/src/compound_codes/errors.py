"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    pass


class InconsistentSystem(ValueError):
    """The affine system H z = t has no solution."""


class SearchSpaceTooLarge(RuntimeError):
    """Exhaustive search would exceed the configured candidate cap."""


class SocketMismatch(ValueError):
    """Variable and check socket counts of an LDPC ensemble differ."""


class NoPositiveThreshold(ValueError):
    """The asymptotic weight enumerator is positive arbitrarily close to zero."""
