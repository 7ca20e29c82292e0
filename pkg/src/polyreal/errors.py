"""Exception types shared across the toolkit."""


class DimensionError(ValueError):
    """Matrix, grid, or tuple dimensions are inconsistent."""


class SingularityError(ArithmeticError):
    """A resolvent solve hit a numerically singular I - W."""


class CommutativityError(ValueError):
    """An operator tuple fails to commute within tolerance."""


class FormatError(ValueError):
    """A system, tuple, or polynomial file is malformed."""
