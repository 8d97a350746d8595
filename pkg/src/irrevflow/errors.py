"""Exception types shared across the library."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class GridMismatchError(InvalidArgumentError):
    """Two objects that must share a grid were built on different grids."""


class NotPositiveSemidefiniteError(ValueError):
    """A matrix required to be positive semidefinite has a genuinely
    negative eigenvalue (below the tolerance floor, not just roundoff)."""


class NotProjectorLikeError(ValueError):
    """An operator expected to be close to an orthogonal projection has
    eigenvalues too far from {0, 1} to snap safely."""


class ConfigError(ValueError):
    """A run configuration failed validation.

    Carries the name of the offending field so command line users can fix
    the right entry.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"config field '{field}': {message}")
