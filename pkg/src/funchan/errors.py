"""Exception hierarchy shared across the package."""


class FunchanError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FunchanError):
    """An argument lies outside the domain an operation accepts."""


class ShapeError(FunchanError):
    """Operand dimensions do not match."""


class RangeError(FunchanError):
    """A computed value left its required range."""


class CapabilityError(FunchanError):
    """The input size exceeds what an exhaustive routine supports."""


class ValidationError(FunchanError):
    """A structured input failed its consistency checks."""


class GridError(FunchanError):
    """A parameter is not representable on the requested dyadic grid."""


class DataError(FunchanError):
    """A data aggregation step received unusable input."""


class SpectralAnomalyError(FunchanError):
    """An eigenvalue fit neither admissible class (zero / unit modulus).

    Carries the offending eigenvalue in ``eigenvalue``.
    """

    def __init__(self, eigenvalue: complex, message: str | None = None):
        self.eigenvalue = eigenvalue
        super().__init__(
            message
            or f"eigenvalue {eigenvalue!r} is neither ~0 nor of unit modulus"
        )
