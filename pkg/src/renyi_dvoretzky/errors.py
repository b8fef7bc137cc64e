"""Exception types raised across the package."""


class InvalidOrderError(ValueError):
    """A Schatten or Renyi order outside the supported range."""


class ShapeError(ValueError):
    """An array does not have the shape an operation requires."""


class DimensionError(ValueError):
    """Incompatible or out-of-range dimensions (e.g. m > d*r)."""


class SymmetryError(ValueError):
    """A matrix expected to be Hermitian is not, within tolerance."""


class DomainError(ValueError):
    """A scalar argument lies outside the domain of a function."""


class UnsupportedShapeError(ValueError):
    """The operation is only implemented for a restricted shape."""
