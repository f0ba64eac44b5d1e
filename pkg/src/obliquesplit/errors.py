"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Sample vectors or families do not conform to a common space."""


class NotOrthonormal(ValueError):
    """A basis that must be orthonormal fails the check tolerance."""


class SubspaceIntersection(RuntimeError):
    """Signal and noise subspaces intersect at working precision."""


class DegenerateFamily(RuntimeError):
    """A spanning family contains (numerically) zero atoms or has zero rank."""


class StabilityStop(RuntimeError):
    """No forward-selection candidate survives the stability threshold."""
