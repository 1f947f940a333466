"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Base class for equilibrium-state validation failures."""


class HyperbolicityViolated(ValidationError):
    """Density/sound-speed positivity or the secondary hyperbolicity bound failed."""


class InterfaceConstraintViolated(ValidationError):
    """The algebraic interface compatibility relations do not hold."""


class ExpansionViolated(ValidationError):
    """The interface is required to be non-compressing (kappa <= 0)."""


class EpsilonOutOfRange(ValidationError):
    """The light-speed ratio epsilon must lie strictly inside (0, 1)."""


class CollinearFields(ValueError):
    """Tangential plasma and vacuum fields are collinear; the boundary gradient
    cannot be resolved from the field traces."""


class NotOrthogonalFields(ValueError):
    """Operation requires the orthogonal-fields configuration (plasma field
    along x3, vacuum field along x2, flow along x3)."""


class UnsupportedCase(ValueError):
    """State lies outside the implemented normal-mode determinant variants."""


class DegenerateDenominator(ValueError):
    """The dispersion-root denominator vanished at the requested frequency."""


class ConsistencyViolation(RuntimeError):
    """A scan verdict contradicts an analytically certain region label."""
