"""Exception taxonomy shared across the package.

Every error raised by the public API derives from BeltramiError so callers
can catch one type.  The CLI maps a few of these to dedicated exit codes.
"""


class BeltramiError(Exception):
    pass


class PointOutsideDomain(BeltramiError):
    """Evaluation point lies outside the chart rectangle (margin included)."""


class RegularityViolation(BeltramiError):
    """Geometry fell below the regularity margin at the requested point."""


class DegenerateCoframe(RegularityViolation):
    """Coframe solve impossible: omega1 ^ omega2 vanished numerically."""


class DegenerateDenominator(RegularityViolation):
    """2-form ratio requested against a denominator below the floor."""


class DifferentiationFailure(BeltramiError):
    """Finite-difference step underflowed (stencil fell off the domain)."""


class FlatPointForImage(BeltramiError):
    """Spherical-image quantity requested where |K| < K_floor."""


class DegenerateTheta(BeltramiError):
    """Theta(a1, a2) crossed zero on a region where 1/Theta is integrated."""


class DegenerateMu(BeltramiError):
    """mu-construction impossible: nabla2(lambda) or q2 vanished."""


class SingularCurvePoint(BeltramiError):
    """Curve speed below tolerance: no tangent direction."""


class AngleFieldUndefined(BeltramiError):
    """No tangent-angle field extension is available for this configuration."""


class ConstraintUnsatisfiable(BeltramiError):
    """A side condition of an identity cannot be met on this configuration."""


class QuadratureNonConvergence(BeltramiError):
    """Panel doubling failed to stabilize an integral inside the gate."""


class RequirementUnmet(BeltramiError):
    """An identity case requires a surface property this surface lacks."""


class UnknownSurface(BeltramiError):
    """Surface name not in the catalog."""


class UnknownCase(BeltramiError):
    """Case id or glob matched nothing in the registry."""


class ConfigParse(BeltramiError):
    """Malformed configuration file, flag value, or environment override."""
