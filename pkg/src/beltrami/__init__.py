"""Moving-frame operator calculus on parametric surfaces.

The package computes frame derivatives, connection and normal forms, the
second-order (Beltrami) operator family, measure transports, and their
spherical-image variants on a small catalog of parametric charts, with three
interchangeable derivative backends (symbolic-jet, dual-number, finite
stencil).  Every identity the library implements is registered as an audit
case; ``beltrami.cli`` runs the audit and writes deterministic reports.
"""

from .errors import (AngleFieldUndefined, BeltramiError, ConfigParse,
                     ConstraintUnsatisfiable, DegenerateMu, DegenerateTheta,
                     FlatPointForImage, QuadratureNonConvergence,
                     RegularityViolation, RequirementUnmet, UnknownCase,
                     UnknownSurface)
from .frames import FdCtx, JetCtx, make_ctx
from .operators import (beltrami, const_field, d_omega, d_omega_tilde,
                        grad_tilde, pfaff_grad, pi2, q_tilde, seeded_field,
                        theta, theta_tilde)
from .registry import (CASES, CASE_INDEX, IdentityCase, ResidualReport, RunEnv,
                       anchor_coverage, gauge_rotation_audit, manifest,
                       run_case, run_suite, select_cases)
from .surfaces import CATALOG, Rect, SurfacePatch, parse_surface

__version__ = "0.1.0"

__all__ = [
    "AngleFieldUndefined", "BeltramiError", "ConfigParse",
    "ConstraintUnsatisfiable", "DegenerateMu", "DegenerateTheta",
    "FlatPointForImage", "QuadratureNonConvergence", "RegularityViolation",
    "RequirementUnmet", "UnknownCase", "UnknownSurface",
    "FdCtx", "JetCtx", "make_ctx",
    "beltrami", "const_field", "d_omega", "d_omega_tilde", "grad_tilde",
    "pfaff_grad", "pi2", "q_tilde", "seeded_field", "theta", "theta_tilde",
    "CASES", "CASE_INDEX", "IdentityCase", "ResidualReport", "RunEnv",
    "anchor_coverage", "gauge_rotation_audit", "manifest", "run_case",
    "run_suite", "select_cases",
    "CATALOG", "Rect", "SurfacePatch", "parse_surface",
    "__version__",
]
