"""Warped-product static metric profiles.

Exact rational bookkeeping for the shift polynomials, fixed-step integration
of the radial profile equations, multiply-warped model assembly, and residual
certification of the resulting metrics.
"""

__version__ = "0.1.0"

from staticgeo.errors import (
    ConstraintError,
    DegenerateGridError,
    ParameterError,
    ProfileSingularityError,
    RegularityError,
    ScenarioError,
    StaticGeoError,
    StepTooCoarseError,
)
from staticgeo.geometry import FiberSpec, MetricModel, build_case, ricci_spectrum, zeta_profile
from staticgeo.profile import (
    CASE_GENERAL,
    CASE_I,
    CASE_II,
    CASE_III,
    CASE_IV,
    CASES,
    OdeSpec,
    ProfileSamples,
    first_integral,
    integrate,
)
from staticgeo.search import (
    AuditRecord,
    AuditReport,
    coefficient_audit,
    multiclass_probe,
    obstruction_certificate,
)
from staticgeo.verify import CheckResult, ResidualReport, Thresholds, verify

__all__ = [
    "AuditRecord",
    "AuditReport",
    "CASES",
    "CASE_GENERAL",
    "CASE_I",
    "CASE_II",
    "CASE_III",
    "CASE_IV",
    "CheckResult",
    "ConstraintError",
    "DegenerateGridError",
    "FiberSpec",
    "MetricModel",
    "OdeSpec",
    "ParameterError",
    "ProfileSamples",
    "ProfileSingularityError",
    "RegularityError",
    "ResidualReport",
    "ScenarioError",
    "StaticGeoError",
    "StepTooCoarseError",
    "Thresholds",
    "build_case",
    "coefficient_audit",
    "first_integral",
    "integrate",
    "multiclass_probe",
    "obstruction_certificate",
    "ricci_spectrum",
    "verify",
    "zeta_profile",
    "__version__",
]
