"""Prescribed Ricci curvature on a solid-torus boundary collar.

Parse closed-form radial profiles, evaluate the Ricci curvature of
rotationally symmetric metrics, decide solvability of Ric(G) = T from
boundary data, construct the solution by terminal-value integration, verify
it, put metrics in a canonical gauge, and reproduce the closed-form Einstein
metrics on the solid torus as exact references.

Everything here is a pure function over immutable values; results are safe
to share across threads.
"""

from .collar import (
    CanonicalGauge,
    CollarSolution,
    CollarState,
    FeasibilityReport,
    MatchResult,
    ResidualReport,
    Verdict,
    canonical_gauge,
    feasibility,
    metrics_match,
    solve_collar,
    verify_ricci,
)
from .einstein import (
    ArcLengthMap,
    ArcProfiles,
    BoundaryMatch,
    CoreRegularity,
    EinsteinSpec,
    Obstruction,
    arc_length,
    boundary_match,
    core_regularity,
    einstein_profiles,
    einstein_residual,
    product_identity_residual,
)
from .errors import (
    DomainError,
    ImmediateBreakdown,
    InfeasibleBoundaryData,
    IntegrationFailure,
    InvalidConstant,
    InvalidS0,
    MaxStepsExceeded,
    NonFiniteResult,
    NonPositiveMetric,
    NotMonotone,
    OutOfRange,
    ParseError,
    StepUnderflow,
    TargetOutOfRange,
)
from .expr import Jet2, RadialExpr, eval_jet2, parse_expr, serialize
from .geometry import (
    BoundaryData,
    CollarSpec,
    RicciValue,
    RotSymMetric,
    RotSymTensor,
    boundary_data_of,
    chebyshev_points,
    constraint_residual,
    ricci_components,
)
from .ode import (
    IntegratorControls,
    OdeSystem,
    Termination,
    TerminationKind,
    Trajectory,
    integrate_terminal,
    invert_monotone,
    quadrature,
)
from .profiles import ExprProfile, GridProfile, Profile, as_profile

__version__ = "0.1.0"

__all__ = [
    "Jet2", "RadialExpr", "parse_expr", "eval_jet2", "serialize",
    "Profile", "ExprProfile", "GridProfile", "as_profile",
    "CollarSpec", "RicciValue", "BoundaryData", "RotSymMetric", "RotSymTensor",
    "ricci_components", "boundary_data_of", "constraint_residual",
    "chebyshev_points",
    "OdeSystem", "IntegratorControls", "Trajectory", "Termination",
    "TerminationKind", "integrate_terminal", "invert_monotone", "quadrature",
    "Verdict", "FeasibilityReport", "feasibility",
    "CollarState", "CollarSolution", "solve_collar",
    "ResidualReport", "verify_ricci",
    "CanonicalGauge", "canonical_gauge", "MatchResult", "metrics_match",
    "EinsteinSpec", "ArcProfiles", "einstein_profiles",
    "CoreRegularity", "core_regularity", "ArcLengthMap", "arc_length",
    "BoundaryMatch", "Obstruction", "boundary_match",
    "einstein_residual", "product_identity_residual",
    "ParseError", "DomainError", "NonFiniteResult", "NonPositiveMetric",
    "OutOfRange", "NotMonotone", "TargetOutOfRange", "IntegrationFailure",
    "StepUnderflow", "MaxStepsExceeded", "ImmediateBreakdown",
    "InfeasibleBoundaryData", "InvalidS0", "InvalidConstant",
]
