"""Conformal barycenters of discrete measures on spheres.

Points of the unit ball carry the hyperbolic (Poincare) metric. The
conformal barycenter of a measure on the sphere is the unique ball point
that, after a Mobius shift to the origin, leaves the measure with zero
Euclidean center of mass.
"""

from .ball import (
    BallPoint,
    SpherePoint,
    Tangent,
    boundary_shift,
    conformal_factor,
    director,
    exp_at,
    exp_origin,
    geodesic_distance,
    hyp_norm,
    shift,
    shift_differential,
)
from .errors import (
    ConfbaryError,
    ConvergenceError,
    DegenerateConfigurationError,
    GeometryError,
    LineSearchError,
    PrecisionLossError,
    UnstableMeasureError,
)
from .measure import (
    DiscreteMeasure,
    NKReport,
    Stability,
    StabilityClass,
    a_priori_radius,
    center_of_mass,
    certify_concentration,
    classify_stability,
    cone_complement_mass,
    cone_mass,
    field_at,
    field_at_origin,
    grad_field_at,
    grad_field_at_origin,
    nk_report,
    potential,
    pushforward,
)
from .solvers import (
    Method,
    SolveResult,
    SolverConfig,
    Status,
    solve,
    solve_abikoff_ye,
    solve_drnm,
    solve_newton_fixed,
)

__version__ = "0.1.0"
