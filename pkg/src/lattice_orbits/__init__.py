"""Norm-ball orbit statistics for lattices acting on the plane.

The library enumerates norm balls in SL(2, Z) and in the unit group of
an order in the (2, 3) quaternion algebra, sums test functions over
the resulting plane orbits, and compares the growth against the
limiting density integral I(f, u) = integral of f(v)/(v * u) dv.  The
diophantine side (continued fractions, window bounds, geodesic
excursions) quantifies how the slope of the initial vector controls
the error term.
"""

__version__ = "0.1.0"

from .density import (
    AnnulusIndicator,
    Bump1D,
    BoxIndicator,
    RadialBump,
    RadialHat,
    SmoothBump,
    TestFunction,
    boundary_lemma_check,
    build_partition,
    compute_support_meta,
    density_integral,
    function_from_config,
    holder_norm_estimate,
    lift_eval,
)
from .diophantine import (
    NAMED_SLOPES,
    CFExpansion,
    cf_expand,
    cf_from_quotients,
    classify_slope,
    cusp_window_bound,
    excursion_height,
    excursion_profile,
    parse_slope,
    slope_of,
    slope_vector,
    tk_bounds_hold,
)
from .experiments import (
    ExperimentConfig,
    cloud_points,
    constant_independence,
    convergence_study,
    orbit_sum,
    run_is_admissible,
    scaling_sweep,
    shrinking_target_search,
    xi_hat_for_run,
)
from .lattice import (
    LatticeElement,
    LatticeKind,
    LatticeSpec,
    ball,
    ball_coeffs,
    ball_count,
    load_ball,
    save_ball,
    verify_group_axioms,
)
from .linalg import (
    Mat2,
    MatrixNorm,
    Vec2,
    cocycle,
    diagonal_flow,
    mat_norm,
    rotation,
    section,
    shear,
    star_product,
)
from .quadrature import QuadratureError, integrate_polar
from .quadratic import Surd, ZSqrt2

__all__ = [
    "AnnulusIndicator",
    "Bump1D",
    "BoxIndicator",
    "CFExpansion",
    "ExperimentConfig",
    "LatticeElement",
    "LatticeKind",
    "LatticeSpec",
    "Mat2",
    "MatrixNorm",
    "NAMED_SLOPES",
    "QuadratureError",
    "RadialBump",
    "RadialHat",
    "SmoothBump",
    "Surd",
    "TestFunction",
    "Vec2",
    "ZSqrt2",
    "ball",
    "ball_coeffs",
    "ball_count",
    "boundary_lemma_check",
    "build_partition",
    "cf_expand",
    "cf_from_quotients",
    "classify_slope",
    "cloud_points",
    "cocycle",
    "compute_support_meta",
    "constant_independence",
    "convergence_study",
    "cusp_window_bound",
    "density_integral",
    "diagonal_flow",
    "excursion_height",
    "excursion_profile",
    "function_from_config",
    "holder_norm_estimate",
    "integrate_polar",
    "lift_eval",
    "load_ball",
    "mat_norm",
    "orbit_sum",
    "parse_slope",
    "rotation",
    "run_is_admissible",
    "save_ball",
    "scaling_sweep",
    "section",
    "shear",
    "shrinking_target_search",
    "slope_of",
    "slope_vector",
    "star_product",
    "tk_bounds_hold",
    "verify_group_axioms",
    "xi_hat_for_run",
]
