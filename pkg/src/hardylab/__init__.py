"""Numerical laboratory for Hardy and Hardy-Sobolev Rayleigh quotients on
rotationally symmetric model manifolds."""

from .bubble import BubbleMoments, bubble_grad, bubble_moments, bubble_quotient, bubble_value, pohozaev_residual
from .constants import (
    critical_exponent,
    hardy_constant,
    hardy_sobolev_constant,
    log_gamma,
    sobolev_constant,
    sphere_area,
)
from .eigensolver import EigenResult, inertia_count, smallest_generalized_eigen
from .errors import DomainError, SweepRangeError
from .expansion import ExpansionFit, ExpansionSeries, fit_expansion, quotient_series, theory_coefficient
from .forms import QuadraticForms, RadialGrid, assemble_forms, build_grid, evaluate_quotient, hs_functional
from .manifold import (
    ModelManifold,
    curvature_criterion,
    density_expansion_residual,
    euclidean_ball,
    hyperbolic_cap,
    make_manifold,
    scalar_curvature_at_pole,
    sqrt_g_density,
    unit_sphere,
    volume_density,
)
from .minimizer import MinimizationResult, bubble_init, minimize_quotient
from .thresholds import (
    LambdaStarBracket,
    MuCurve,
    constant_profile_bound,
    lambda_star_bracket,
    mu_curve,
    mu_of_lambda,
    strict_inequality_report,
)

__version__ = "0.1.0"
