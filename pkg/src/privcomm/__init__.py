"""Privacy-constrained Stackelberg communication equilibria for Gaussian sources."""

from .curves import (
    CurveShapeReport,
    SlopeReport,
    TradeoffCurve,
    check_concavity,
    lagrangian_slope_check,
    noise_for_rate,
    privacy_floor,
    sweep_privacy_distortion,
    sweep_rate_distortion,
)
from .equilibrium import (
    ChannelSpec,
    EncoderPolicy,
    EquilibriumSolution,
    DegeneratePrivacyTarget,
    InfeasiblePrivacyTarget,
    InfiniteRateError,
    Setting,
    SolveError,
    evaluate_setting1,
    evaluate_setting2,
    evaluate_setting3,
    solve_alpha_quadratic,
    solve_setting1,
    solve_setting2,
    solve_setting3,
    xi_sign_check,
)
from .model import (
    CorrelationBoundError,
    ModelError,
    NegativeCorrelationError,
    NonPositiveVarianceError,
    PrivacyBounds,
    SourceModel,
    gaussian_conditional_entropy,
    privacy_bounds,
    validate_model,
)
from .montecarlo import (
    ProbeReport,
    SimConfig,
    SimResult,
    decoder_optimality_probe,
    sample_joint,
    simulate_policy,
)
from .oracle import (
    OracleConfig,
    OracleOptimum,
    VerificationReport,
    covariance_evaluate,
    grid_search,
    lagrangian_scan,
    verify_equilibrium,
)

__version__ = "0.1.0"
