"""Mellin spectral cut-off density estimation for stochastic volatility.

This library estimates the stationary density of an unobserved bivariate
volatility process from noisy squared increments. It provides:

- **Multiplicative Deconvolution**: Empirical Mellin transforms divided by
  the noise transform and inverted on an anisotropic cutoff box
- **Data-Driven Cutoffs**: Penalized contrast selection over a lattice of
  candidate boxes, with per-candidate diagnostics
- **Process Simulation**: Exponential Ornstein-Uhlenbeck, CIR and
  exponential CIR paths with integrated volatilities
- **Analytic Truths**: Densities, Mellin transforms and bias norms of the
  stationary laws, for exact ISE evaluation
- **Monte-Carlo Studies**: Seeded, thread-count independent replications

Basic usage:

```python
from mellin_volatility import (
    NoiseModel,
    PathConfig,
    generate_observations,
    log_probe_axis,
    select_cutoff,
    simulate_path,
)

bundle = simulate_path("exp-ou", PathConfig(n=5000, delta=0.01, seed=7))
obs = generate_observations(bundle, seed=7)
k_hat, diagnostics = select_cutoff(obs, NoiseModel.chi_squared())
probe = log_probe_axis(0.1, 5.0, 60)
surface = diagnostics.estimate().surface(probe, probe)
```
"""

from mellin_volatility.config import (
    DEFAULT_ORACLE_SELECTION as DEFAULT_ORACLE_SELECTION,
)
from mellin_volatility.config import (
    CIRParams as CIRParams,
)
from mellin_volatility.config import (
    MCConfig as MCConfig,
)
from mellin_volatility.config import (
    OUParams as OUParams,
)
from mellin_volatility.config import (
    PathConfig as PathConfig,
)
from mellin_volatility.config import (
    RunConfig as RunConfig,
)
from mellin_volatility.config import (
    SelectionConfig as SelectionConfig,
)
from mellin_volatility.config import (
    log_probe_axis as log_probe_axis,
)
from mellin_volatility.config import (
    theorem_rate_delta as theorem_rate_delta,
)
from mellin_volatility.estimator import (
    CandidateScore as CandidateScore,
)
from mellin_volatility.estimator import (
    EstimateHandle as EstimateHandle,
)
from mellin_volatility.estimator import (
    SelectionDiagnostics as SelectionDiagnostics,
)
from mellin_volatility.estimator import (
    build_estimate as build_estimate,
)
from mellin_volatility.estimator import (
    candidate_grid as candidate_grid,
)
from mellin_volatility.estimator import (
    estimate_norm_sq as estimate_norm_sq,
)
from mellin_volatility.estimator import (
    evaluate_clipped as evaluate_clipped,
)
from mellin_volatility.estimator import (
    evaluate_density as evaluate_density,
)
from mellin_volatility.estimator import (
    evaluate_surface as evaluate_surface,
)
from mellin_volatility.estimator import (
    penalty as penalty,
)
from mellin_volatility.estimator import (
    restrict as restrict,
)
from mellin_volatility.estimator import (
    select_cutoff as select_cutoff,
)
from mellin_volatility.estimator import (
    truth_approximation as truth_approximation,
)
from mellin_volatility.evaluation import (
    IseSummary as IseSummary,
)
from mellin_volatility.evaluation import (
    MCResult as MCResult,
)
from mellin_volatility.evaluation import (
    ReplicationResult as ReplicationResult,
)
from mellin_volatility.evaluation import (
    SectionTrace as SectionTrace,
)
from mellin_volatility.evaluation import (
    ise_against_truth as ise_against_truth,
)
from mellin_volatility.evaluation import (
    median_surface as median_surface,
)
from mellin_volatility.evaluation import (
    oracle_cutoff as oracle_cutoff,
)
from mellin_volatility.evaluation import (
    run_monte_carlo as run_monte_carlo,
)
from mellin_volatility.evaluation import (
    run_replication as run_replication,
)
from mellin_volatility.evaluation import (
    section_trace as section_trace,
)
from mellin_volatility.exceptions import (
    AdmissibilityError as AdmissibilityError,
)
from mellin_volatility.exceptions import (
    DivergentIntegralError as DivergentIntegralError,
)
from mellin_volatility.exceptions import (
    DomainError as DomainError,
)
from mellin_volatility.exceptions import (
    EmptyCandidateGridError as EmptyCandidateGridError,
)
from mellin_volatility.exceptions import (
    MellinVolatilityError as MellinVolatilityError,
)
from mellin_volatility.exceptions import (
    NumericalDiagnosticError as NumericalDiagnosticError,
)
from mellin_volatility.exceptions import (
    ObservationParseError as ObservationParseError,
)
from mellin_volatility.exceptions import (
    PoleError as PoleError,
)
from mellin_volatility.exceptions import (
    ReplicationError as ReplicationError,
)
from mellin_volatility.exceptions import (
    ShapeMismatchError as ShapeMismatchError,
)
from mellin_volatility.exceptions import (
    StationarityError as StationarityError,
)
from mellin_volatility.exceptions import (
    UnknownPresetError as UnknownPresetError,
)
from mellin_volatility.mellin import (
    empirical_mellin as empirical_mellin,
)
from mellin_volatility.mellin import (
    empirical_mellin_grid as empirical_mellin_grid,
)
from mellin_volatility.mellin import (
    inverse_mellin_cutoff as inverse_mellin_cutoff,
)
from mellin_volatility.mellin import (
    inverse_mellin_surface as inverse_mellin_surface,
)
from mellin_volatility.mellin import (
    plancherel_norm_sq as plancherel_norm_sq,
)
from mellin_volatility.mellin import (
    weighted_l2_norm_sq_xspace as weighted_l2_norm_sq_xspace,
)
from mellin_volatility.noise import (
    NoiseModel as NoiseModel,
)
from mellin_volatility.noise import (
    lambda_g as lambda_g,
)
from mellin_volatility.noise import (
    lambda_g_quadrature as lambda_g_quadrature,
)
from mellin_volatility.noise import (
    mellin_g as mellin_g,
)
from mellin_volatility.noise import (
    mellin_g_abs2_inv as mellin_g_abs2_inv,
)
from mellin_volatility.noise import (
    mellin_g_grid as mellin_g_grid,
)
from mellin_volatility.processes import (
    generate_observations as generate_observations,
)
from mellin_volatility.processes import (
    integrated_volatility as integrated_volatility,
)
from mellin_volatility.processes import (
    simulate_cir as simulate_cir,
)
from mellin_volatility.processes import (
    simulate_exp_cir as simulate_exp_cir,
)
from mellin_volatility.processes import (
    simulate_exp_ou as simulate_exp_ou,
)
from mellin_volatility.processes import (
    simulate_path as simulate_path,
)
from mellin_volatility.processes import (
    solve_stationary_covariance as solve_stationary_covariance,
)
from mellin_volatility.processes import (
    stationary_cov_ou as stationary_cov_ou,
)
from mellin_volatility.protocols import (
    DensitySource as DensitySource,
)
from mellin_volatility.registry import (
    Preset as Preset,
)
from mellin_volatility.registry import (
    PresetRegistry as PresetRegistry,
)
from mellin_volatility.registry import (
    default_registry as default_registry,
)
from mellin_volatility.special import (
    gamma_half_line_abs2 as gamma_half_line_abs2,
)
from mellin_volatility.special import (
    log_gamma_complex as log_gamma_complex,
)
from mellin_volatility.truth import (
    TailConfig as TailConfig,
)
from mellin_volatility.truth import (
    TruthSpec as TruthSpec,
)
from mellin_volatility.truth import (
    bias_norm_sq as bias_norm_sq,
)
from mellin_volatility.truth import (
    density_at as density_at,
)
from mellin_volatility.truth import (
    mellin_at as mellin_at,
)
from mellin_volatility.truth import (
    norm_sq as norm_sq,
)
from mellin_volatility.truth import (
    truth_for_process as truth_for_process,
)
from mellin_volatility.types import (
    CutoffRect as CutoffRect,
)
from mellin_volatility.types import (
    DevelopmentPoint as DevelopmentPoint,
)
from mellin_volatility.types import (
    DevelopmentPointWarning as DevelopmentPointWarning,
)
from mellin_volatility.types import (
    FellerConditionWarning as FellerConditionWarning,
)
from mellin_volatility.types import (
    FrequencyGrid as FrequencyGrid,
)
from mellin_volatility.types import (
    NoiseKind as NoiseKind,
)
from mellin_volatility.types import (
    ObservationSet as ObservationSet,
)
from mellin_volatility.types import (
    PathBundle as PathBundle,
)
from mellin_volatility.types import (
    ProcessKind as ProcessKind,
)
from mellin_volatility.types import (
    SelectionMode as SelectionMode,
)
from mellin_volatility.types import (
    TruthKind as TruthKind,
)

__all__ = [
    # Types
    "DevelopmentPoint",
    "CutoffRect",
    "FrequencyGrid",
    "ObservationSet",
    "PathBundle",
    "ProcessKind",
    "NoiseKind",
    "TruthKind",
    "SelectionMode",
    "DevelopmentPointWarning",
    "FellerConditionWarning",
    # Protocols
    "DensitySource",
    # Configuration
    "OUParams",
    "CIRParams",
    "PathConfig",
    "SelectionConfig",
    "MCConfig",
    "RunConfig",
    "DEFAULT_ORACLE_SELECTION",
    "theorem_rate_delta",
    "log_probe_axis",
    # Registry
    "Preset",
    "PresetRegistry",
    "default_registry",
    # Special functions
    "log_gamma_complex",
    "gamma_half_line_abs2",
    # Mellin transforms
    "empirical_mellin",
    "empirical_mellin_grid",
    "inverse_mellin_cutoff",
    "inverse_mellin_surface",
    "plancherel_norm_sq",
    "weighted_l2_norm_sq_xspace",
    # Noise
    "NoiseModel",
    "mellin_g",
    "mellin_g_grid",
    "mellin_g_abs2_inv",
    "lambda_g",
    "lambda_g_quadrature",
    # Estimator
    "EstimateHandle",
    "CandidateScore",
    "SelectionDiagnostics",
    "build_estimate",
    "restrict",
    "evaluate_density",
    "evaluate_surface",
    "evaluate_clipped",
    "estimate_norm_sq",
    "truth_approximation",
    "candidate_grid",
    "penalty",
    "select_cutoff",
    # Processes
    "simulate_exp_ou",
    "simulate_cir",
    "simulate_exp_cir",
    "simulate_path",
    "integrated_volatility",
    "generate_observations",
    "solve_stationary_covariance",
    "stationary_cov_ou",
    # Truths
    "TruthSpec",
    "TailConfig",
    "density_at",
    "mellin_at",
    "bias_norm_sq",
    "norm_sq",
    "truth_for_process",
    # Evaluation
    "ReplicationResult",
    "MCResult",
    "IseSummary",
    "SectionTrace",
    "ise_against_truth",
    "oracle_cutoff",
    "median_surface",
    "section_trace",
    "run_replication",
    "run_monte_carlo",
    # Exceptions
    "MellinVolatilityError",
    "PoleError",
    "DomainError",
    "AdmissibilityError",
    "ShapeMismatchError",
    "StationarityError",
    "EmptyCandidateGridError",
    "ObservationParseError",
    "UnknownPresetError",
    "NumericalDiagnosticError",
    "DivergentIntegralError",
    "ReplicationError",
    # Version
    "__version__",
]

from importlib.metadata import version

__version__ = version("mellin-volatility")
