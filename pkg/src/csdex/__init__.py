"""Cross-sectional dependence exponent estimation for large panels.

An N x T panel whose sections load on common factors carries a footprint
of how many sections the factors reach: the autocovariance of the average
of the first n sections stays level up to the number of strongly loaded
sections and decays like 1/n**2 beyond it.  This package estimates the
exponent that parameterizes that count as N**alpha, with joint and
closed-form (known kappa) estimators, a plug-in asymptotic variance,
confidence intervals, a lag-selection rule, seeded factor-model
simulators, and a Monte Carlo harness.
"""

from .panel import (
    BracketPower,
    Panel,
    bracket_pow,
    bracket_pow_k,
    bracket_pow_round,
    bracket_shift,
    v_nt,
)
from .moments import (
    AutocovPanel,
    PartialMeanSeries,
    acf,
    autocov_hat,
    autocov_profile,
    partial_mean,
    per_time_products,
    section_partial_cov,
)
from .estimators import (
    EstimateResult,
    JointObjectiveParts,
    alpha_for_cutoff,
    concentrated_objective,
    cutoff_for_alpha,
    joint_estimate,
    joint_objective,
    joint_objective_parts,
    marginal_alpha,
    profiled_kappa,
    select_tau,
)
from .inference import (
    ConfidenceInterval,
    VarianceEstimate,
    confidence_interval,
    default_truncation_lag,
    sigma_part1,
    sigma_part2,
    sigma_tau_sq,
)
from .dgp import (
    Ar1Errors,
    Ar1Factors,
    DgpSpec,
    FactorPanelDraw,
    IidErrors,
    KappaTrue,
    LoadingLaw,
    Ma2Errors,
    MaFactors,
    example1_spec,
    example2_spec,
    example3_spec,
    gen_errors,
    gen_factors,
    gen_loadings,
    kappa_true,
    simulate_panel,
    strong_section_count,
)
from .montecarlo import McCellSummary, McConfig, McSummary, emit_table, run_mc, summary_to_json
from .io import (
    EmpiricalDiagnostics,
    PanelFile,
    SECTIONS_AS_COLUMNS,
    SECTIONS_AS_ROWS,
    defactor,
    read_panel,
    standardize,
    write_panel,
)
from . import errors

__version__ = "0.1.0"

__all__ = [
    "AutocovPanel",
    "Ar1Errors",
    "Ar1Factors",
    "BracketPower",
    "ConfidenceInterval",
    "DgpSpec",
    "EmpiricalDiagnostics",
    "EstimateResult",
    "FactorPanelDraw",
    "IidErrors",
    "JointObjectiveParts",
    "KappaTrue",
    "LoadingLaw",
    "Ma2Errors",
    "MaFactors",
    "McCellSummary",
    "McConfig",
    "McSummary",
    "Panel",
    "PanelFile",
    "PartialMeanSeries",
    "SECTIONS_AS_COLUMNS",
    "SECTIONS_AS_ROWS",
    "VarianceEstimate",
    "acf",
    "alpha_for_cutoff",
    "autocov_hat",
    "autocov_profile",
    "bracket_pow",
    "bracket_pow_k",
    "bracket_pow_round",
    "bracket_shift",
    "concentrated_objective",
    "confidence_interval",
    "cutoff_for_alpha",
    "default_truncation_lag",
    "defactor",
    "emit_table",
    "errors",
    "example1_spec",
    "example2_spec",
    "example3_spec",
    "gen_errors",
    "gen_factors",
    "gen_loadings",
    "joint_estimate",
    "joint_objective",
    "joint_objective_parts",
    "kappa_true",
    "marginal_alpha",
    "partial_mean",
    "per_time_products",
    "profiled_kappa",
    "read_panel",
    "run_mc",
    "section_partial_cov",
    "select_tau",
    "sigma_part1",
    "sigma_part2",
    "sigma_tau_sq",
    "simulate_panel",
    "standardize",
    "strong_section_count",
    "summary_to_json",
    "v_nt",
    "write_panel",
]
