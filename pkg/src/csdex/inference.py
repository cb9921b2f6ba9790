"""Plug-in variance for the exponent estimate and confidence intervals.

The asymptotic variance has two parts.  The first comes from loading
dispersion: the spread, across the ``n`` strong sections, of each
section's covariance with the lagged partial average.  The second is the
long-run variance of the per-time products behind the partial-average
autocovariance, truncated at a lag ``ell`` that grows slowly with T.

The interval is symmetric on the exponent scale:

    alpha +- ln(1 + z * 4 * sigma_sq / (kappa * sqrt(v))) / (2 ln N)

with ``v = min(cutoff, T - tau)``.  An asymmetric variant that inverts the
limit distribution directly (using ``2 * sigma`` in place of
``4 * sigma_sq``) is reported in the diagnostics for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from scipy.stats import norm

from .errors import (
    CiUndefinedError,
    DegenerateDataError,
    InvalidLagError,
    InvalidTruncationError,
)
from .moments import partial_mean, per_time_products
from .panel import Panel, v_nt
from .estimators import cutoff_for_alpha

__all__ = [
    "VarianceEstimate",
    "ConfidenceInterval",
    "default_truncation_lag",
    "sigma_part1",
    "sigma_part2",
    "sigma_tau_sq",
    "confidence_interval",
]


@dataclass(frozen=True)
class VarianceEstimate:
    """The two-part variance estimate and the tuning constants it used."""

    part1: float
    part2: float
    total: float
    truncation_ell: int
    cutoff_n: int
    v_nt: int


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    z_quantile: float
    diagnostics: Dict[str, Any] = field(default_factory=dict)


def default_truncation_lag(t: int, tau: int) -> int:
    """Truncation lag floor((T - tau)**(1/3)), clipped to the legal range."""
    ell = int(math.floor((t - tau) ** (1.0 / 3.0)))
    return max(0, min(ell, t - tau - 2))


def sigma_part1(panel: Panel, cutoff_n: int, tau: int) -> float:
    """Loading-dispersion part: 4 * (v/n) * variance over sections i <= n of
    the section-vs-lagged-partial-average covariance."""
    if cutoff_n < 2:
        raise DegenerateDataError(
            f"need at least 2 sections to form a variance, got cutoff {cutoff_n}"
        )
    if cutoff_n > panel.n_sections:
        raise DegenerateDataError(
            f"cutoff {cutoff_n} exceeds panel sections {panel.n_sections}"
        )
    t = panel.n_times
    if not 0 <= tau <= t - 2:
        raise InvalidLagError(f"lag {tau} out of range for T={t}")
    window = t - tau
    lead = panel.data[:cutoff_n, :window]
    lagged = partial_mean(panel, cutoff_n).values[tau:]
    lead_centered = lead - lead.mean(axis=1, keepdims=True)
    lag_centered = lagged - lagged.mean()
    per_section = lead_centered @ lag_centered / window
    spread = float(per_section.var(ddof=1))
    v = v_nt(cutoff_n, t, tau)
    return 4.0 * v / cutoff_n * spread


def sigma_part2(panel: Panel, cutoff_n: int, tau: int, ell: int) -> float:
    """Serial-correlation part: (v/(T-tau)) times the truncated long-run
    variance of the per-time products, with flat (untapered) weights."""
    t = panel.n_times
    window = t - tau
    if not 0 <= ell <= window - 2:
        raise InvalidTruncationError(
            f"truncation {ell} out of range 0..{window - 2}"
        )
    products = per_time_products(panel, cutoff_n, tau)
    centered = products - products.mean()
    long_run = float(centered @ centered) / (window - 1)
    for j in range(1, ell + 1):
        long_run += 2.0 / (window - j) * float(centered[:-j] @ centered[j:])
    v = v_nt(cutoff_n, t, tau)
    return v / window * long_run


def sigma_tau_sq(
    panel: Panel,
    alpha_hat: float,
    tau: int,
    ell: Optional[int] = None,
) -> VarianceEstimate:
    """Two-part variance estimate at the cutoff implied by ``alpha_hat``."""
    cutoff = cutoff_for_alpha(panel.n_sections, alpha_hat)
    if cutoff < 2:
        raise DegenerateDataError(
            f"alpha {alpha_hat:.4f} implies cutoff {cutoff} < 2; "
            "variance estimate undefined"
        )
    if ell is None:
        ell = default_truncation_lag(panel.n_times, tau)
    part1 = sigma_part1(panel, cutoff, tau)
    part2 = sigma_part2(panel, cutoff, tau, ell)
    return VarianceEstimate(
        part1=part1,
        part2=part2,
        total=part1 + part2,
        truncation_ell=ell,
        cutoff_n=cutoff,
        v_nt=v_nt(cutoff, panel.n_times, tau),
    )


def confidence_interval(
    alpha_tilde: float,
    kappa_tilde: float,
    sigma_sq: float,
    n_sections: int,
    t: int,
    tau: int,
    level: float = 0.90,
) -> ConfidenceInterval:
    """Symmetric interval for the exponent at the given confidence level.

    ``z`` is the upper (1-level)/2 normal quantile.  Raises
    :class:`CiUndefinedError` when the log argument is non-positive (large
    negative kappa), and flags rather than hides a negative half-width
    (small negative kappa).
    """
    if kappa_tilde == 0.0:
        raise CiUndefinedError("kappa is zero; interval undefined")
    if sigma_sq < 0.0:
        raise ValueError(f"sigma_sq must be >= 0, got {sigma_sq}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    z = float(norm.ppf(1.0 - (1.0 - level) / 2.0))
    v = v_nt(cutoff_for_alpha(n_sections, alpha_tilde), t, tau)
    ratio = z * 4.0 * sigma_sq / (kappa_tilde * math.sqrt(v))
    argument = 1.0 + ratio
    if argument <= 0.0:
        raise CiUndefinedError(
            f"interval log argument {argument:.4g} <= 0 (kappa={kappa_tilde:.4g})"
        )
    half_width = math.log(argument) / (2.0 * math.log(n_sections))
    lower = alpha_tilde - half_width
    upper = alpha_tilde + half_width
    diagnostics: Dict[str, Any] = {
        "half_width": half_width,
        "negative_half_width": half_width < 0.0,
        "v_nt": v,
    }
    # direct inversion of the limit law: asymmetric, uses 2*sigma not 4*sigma^2
    sigma = math.sqrt(sigma_sq)
    plus = 1.0 + z * 2.0 * sigma / (kappa_tilde * math.sqrt(v))
    minus = 1.0 - z * 2.0 * sigma / (kappa_tilde * math.sqrt(v))
    if plus > 0.0 and minus > 0.0:
        bound_a = alpha_tilde - math.log(plus) / (2.0 * math.log(n_sections))
        bound_b = alpha_tilde - math.log(minus) / (2.0 * math.log(n_sections))
        diagnostics["exact_inversion"] = (
            min(bound_a, bound_b),
            max(bound_a, bound_b),
        )
    else:
        diagnostics["exact_inversion"] = None
    return ConfidenceInterval(
        lower=min(lower, upper),
        upper=max(lower, upper),
        level=level,
        z_quantile=z,
        diagnostics=diagnostics,
    )
