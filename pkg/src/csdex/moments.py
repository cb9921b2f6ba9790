"""Autocovariances of partial cross-sectional averages.

Everything here works on the series ``xbar_{n,t}``, the average of the
first ``n`` sections of a panel at time ``t``.  The lag-tau autocovariance
of that series, swept over ``n = 1..N``, is the raw material for the
exponent estimators: its level is flat up to the number of strong sections
and then decays like ``1/n**2``.

Window convention: at lag tau the leading window is ``t = 1..T-tau`` and
the lagging window is ``t = tau+1..T``; each window is centered by its own
mean, and sums are divided by ``T - tau``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, InvalidCutoffError, InvalidLagError
from .panel import Panel

__all__ = [
    "PartialMeanSeries",
    "AutocovPanel",
    "partial_mean",
    "autocov_hat",
    "autocov_profile",
    "section_partial_cov",
    "per_time_products",
    "acf",
]


@dataclass(frozen=True)
class PartialMeanSeries:
    """Cross-sectional average of the first ``n`` sections, one value per time."""

    values: np.ndarray
    n: int


@dataclass(frozen=True)
class AutocovPanel:
    """Lag-``tau`` autocovariance of the partial average, for every cutoff n = 1..N."""

    sigma_hat: np.ndarray
    tau: int


def _check_cutoff(panel: Panel, n: int) -> None:
    if not 1 <= n <= panel.n_sections:
        raise InvalidCutoffError(
            f"cutoff {n} out of range 1..{panel.n_sections}"
        )


def _check_lag(panel: Panel, tau: int) -> None:
    if not 0 <= tau <= panel.n_times - 2:
        raise InvalidLagError(
            f"lag {tau} out of range 0..{panel.n_times - 2} for T={panel.n_times}"
        )


def partial_mean(panel: Panel, n: int) -> PartialMeanSeries:
    """Average of the first ``n`` sections at each time."""
    _check_cutoff(panel, n)
    values = panel.data[:n].mean(axis=0)
    return PartialMeanSeries(values=values, n=n)


def autocov_hat(panel: Panel, n: int, tau: int) -> float:
    """Lag-``tau`` sample autocovariance of the partial average over ``n`` sections.

    The leading and lagging windows are demeaned separately and the divisor
    is ``T - tau``.
    """
    _check_lag(panel, tau)
    series = partial_mean(panel, n).values
    return _window_autocov(series, tau)


def _window_autocov(series: np.ndarray, tau: int) -> float:
    t = series.shape[0]
    lead = series[: t - tau]
    lag = series[tau:]
    return float((lead - lead.mean()) @ (lag - lag.mean()) / (t - tau))


def autocov_profile(panel: Panel, tau: int) -> AutocovPanel:
    """``autocov_hat`` for every cutoff n = 1..N in one O(N*T) sweep.

    Prefix sums over sections are accumulated in extended precision so the
    per-cutoff values match independent recomputation to 1e-12 relative.
    """
    _check_lag(panel, tau)
    n_sections, t = panel.shape
    counts = np.arange(1, n_sections + 1, dtype=np.longdouble)
    prefix = np.cumsum(panel.data.astype(np.longdouble), axis=0)
    means = prefix / counts[:, None]
    lead = means[:, : t - tau]
    lag = means[:, tau:]
    lead = lead - lead.mean(axis=1, keepdims=True)
    lag = lag - lag.mean(axis=1, keepdims=True)
    sigma = (lead * lag).mean(axis=1).astype(float)
    return AutocovPanel(sigma_hat=sigma, tau=tau)


def section_partial_cov(panel: Panel, i: int, n: int, tau: int) -> float:
    """Covariance between section ``i`` and the lagged partial average.

    Both the section's leading window and the partial average's lagging
    window are centered by their own means; the divisor is ``T - tau``.
    """
    _check_cutoff(panel, i)
    _check_cutoff(panel, n)
    _check_lag(panel, tau)
    t = panel.n_times
    section = panel.data[i - 1, : t - tau]
    lagged = partial_mean(panel, n).values[tau:]
    return float(
        (section - section.mean()) @ (lagged - lagged.mean()) / (t - tau)
    )


def per_time_products(panel: Panel, n: int, tau: int) -> np.ndarray:
    """Per-time products of the centered leading and lagging partial averages.

    The mean of the returned sequence equals ``autocov_hat(panel, n, tau)``.
    """
    _check_lag(panel, tau)
    series = partial_mean(panel, n).values
    t = series.shape[0]
    lead = series[: t - tau]
    lag = series[tau:]
    return (lead - lead.mean()) * (lag - lag.mean())


def acf(series, max_lag: int) -> np.ndarray:
    """Sample autocorrelation at lags 0..max_lag (grand-mean, 1/T norm)."""
    x = np.asarray(series, dtype=float).ravel()
    t = x.shape[0]
    if max_lag < 0:
        raise ValueError(f"max_lag must be >= 0, got {max_lag}")
    if t < max_lag + 2:
        raise ValueError(
            f"series of length {t} too short for max_lag={max_lag}"
        )
    centered = x - x.mean()
    denom = centered @ centered / t
    if denom == 0.0:
        raise DegenerateDataError("series has zero sample variance")
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for h in range(1, max_lag + 1):
        out[h] = (centered[:-h] @ centered[h:] / t) / denom
    return out
