"""Seeded factor-model panel simulators and their population constants.

A simulated panel is ``x = mu + loadings @ factors' + errors``.  Loadings
have a block of "strong" rows drawn i.i.d. from a uniform law, followed by
a deterministic geometric tail (``tail_decay**(i - M)``) that can be
switched off by setting the decay to zero.  Factors follow either AR(1)
recursions (one coefficient per factor, burn-in from a zero state) or a
shared MA(q) filter.  Error processes cover the benchmark designs:
independent normals, an AR(1) common shock scaled per section, and an
MA(2) common shock scaled per section or per cell.

Randomness is split into three independent streams (loadings, factors,
errors) keyed by the spec seed, so draws are reproducible and replications
can run in parallel without sequence coupling.

The presets ``example1_spec`` / ``example2_spec`` / ``example3_spec``
encode the three benchmark designs used by the Monte Carlo tables; see the
README for the conventions they pin down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple, Union

import numpy as np
from scipy.signal import lfilter

from .errors import NoClosedFormError, NonstationaryError
from .panel import Panel, bracket_pow, bracket_pow_round

__all__ = [
    "LoadingLaw",
    "Ar1Factors",
    "MaFactors",
    "IidErrors",
    "Ar1Errors",
    "Ma2Errors",
    "DgpSpec",
    "FactorPanelDraw",
    "KappaTrue",
    "strong_section_count",
    "gen_loadings",
    "gen_factors",
    "gen_errors",
    "simulate_panel",
    "kappa_true",
    "example1_spec",
    "example2_spec",
    "example3_spec",
]

_STREAM_LOADINGS = 0
_STREAM_FACTORS = 1
_STREAM_ERRORS = 2


@dataclass(frozen=True)
class LoadingLaw:
    """Strong-part distribution plus the geometric tail of weak loadings.

    ``strong_count_mode`` picks how many strong rows ``N**alpha0`` buys:
    "round" (nearest integer) or "floor" (integer part).
    """

    low: float = 0.5
    high: float = 1.5
    tail_decay: float = 0.0
    strong_count_mode: str = "round"

    def __post_init__(self):
        if not self.low <= self.high:
            raise ValueError("loading law needs low <= high")
        if not 0.0 <= self.tail_decay < 1.0:
            raise ValueError("tail_decay must be in [0, 1)")
        if self.strong_count_mode not in ("round", "floor"):
            raise ValueError("strong_count_mode must be 'round' or 'floor'")

    @property
    def mean(self) -> float:
        return 0.5 * (self.low + self.high)

    @property
    def variance(self) -> float:
        return (self.high - self.low) ** 2 / 12.0


@dataclass(frozen=True)
class Ar1Factors:
    """One AR(1) recursion per factor, standard-normal innovations."""

    rho: Tuple[float, ...] = (0.9, 0.9)

    def __post_init__(self):
        if any(abs(r) >= 1.0 for r in self.rho):
            raise NonstationaryError(f"AR(1) coefficients must satisfy |rho| < 1: {self.rho}")

    @property
    def num_factors(self) -> int:
        return len(self.rho)


@dataclass(frozen=True)
class MaFactors:
    """Shared MA(q) filter for every factor, standard-normal innovations."""

    theta: Tuple[float, ...] = (0.8, 0.6)
    num_factors: int = 2

    def __post_init__(self):
        if len(self.theta) < 1:
            raise ValueError("MA factors need at least one coefficient")
        if self.num_factors < 1:
            raise ValueError("need at least one factor")


@dataclass(frozen=True)
class IidErrors:
    scale: float = 1.0


@dataclass(frozen=True)
class Ar1Errors:
    """Common AR(1) shock ``g_t`` scaled by a per-section normal draw."""

    h: float = 0.2

    def __post_init__(self):
        if abs(self.h) >= 1.0:
            raise NonstationaryError(f"error AR(1) coefficient must satisfy |h| < 1: {self.h}")


@dataclass(frozen=True)
class Ma2Errors:
    """Common MA(2) shock, scaled per section or per cell.

    ``eta_mode="per_section"`` multiplies the shared shock by one normal
    draw per section (perfectly cross-sectionally correlated errors);
    ``"per_cell"`` redraws the scale for every observation, which leaves
    the errors serially uncorrelated.
    """

    h1: float = 0.2
    h2: float = 0.05
    eta_mode: str = "per_section"

    def __post_init__(self):
        if self.eta_mode not in ("per_section", "per_cell"):
            raise ValueError("eta_mode must be 'per_section' or 'per_cell'")


FactorProcess = Union[Ar1Factors, MaFactors]
ErrorProcess = Union[IidErrors, Ar1Errors, Ma2Errors]


@dataclass(frozen=True)
class DgpSpec:
    """Complete declarative description of one simulated panel design."""

    n_sections: int
    n_times: int
    alpha0: float
    mu: float = 1.0
    loading_law: LoadingLaw = field(default_factory=LoadingLaw)
    factor_process: FactorProcess = field(default_factory=Ar1Factors)
    error_process: ErrorProcess = field(default_factory=IidErrors)
    burn_in: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.n_sections < 2 or self.n_times < 2:
            raise ValueError("need N >= 2 and T >= 2")
        if not 0.0 < self.alpha0 <= 1.0:
            raise ValueError(f"alpha0 must be in (0, 1], got {self.alpha0}")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if not 0 <= self.seed < 2**63:
            raise ValueError("seed must be a nonnegative 63-bit integer")

    @property
    def num_factors(self) -> int:
        return self.factor_process.num_factors

    def with_seed(self, seed: int) -> "DgpSpec":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class FactorPanelDraw:
    """One simulated panel with the pieces that built it."""

    panel: Panel
    loadings: np.ndarray
    factors: np.ndarray
    errors: np.ndarray
    spec: DgpSpec
    seed: int


@dataclass(frozen=True)
class KappaTrue:
    value: float
    tau: int


def _stream(spec: DgpSpec, role: int) -> np.random.Generator:
    return np.random.default_rng([spec.seed, role])


def strong_section_count(spec: DgpSpec) -> int:
    n, a = spec.n_sections, spec.alpha0
    if spec.loading_law.strong_count_mode == "floor":
        count = int(bracket_pow(n, a))
    else:
        count = bracket_pow_round(n, a)
    return min(max(count, 1), n)


def gen_loadings(spec: DgpSpec, rng: np.random.Generator) -> np.ndarray:
    """N x m loading matrix: strong uniform block, then geometric tail."""
    n, m = spec.n_sections, spec.num_factors
    law = spec.loading_law
    strong = strong_section_count(spec)
    loadings = np.zeros((n, m))
    loadings[:strong] = rng.uniform(law.low, law.high, size=(strong, m))
    if strong < n and law.tail_decay > 0.0:
        tail = law.tail_decay ** np.arange(1, n - strong + 1, dtype=float)
        loadings[strong:] = tail[:, None]
    return loadings


def gen_factors(spec: DgpSpec, rng: np.random.Generator) -> np.ndarray:
    """T x m factor matrix.

    AR(1): recursion from a zero state ``burn_in`` steps before the sample.
    MA(q): filter of standard normals with q pre-period innovations.
    """
    t, m = spec.n_times, spec.num_factors
    process = spec.factor_process
    if isinstance(process, Ar1Factors):
        total = t + spec.burn_in
        shocks = rng.standard_normal((m, total))
        out = np.empty((m, total))
        for j, rho in enumerate(process.rho):
            out[j] = lfilter([1.0], [1.0, -rho], shocks[j])
        return out[:, spec.burn_in:].T
    if isinstance(process, MaFactors):
        q = len(process.theta)
        shocks = rng.standard_normal((m, t + q))
        coeffs = np.concatenate(([1.0], np.asarray(process.theta)))
        out = lfilter(coeffs, [1.0], shocks, axis=1)[:, q:]
        return out.T
    raise TypeError(f"unknown factor process {type(process).__name__}")


def gen_errors(spec: DgpSpec, rng: np.random.Generator) -> np.ndarray:
    """N x T idiosyncratic error matrix."""
    n, t = spec.n_sections, spec.n_times
    process = spec.error_process
    if isinstance(process, IidErrors):
        return process.scale * rng.standard_normal((n, t))
    if isinstance(process, Ar1Errors):
        total = t + spec.burn_in
        g = lfilter([1.0], [1.0, -process.h], rng.standard_normal(total))
        g = g[spec.burn_in:]
        eta = rng.standard_normal(n)
        return np.outer(eta, g)
    if isinstance(process, Ma2Errors):
        shocks = rng.standard_normal(t + 2)
        coeffs = np.array([1.0, process.h1, process.h2])
        g = lfilter(coeffs, [1.0], shocks)[2:]
        if process.eta_mode == "per_section":
            eta = rng.standard_normal(n)
            return np.outer(eta, g)
        eta = rng.standard_normal((n, t))
        return eta * g[None, :]
    raise TypeError(f"unknown error process {type(process).__name__}")


def simulate_panel(spec: DgpSpec) -> FactorPanelDraw:
    """Draw one panel; deterministic given the spec (seed included)."""
    loadings = gen_loadings(spec, _stream(spec, _STREAM_LOADINGS))
    factors = gen_factors(spec, _stream(spec, _STREAM_FACTORS))
    errors = gen_errors(spec, _stream(spec, _STREAM_ERRORS))
    data = spec.mu + loadings @ factors.T + errors
    return FactorPanelDraw(
        panel=Panel(data),
        loadings=loadings,
        factors=factors,
        errors=errors,
        spec=spec,
        seed=spec.seed,
    )


def _ma_autocov(theta: Tuple[float, ...], tau: int) -> float:
    coeffs = (1.0,) + tuple(theta)
    q = len(coeffs) - 1
    if tau > q:
        return 0.0
    return float(sum(coeffs[k] * coeffs[k + tau] for k in range(q - tau + 1)))


def kappa_true(spec: DgpSpec, tau: int) -> KappaTrue:
    """Population factor-autocovariance constant of the design at lag tau.

    Equals ``mu_v**2`` times the summed lag-tau autocovariances of the
    factors: AR(1) gives ``rho**tau / (1 - rho**2)`` per factor, MA(q) the
    coefficient convolution (zero beyond the order).
    """
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    mu_v = spec.loading_law.mean
    process = spec.factor_process
    if isinstance(process, Ar1Factors):
        gamma = sum(r**tau / (1.0 - r * r) for r in process.rho)
    elif isinstance(process, MaFactors):
        gamma = process.num_factors * _ma_autocov(process.theta, tau)
    else:
        raise NoClosedFormError(
            f"no closed-form autocovariance for {type(process).__name__}"
        )
    return KappaTrue(value=mu_v * mu_v * float(gamma), tau=tau)


def example1_spec(
    n_sections: int = 200,
    n_times: int = 200,
    alpha0: float = 0.8,
    seed: int = 0,
) -> DgpSpec:
    """Two AR(1) factors (rho 0.9), independent standard-normal errors."""
    return DgpSpec(
        n_sections=n_sections,
        n_times=n_times,
        alpha0=alpha0,
        mu=1.0,
        loading_law=LoadingLaw(),
        factor_process=Ar1Factors((0.9, 0.9)),
        error_process=IidErrors(),
        burn_in=50,
        seed=seed,
    )


def example2_spec(
    n_sections: int = 400,
    n_times: int = 200,
    alpha0: float = 0.8,
    h: Optional[float] = 0.2,
    seed: int = 0,
) -> DgpSpec:
    """Like example 1 but with an AR(1) common error shock scaled per section.

    ``h=None`` uses the shrinking coefficient ``1/sqrt(N)``.
    """
    if h is None:
        h = 1.0 / math.sqrt(n_sections)
    return DgpSpec(
        n_sections=n_sections,
        n_times=n_times,
        alpha0=alpha0,
        mu=1.0,
        loading_law=LoadingLaw(),
        factor_process=Ar1Factors((0.9, 0.9)),
        error_process=Ar1Errors(h=h),
        burn_in=50,
        seed=seed,
    )


def example3_spec(
    n_sections: int = 400,
    n_times: int = 200,
    alpha0: float = 0.8,
    seed: int = 0,
) -> DgpSpec:
    """Two MA(2) factors (0.8, 0.6); MA(2) common shock with coefficients
    ``1/ln(N)`` and ``1/sqrt(N)``, rescaled by a fresh normal per cell."""
    return DgpSpec(
        n_sections=n_sections,
        n_times=n_times,
        alpha0=alpha0,
        mu=1.0,
        loading_law=LoadingLaw(),
        factor_process=MaFactors((0.8, 0.6), num_factors=2),
        error_process=Ma2Errors(
            h1=1.0 / math.log(n_sections),
            h2=1.0 / math.sqrt(n_sections),
            eta_mode="per_cell",
        ),
        burn_in=50,
        seed=seed,
    )
