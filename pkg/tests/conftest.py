"""Shared fixtures and independent brute-force oracles.

The oracles translate every estimator formula into plain Python loops with
exact summation; they share no code path with the package internals, so
agreement is evidence and not tautology.
"""

import math

import numpy as np
import pytest

from csdex import Panel


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_panel(rng, n, t, scale=1.0):
    return Panel(scale * rng.standard_normal((n, t)))


# ---------------------------------------------------------------- oracles


def oracle_partial_mean(data, n):
    _, t = data.shape
    return [math.fsum(data[i][s] for i in range(n)) / n for s in range(t)]


def oracle_autocov(data, n, tau):
    """Literal windowed autocovariance of the partial average."""
    xbar = oracle_partial_mean(np.asarray(data, dtype=float), n)
    t = len(xbar)
    w = t - tau
    lead = xbar[:w]
    lag = xbar[tau:]
    m1 = math.fsum(lead) / w
    m2 = math.fsum(lag) / w
    return math.fsum((lead[s] - m1) * (lag[s] - m2) for s in range(w)) / w


def oracle_section_cov(data, i, n, tau):
    data = np.asarray(data, dtype=float)
    t = data.shape[1]
    w = t - tau
    row = data[i - 1]
    m_row = math.fsum(row[:w]) / w
    xbar = oracle_partial_mean(data, n)
    lag = xbar[tau:]
    m_lag = math.fsum(lag) / w
    return math.fsum((row[s] - m_row) * (lag[s] - m_lag) for s in range(w)) / w


def oracle_per_time_products(data, n, tau):
    data = np.asarray(data, dtype=float)
    xbar = oracle_partial_mean(data, n)
    t = len(xbar)
    w = t - tau
    lead = xbar[:w]
    lag = xbar[tau:]
    m1 = math.fsum(lead) / w
    m2 = math.fsum(lag) / w
    return [(lead[s] - m1) * (lag[s] - m2) for s in range(w)]


def oracle_joint_objective(sigma, cutoff, kappa):
    """Literal piecewise weighted sum of squares over the whole profile."""
    total = 0.0
    n_sections = len(sigma)
    for n in range(1, cutoff + 1):
        total += n**3 * (sigma[n - 1] - kappa) ** 2
    for n in range(cutoff + 1, n_sections + 1):
        total += n**3 * (sigma[n - 1] - cutoff**2 * kappa / n**2) ** 2
    return total


def oracle_profile(data, tau):
    data = np.asarray(data, dtype=float)
    return [oracle_autocov(data, n, tau) for n in range(1, data.shape[0] + 1)]


def oracle_exhaustive_joint(data, tau, kappa_tol=1e-6):
    """Global minimizer of the piecewise objective over every cutoff and a
    refined kappa grid; ties go to the smallest cutoff."""
    sigma = oracle_profile(data, tau)
    n_sections = len(sigma)
    best = None
    for cutoff in range(1, n_sections + 1):
        center = 0.0
        spacing = max(1.0, 4.0 * max(abs(s) for s in sigma)) / 10.0
        while True:
            grid = [center + j * spacing for j in range(-40, 41)]
            values = [oracle_joint_objective(sigma, cutoff, k) for k in grid]
            idx = min(range(len(grid)), key=values.__getitem__)
            center = grid[idx]
            if spacing < kappa_tol / 10.0:
                break
            spacing /= 10.0
        q = oracle_joint_objective(sigma, cutoff, center)
        if best is None or q < best[0] - 1e-14 * abs(best[0]):
            best = (q, cutoff, center)
    return best  # (objective, cutoff, kappa)


def numeric_parabolic_min(f, x0=0.0, h=1.0, steps=3):
    """Numeric 1-D minimizer by parabolic interpolation.

    Exact (to float algebra) for quadratic objectives, which comparison-only
    searches such as golden section can localize only to about
    sqrt(machine eps) times the curvature scale.
    """
    x = x0
    for _ in range(steps):
        f_minus, f_center, f_plus = f(x - h), f(x), f(x + h)
        denom = f_plus - 2.0 * f_center + f_minus
        if denom <= 0.0:
            raise ArithmeticError("objective is not locally convex")
        x = x - h * (f_plus - f_minus) / (2.0 * denom)
        h *= 0.25
    return x


def numeric_golden_min(f, lo, hi, iterations=120):
    """Plain golden-section minimization on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iterations):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def oracle_sigma_part1(data, cutoff, tau):
    data = np.asarray(data, dtype=float)
    t = data.shape[1]
    w = t - tau
    v = min(cutoff, w)
    covs = [oracle_section_cov(data, i, cutoff, tau) for i in range(1, cutoff + 1)]
    mean_cov = math.fsum(covs) / cutoff
    spread = math.fsum((c - mean_cov) ** 2 for c in covs) / (cutoff - 1)
    return 4.0 * v / cutoff * spread


def oracle_sigma_part2(data, cutoff, tau, ell):
    data = np.asarray(data, dtype=float)
    t = data.shape[1]
    w = t - tau
    v = min(cutoff, w)
    products = oracle_per_time_products(data, cutoff, tau)
    sigma_n = math.fsum(products) / w
    deviations = [p - sigma_n for p in products]
    long_run = math.fsum(d * d for d in deviations) / (w - 1)
    for j in range(1, ell + 1):
        long_run += (
            2.0
            / (w - j)
            * math.fsum(deviations[s] * deviations[s + j] for s in range(w - j))
        )
    return v / w * long_run
