"""Seeded replication harness for the exponent estimators.

Each replication draws a fresh panel (seed = base_seed + replication
index), runs the configured estimators at every lag in ``tau_list``,
attaches a confidence interval to each estimate, and optionally applies
the lag-selection rule over the same lags.  Aggregates are computed over
successful replications only; failures are counted, never hidden.

Replications are independent and can run in a process pool; records are
reduced in replication order, so parallel and serial runs emit identical
summaries.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .dgp import DgpSpec, kappa_true, simulate_panel
from .errors import CsdexError
from .estimators import joint_estimate, marginal_alpha, select_tau
from .inference import confidence_interval, sigma_tau_sq

__all__ = ["McConfig", "McCellSummary", "McSummary", "run_mc", "emit_table", "summary_to_json"]


@dataclass(frozen=True)
class McConfig:
    """One Monte Carlo experiment: a design, lags, and estimator flags.

    ``use_marginal`` runs the closed-form estimator with the design's true
    kappa at each lag; ``use_joint`` runs the profile fit; ``use_select``
    additionally applies the lag-selection rule over ``tau_list``.
    """

    spec: DgpSpec
    tau_list: Tuple[int, ...]
    replications: int = 500
    base_seed: int = 0
    ci_level: float = 0.90
    use_marginal: bool = True
    use_joint: bool = True
    use_select: bool = False
    truncation_ell: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if len(self.tau_list) == 0:
            raise ValueError("tau_list must be nonempty")
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError("ci_level must be in (0, 1)")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not (self.use_marginal or self.use_joint):
            raise ValueError("enable at least one of use_marginal, use_joint")
        object.__setattr__(self, "tau_list", tuple(int(t) for t in self.tau_list))


@dataclass(frozen=True)
class McCellSummary:
    """Aggregates for one (estimator, lag) pair."""

    method: str
    tau: int
    n_estimates: int
    mean: float
    sd: float
    median: float
    mean_ci_lower: float
    mean_ci_upper: float
    coverage: float
    n_ci: int
    n_out_of_range: int
    n_failed: int
    n_ci_failed: int


@dataclass(frozen=True)
class McSummary:
    """All aggregates of one configuration, plus failure bookkeeping."""

    config: McConfig
    cells: Dict[Tuple[str, int], McCellSummary]
    tau_mode: Optional[int] = None
    tau_counts: Optional[Dict[int, int]] = None
    failure_messages: Dict[str, int] = field(default_factory=dict)


def _estimate_record(panel, spec, method, tau, ci_level, ell) -> Dict[str, Any]:
    record: Dict[str, Any] = {
        "alpha": None,
        "covered": None,
        "ci": None,
        "out_of_range": False,
        "error": None,
        "ci_error": None,
    }
    try:
        if method == "marginal":
            result = marginal_alpha(panel, tau, kappa_true(spec, tau).value)
        else:
            result = joint_estimate(panel, tau)
    except CsdexError as exc:
        record["error"] = f"{type(exc).__name__}: {exc}"
        return record
    record["alpha"] = result.alpha
    record["out_of_range"] = bool(result.diagnostics.get("out_of_range", False))
    try:
        variance = sigma_tau_sq(panel, result.alpha, tau, ell)
        interval = confidence_interval(
            result.alpha,
            result.kappa,
            variance.total,
            panel.n_sections,
            panel.n_times,
            tau,
            level=ci_level,
        )
    except CsdexError as exc:
        record["ci_error"] = f"{type(exc).__name__}: {exc}"
        return record
    record["ci"] = (interval.lower, interval.upper)
    record["covered"] = bool(interval.lower <= spec.alpha0 <= interval.upper)
    return record


def _replicate(args) -> Tuple[int, Dict[str, Any]]:
    config, rep = args
    spec = config.spec.with_seed(config.base_seed + rep)
    panel = simulate_panel(spec).panel
    record: Dict[str, Any] = {"marginal": {}, "joint": {}, "selected_tau": None}
    for tau in config.tau_list:
        if config.use_marginal:
            record["marginal"][tau] = _estimate_record(
                panel, spec, "marginal", tau, config.ci_level, config.truncation_ell
            )
        if config.use_joint:
            record["joint"][tau] = _estimate_record(
                panel, spec, "joint", tau, config.ci_level, config.truncation_ell
            )
    if config.use_select:
        try:
            best_tau, _ = select_tau(panel, config.tau_list)
            record["selected_tau"] = best_tau
        except CsdexError as exc:
            record["select_error"] = f"{type(exc).__name__}: {exc}"
    return rep, record


def run_mc(config: McConfig) -> McSummary:
    """Run all replications and aggregate; deterministic given the config."""
    jobs = [(config, rep) for rep in range(1, config.replications + 1)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            raw = list(pool.map(_replicate, jobs, chunksize=8))
    else:
        raw = [_replicate(job) for job in jobs]
    raw.sort(key=lambda pair: pair[0])
    records = [record for _, record in raw]

    methods = [m for m, on in (("marginal", config.use_marginal), ("joint", config.use_joint)) if on]
    cells: Dict[Tuple[str, int], McCellSummary] = {}
    failures: Dict[str, int] = {}
    for method in methods:
        for tau in config.tau_list:
            alphas, lowers, uppers, covered = [], [], [], []
            n_out = n_failed = n_ci_failed = 0
            for record in records:
                cell = record[method][tau]
                if cell["error"] is not None:
                    n_failed += 1
                    failures[cell["error"]] = failures.get(cell["error"], 0) + 1
                    continue
                alphas.append(cell["alpha"])
                n_out += bool(cell["out_of_range"])
                if cell["ci"] is None:
                    n_ci_failed += 1
                    if cell["ci_error"] is not None:
                        failures[cell["ci_error"]] = failures.get(cell["ci_error"], 0) + 1
                    continue
                lowers.append(cell["ci"][0])
                uppers.append(cell["ci"][1])
                covered.append(cell["covered"])
            arr = np.asarray(alphas, dtype=float)
            cells[(method, tau)] = McCellSummary(
                method=method,
                tau=tau,
                n_estimates=len(alphas),
                mean=float(arr.mean()) if len(alphas) else math.nan,
                sd=float(arr.std(ddof=1)) if len(alphas) > 1 else math.nan,
                median=float(np.median(arr)) if len(alphas) else math.nan,
                mean_ci_lower=float(np.mean(lowers)) if lowers else math.nan,
                mean_ci_upper=float(np.mean(uppers)) if uppers else math.nan,
                coverage=float(np.mean(covered)) if covered else math.nan,
                n_ci=len(covered),
                n_out_of_range=n_out,
                n_failed=n_failed,
                n_ci_failed=n_ci_failed,
            )

    tau_mode = None
    tau_counts = None
    if config.use_select:
        tau_counts = {}
        for record in records:
            picked = record.get("selected_tau")
            if picked is not None:
                tau_counts[picked] = tau_counts.get(picked, 0) + 1
        if tau_counts:
            top = max(tau_counts.values())
            tau_mode = min(t for t, c in tau_counts.items() if c == top)
    return McSummary(
        config=config,
        cells=cells,
        tau_mode=tau_mode,
        tau_counts=tau_counts,
        failure_messages=failures,
    )


def _fmt(value: float) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "--"
    return f"{value:.4f}"


def _block_rows(summary: McSummary) -> List[List[str]]:
    config = summary.config
    taus = list(config.tau_list)
    mode_note = f" (modal tau {summary.tau_mode})" if summary.tau_mode is not None else ""
    head = [f"alpha0={config.spec.alpha0:g}{mode_note}"] + [f"tau={t}" for t in taus]
    rows = [head]
    for method, on in (("marginal", config.use_marginal), ("joint", config.use_joint)):
        if not on:
            continue
        rows.append(
            [f"{method} mean"]
            + [_fmt(summary.cells[(method, t)].mean) for t in taus]
        )
    ci_method = "joint" if config.use_joint else "marginal"
    pct = int(round(config.ci_level * 100))
    rows.append(
        [f"{pct}% ci lower"]
        + [_fmt(summary.cells[(ci_method, t)].mean_ci_lower) for t in taus]
    )
    rows.append(
        [f"{pct}% ci upper"]
        + [_fmt(summary.cells[(ci_method, t)].mean_ci_upper) for t in taus]
    )
    return rows


def emit_table(summaries, fmt: str = "markdown") -> str:
    """Render one or more summaries as a markdown or CSV table.

    Markdown blocks have a fixed layout: header, separator, one mean row
    per estimator, then the interval rows for the joint estimator.
    """
    if isinstance(summaries, McSummary):
        summaries = [summaries]
    if fmt not in ("markdown", "csv"):
        raise ValueError(f"unknown table format {fmt!r}")
    blocks = []
    for summary in summaries:
        rows = _block_rows(summary)
        if fmt == "markdown":
            lines = ["| " + " | ".join(rows[0]) + " |"]
            lines.append("|" + "|".join(" --- " for _ in rows[0]) + "|")
            for row in rows[1:]:
                lines.append("| " + " | ".join(row) + " |")
        else:
            lines = [",".join(_csv_quote(cell) for cell in row) for row in rows]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def _csv_quote(cell: str) -> str:
    if any(ch in cell for ch in ',"\n'):
        return '"' + cell.replace('"', '""') + '"'
    return cell


def _json_safe(value):
    if isinstance(value, float):
        return None if math.isnan(value) else value
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def summary_to_json(summary: McSummary) -> str:
    """Full-precision machine-readable form of a summary."""
    config = summary.config
    payload = {
        "alpha0": config.spec.alpha0,
        "n_sections": config.spec.n_sections,
        "n_times": config.spec.n_times,
        "replications": config.replications,
        "base_seed": config.base_seed,
        "ci_level": config.ci_level,
        "tau_list": list(config.tau_list),
        "tau_mode": summary.tau_mode,
        "tau_counts": summary.tau_counts,
        "failures": summary.failure_messages,
        "cells": {
            f"{method}:tau={tau}": _json_safe(asdict(cell))
            for (method, tau), cell in sorted(summary.cells.items())
        },
    }
    return json.dumps(_json_safe(payload), indent=2, sort_keys=True)
