"""Command-line interface.

Subcommands: ``estimate`` (one panel, one lag), ``select-tau`` (pick the
lag), ``acf`` (diagnostic autocorrelations, optionally after removing the
cross-mean projection), ``simulate`` (write one synthetic panel), and
``montecarlo`` (replicated tables).

Exit codes: 0 on success, 2 on input problems (bad flags, malformed
files, out-of-range lags), 3 when the numbers themselves are degenerate
(zero covariance, undefined interval).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import List, Optional

from .dgp import example1_spec, example2_spec, example3_spec, simulate_panel
from .errors import (
    CiUndefinedError,
    DegenerateDataError,
    InvalidCutoffError,
    InvalidKappaError,
    InvalidLagError,
    InvalidTruncationError,
    NoClosedFormError,
    NonstationaryError,
    PanelFormatError,
)
from .estimators import joint_estimate, marginal_alpha, select_tau
from .inference import confidence_interval, sigma_tau_sq
from .io import (
    SECTIONS_AS_COLUMNS,
    SECTIONS_AS_ROWS,
    defactor,
    read_panel,
    standardize,
    write_panel,
)
from .montecarlo import McConfig, emit_table, run_mc, summary_to_json

_INPUT_ERRORS = (
    PanelFormatError,
    InvalidLagError,
    InvalidCutoffError,
    InvalidTruncationError,
    InvalidKappaError,
    NonstationaryError,
    NoClosedFormError,
    ValueError,
)
_DEGENERACY_ERRORS = (DegenerateDataError, CiUndefinedError)


def _add_input_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--input", required=True, help="panel file (delimited text)")
    sub.add_argument(
        "--orientation",
        choices=["rows", "columns"],
        default="rows",
        help="whether sections are stored as rows (default) or columns",
    )
    sub.add_argument("--header", action="store_true", help="skip one header row")
    sub.add_argument("--delimiter", default=",", help="cell delimiter (default ',')")
    sub.add_argument(
        "--standardize",
        action="store_true",
        help="center/scale each section before the computation",
    )


def _load_panel(args):
    orientation = (
        SECTIONS_AS_ROWS if args.orientation == "rows" else SECTIONS_AS_COLUMNS
    )
    panel = read_panel(
        args.input,
        orientation=orientation,
        header=args.header,
        delimiter=args.delimiter,
    )
    if args.standardize:
        panel = standardize(panel)
    return panel


def _spec_from_args(args):
    builders = {
        "example1": example1_spec,
        "example2": example2_spec,
        "example3": example3_spec,
    }
    builder = builders[args.spec]
    kwargs = dict(
        n_sections=args.n,
        n_times=args.t,
        alpha0=args.alpha0,
        seed=args.seed,
    )
    if args.spec == "example2":
        kwargs["h"] = None if args.h == "invsqrt" else float(args.h)
    return builder(**kwargs)


def _add_spec_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--spec",
        choices=["example1", "example2", "example3"],
        required=True,
        help="benchmark design to simulate",
    )
    sub.add_argument("--n", type=int, default=200, help="number of sections")
    sub.add_argument("--t", type=int, default=200, help="number of time points")
    sub.add_argument("--alpha0", type=float, default=0.8, help="true exponent")
    sub.add_argument(
        "--h",
        default="0.2",
        help="example2 error AR coefficient (number or 'invsqrt' for 1/sqrt(N))",
    )
    sub.add_argument("--seed", type=int, default=0, help="random seed")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csdex",
        description="Cross-sectional dependence exponent estimation for large panels.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    est = commands.add_parser("estimate", help="estimate the exponent at one lag")
    _add_input_flags(est)
    est.add_argument("--tau", type=int, required=True, help="autocovariance lag")
    est.add_argument(
        "--kappa",
        type=float,
        default=None,
        help="known factor autocovariance level; switches to the marginal estimator",
    )
    est.add_argument("--level", type=float, default=0.90, help="confidence level")
    est.add_argument(
        "--ell", type=int, default=None, help="long-run variance truncation lag"
    )
    est.add_argument("--json", default=None, help="also write the result as JSON")

    sel = commands.add_parser("select-tau", help="pick a lag by the selection rule")
    _add_input_flags(sel)
    sel.add_argument(
        "--taus", required=True, help="comma-separated candidate lags, e.g. 1,2,3,4"
    )

    ac = commands.add_parser("acf", help="autocorrelations of the cross-sectional mean")
    _add_input_flags(ac)
    ac.add_argument("--max-lag", type=int, required=True, help="largest lag")
    ac.add_argument(
        "--defactor",
        action="store_true",
        help="also report the residual ACF after removing the cross-mean projection",
    )

    sim = commands.add_parser("simulate", help="write one synthetic panel")
    _add_spec_flags(sim)
    sim.add_argument("--out", required=True, help="output file")
    sim.add_argument("--delimiter", default=",")

    mc = commands.add_parser("montecarlo", help="replicated estimation tables")
    _add_spec_flags(mc)
    mc.add_argument("--reps", type=int, default=500, help="number of replications")
    mc.add_argument("--taus", required=True, help="comma-separated lags")
    mc.add_argument("--level", type=float, default=0.90)
    mc.add_argument(
        "--estimators",
        choices=["marginal", "joint", "both"],
        default="both",
    )
    mc.add_argument("--select", action="store_true", help="also run lag selection")
    mc.add_argument("--format", choices=["markdown", "csv"], default="markdown")
    mc.add_argument("--workers", type=int, default=1)
    mc.add_argument("--json", default=None, help="also write the summary as JSON")
    return parser


def _parse_taus(text: str) -> List[int]:
    try:
        taus = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ValueError(f"could not parse lag list {text!r}") from None
    if not taus:
        raise ValueError("lag list is empty")
    return taus


def _result_payload(result, variance, interval) -> dict:
    payload = {
        "method": result.method,
        "alpha": result.alpha,
        "kappa": result.kappa,
        "tau": result.tau,
        "cutoff_n": result.cutoff_n,
        "objective": result.objective_value,
        "out_of_range": bool(result.diagnostics.get("out_of_range", False)),
    }
    if variance is not None:
        payload["sigma_sq"] = variance.total
        payload["sigma_sq_part1"] = variance.part1
        payload["sigma_sq_part2"] = variance.part2
        payload["truncation_ell"] = variance.truncation_ell
    if interval is not None:
        payload["ci_lower"] = interval.lower
        payload["ci_upper"] = interval.upper
        payload["ci_level"] = interval.level
    return payload


def _print_key_values(payload: dict) -> None:
    for key, value in payload.items():
        print(f"{key} {value}")


def _cmd_estimate(args) -> int:
    panel = _load_panel(args)
    if args.kappa is not None:
        if args.kappa == 0.0:
            raise ValueError("--kappa must be nonzero")
        result = marginal_alpha(panel, args.tau, args.kappa)
    else:
        result = joint_estimate(panel, args.tau)
    variance = interval = None
    ci_error = None
    try:
        variance = sigma_tau_sq(panel, result.alpha, args.tau, args.ell)
        interval = confidence_interval(
            result.alpha,
            result.kappa,
            variance.total,
            panel.n_sections,
            panel.n_times,
            args.tau,
            level=args.level,
        )
    except _DEGENERACY_ERRORS as exc:
        ci_error = exc
    payload = _result_payload(result, variance, interval)
    _print_key_values(payload)
    if args.json:
        with open(args.json, "w") as handle:
            json.dump(
                {k: (None if isinstance(v, float) and math.isnan(v) else v)
                 for k, v in payload.items()},
                handle,
                indent=2,
            )
            handle.write("\n")
    if ci_error is not None:
        print(f"confidence interval unavailable: {ci_error}", file=sys.stderr)
        return 3
    return 0


def _cmd_select_tau(args) -> int:
    panel = _load_panel(args)
    best, results = select_tau(panel, _parse_taus(args.taus))
    for result in results:
        score = result.diagnostics["selection_score"]
        print(
            f"tau {result.tau} alpha {result.alpha} kappa {result.kappa} "
            f"objective {result.objective_value} score {score}"
        )
    print(f"selected {best}")
    return 0


def _cmd_acf(args) -> int:
    panel = _load_panel(args)
    if args.defactor:
        _, diagnostics = defactor(panel, args.max_lag)
        for lag in range(args.max_lag + 1):
            print(
                f"{lag} {float(diagnostics.acf_xbar[lag])} "
                f"{float(diagnostics.acf_ubar[lag])}"
            )
    else:
        from .moments import acf as acf_fn

        values = acf_fn(panel.data.mean(axis=0), args.max_lag)
        for lag in range(args.max_lag + 1):
            print(f"{lag} {float(values[lag])}")
    return 0


def _cmd_simulate(args) -> int:
    spec = _spec_from_args(args)
    draw = simulate_panel(spec)
    write_panel(draw.panel, args.out, delimiter=args.delimiter)
    print(
        f"wrote {spec.n_sections}x{spec.n_times} panel "
        f"(alpha0={spec.alpha0:g}, seed={spec.seed}) to {args.out}"
    )
    return 0


def _cmd_montecarlo(args) -> int:
    spec = _spec_from_args(args)
    config = McConfig(
        spec=spec,
        tau_list=tuple(_parse_taus(args.taus)),
        replications=args.reps,
        base_seed=args.seed,
        ci_level=args.level,
        use_marginal=args.estimators in ("marginal", "both"),
        use_joint=args.estimators in ("joint", "both"),
        use_select=args.select,
        workers=args.workers,
    )
    summary = run_mc(config)
    print(emit_table(summary, fmt=args.format), end="")
    if args.json:
        with open(args.json, "w") as handle:
            handle.write(summary_to_json(summary))
            handle.write("\n")
    return 0


_COMMANDS = {
    "estimate": _cmd_estimate,
    "select-tau": _cmd_select_tau,
    "acf": _cmd_acf,
    "simulate": _cmd_simulate,
    "montecarlo": _cmd_montecarlo,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except _DEGENERACY_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
