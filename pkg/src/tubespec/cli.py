"""Experiment runner: every scenario as a subcommand with JSON/CSV outputs.

Subcommands: sl-solve, tube-sweep, bound, s1-dissect, compare-ode,
berger-curve.  Each reads an optional JSON config (--config), applies flat
--override key=value pairs on top, and writes its report into --out.
Outputs are canonicalized (sorted keys, 17 significant digits, '.' decimal)
so identical inputs produce byte-identical files.

Exit codes: 0 success, 1 verification failure (a checked inequality or
cross-validation did not hold), 2 input error (missing file, malformed
JSON, schema violation, bad arguments).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dissection import berger_scaling, c_rho_from_partition, \
    cover_from_json, cover_to_json, dirac_bound, laplacian_bound
from .discrete_hodge import s1_case_study
from .geometry import DegenerationSchedule, schedule_to_json
from .jsonio import write_csv, write_json
from .ode_compare import run_suite
from .sturm_liouville import problem_from_json, problem_to_json, \
    solve_cross_validated, solve_fd, solve_shooting, spectrum_csv_rows
from .tube_spectrum import SweepOptions, spectrum_csv_rows as sweep_csv_rows, sweep

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2

TUBE_THRESHOLD_LAMBDA = 1.0
TUBE_THRESHOLD_TOL = 1e-3


def _check_keys(config: dict, allowed: set, required: set = frozenset()) -> None:
    unknown = set(config) - allowed
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    missing = required - set(config)
    if missing:
        raise ValueError(f"missing config keys: {sorted(missing)}")


def _load_config(args) -> dict:
    if args.config is not None:
        text = Path(args.config).read_text(encoding="utf-8")
        config = json.loads(text)
        if not isinstance(config, dict):
            raise ValueError("config file must hold a JSON object")
    else:
        config = {}
    for item in args.override:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ValueError(f"override must look like key=value, got {item!r}")
        try:
            config[key] = json.loads(raw)
        except json.JSONDecodeError:
            config[key] = raw
    return config


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_sl_solve(args, config: dict) -> int:
    _check_keys(config, {"problem", "window", "method", "grid_n"},
                {"problem", "window"})
    problem = problem_from_json(config["problem"])
    window = tuple(config["window"])
    method = config.get("method", "cross")
    grid_n = int(config.get("grid_n", 256))
    out = _outdir(args)

    results = {}
    if method == "fd":
        primary = solve_fd(problem, grid_n, window)
        results["fd"] = primary.to_json()
    elif method == "shooting":
        primary = solve_shooting(problem, window)
        results["shooting"] = primary.to_json()
    elif method == "cross":
        results["fd"] = solve_fd(problem, grid_n, window).to_json()
        results["shooting"] = solve_shooting(problem, window).to_json()
        primary = solve_cross_validated(problem, window, grid_n=grid_n)
        results["cross_validated"] = primary.to_json()
    else:
        raise ValueError(f"method must be fd, shooting, or cross, got {method!r}")

    write_json(out / "sl_solve.json", {
        "problem": problem_to_json(problem),
        "window": list(window),
        "method": method,
        "results": results,
    })
    write_csv(out / "sl_solve.csv", ("index", "eigenvalue", "error"),
              spectrum_csv_rows(primary))
    return EXIT_OK


def _tube_row_pass(row):
    """True/False against the threshold; None when the row never solved."""
    if not row.ok:
        return None
    m = row.min_positive_offzero
    if m is None:
        return True  # empty window: nothing violates the threshold
    return bool(m >= TUBE_THRESHOLD_LAMBDA - TUBE_THRESHOLD_TOL)


def cmd_tube_sweep(args, config: dict) -> int:
    _check_keys(config, {"R_grid", "D1", "D2", "E1", "E2", "threshold",
                         "lambda_max", "family", "include_zero_mode"})
    schedule = DegenerationSchedule(
        D1=config.get("D1", 1.0), D2=config.get("D2", 1.0),
        E1=config.get("E1", 1.0), E2=config.get("E2", 1.0),
        R_grid=tuple(config.get("R_grid", ())),
    )
    options = SweepOptions(
        threshold=float(config.get("threshold", 5.0)),
        lambda_max=float(config.get("lambda_max", 2.0)),
        family=config.get("family", "Both"),
        include_zero_mode=bool(config.get("include_zero_mode", False)),
    )
    rows = sweep(schedule, options)
    out = _outdir(args)

    write_csv(out / "tube_sweep.csv",
              ("R", "r0", "mode_r", "mode_s", "family", "eigenvalue", "error"),
              sweep_csv_rows(rows))
    summary_rows = []
    for row in rows:
        summary_rows.append({
            "R": row.R,
            "r0": row.r0,
            "achieved_inf": row.achieved_inf,
            "failure": row.failure,
            "min_positive_offzero": row.min_positive_offzero,
            "n_entries": len(row.spectrum.entries) if row.spectrum else 0,
            "pass": _tube_row_pass(row),
        })
    computed = [r["pass"] for r in summary_rows if r["pass"] is not None]
    all_pass = all(computed) if computed else True
    write_json(out / "tube_sweep.json", {
        "schedule": schedule_to_json(schedule),
        "options": {
            "threshold": options.threshold,
            "lambda_max": options.lambda_max,
            "family": options.family,
            "include_zero_mode": options.include_zero_mode,
        },
        "threshold_lambda": TUBE_THRESHOLD_LAMBDA,
        "threshold_tolerance": TUBE_THRESHOLD_TOL,
        "rows": summary_rows,
        "all_computed_pass": all_pass,
    })
    return EXIT_OK if all_pass else EXIT_VERIFY


def cmd_bound(args, config: dict) -> int:
    # C_rho may be given directly or as a sampled partition of unity
    # {"step": h, "rho": [[..], ..], "periodic": bool}
    c_rho = config.get("C_rho")
    if isinstance(c_rho, dict):
        unknown = set(c_rho) - {"step", "rho", "periodic"}
        if unknown:
            raise ValueError(f"unknown C_rho fields: {sorted(unknown)}")
        if "step" not in c_rho or "rho" not in c_rho:
            raise ValueError("C_rho partition form needs 'step' and 'rho'")
        config = dict(config)
        config["C_rho"] = c_rho_from_partition(
            c_rho["rho"], float(c_rho["step"]),
            periodic=bool(c_rho.get("periodic", False)))
    cover = cover_from_json(config)
    ordered = bool(args.ordered)
    want_dirac = args.dirac or not args.laplacian
    want_laplacian = args.laplacian or not args.dirac
    out = _outdir(args)

    doc = {"cover": cover_to_json(cover), "ordered": ordered}
    csv_rows = []
    if want_laplacian:
        res = laplacian_bound(cover, ordered=ordered)
        doc["laplacian"] = res.to_json()
        csv_rows += [("laplacian", i, t) for i, t in enumerate(res.per_set_terms)]
    if want_dirac:
        res = dirac_bound(cover, ordered=ordered)
        doc["dirac"] = res.to_json()
        csv_rows += [("dirac", i, t) for i, t in enumerate(res.per_set_terms)]
    write_json(out / "bound.json", doc)
    write_csv(out / "bound.csv", ("bound", "set_index", "term"), csv_rows)
    return EXIT_OK


def cmd_s1_dissect(args, config: dict) -> int:
    _check_keys(config, {"n", "overlap_fraction"})
    report = s1_case_study(int(config.get("n", 64)),
                           float(config.get("overlap_fraction", 0.125)))
    out = _outdir(args)
    write_json(out / "s1_dissect.json", report)
    write_csv(out / "s1_dissect.csv", ("set_index", "term"),
              list(enumerate(report["per_set_terms"])))
    return EXIT_OK if report["valid"] else EXIT_VERIFY


def cmd_compare_ode(args, config: dict) -> int:
    _check_keys(config, {"suite", "seed", "count"})
    config.setdefault("suite", "A.1")
    config.setdefault("seed", args.seed)
    report = run_suite(config)
    out = _outdir(args)
    write_json(out / "compare_ode.json", report)
    if report["suite"] == "A.1":
        header = ("index", "k", "alpha", "riccati_margin", "slope",
                  "slope_threshold", "passed")
        rows = [(c["index"], c["k"], c["alpha"], c["riccati_margin"],
                 c["slope"], c["slope_threshold"], c["passed"])
                for c in report["cases"]]
    else:
        header = ("index", "k", "alpha", "delta", "min_relative_margin",
                  "no_zero", "passed")
        rows = [(c["index"], c["k"], c["alpha"], c["delta"],
                 c["min_relative_margin"], c["no_zero"], c["passed"])
                for c in report["cases"]]
    write_csv(out / "compare_ode.csv", header, rows)
    return EXIT_OK if report["all_passed"] else EXIT_VERIFY


def cmd_berger_curve(args, config: dict) -> int:
    _check_keys(config, {"a", "b", "m", "epsilon_bound", "t_max", "t_step",
                         "thresholds"})
    t_step = float(config.get("t_step", 1.0))
    t_max = float(config.get("t_max", 200.0))
    if not (t_step > 0 and t_max >= t_step):
        raise ValueError("need t_step > 0 and t_max >= t_step")
    n = int(t_max / t_step + 1e-9)
    t_grid = [i * t_step for i in range(n + 1)]
    curve = berger_scaling(
        a=float(config.get("a", 1.0)),
        b=float(config.get("b", 1.0)),
        m=int(config.get("m", 2)),
        epsilon_bound=float(config.get("epsilon_bound", 0.1)),
        t_grid=t_grid,
        thresholds=tuple(config.get("thresholds", (10.0,))),
    )
    out = _outdir(args)
    write_json(out / "berger_curve.json", curve.to_json())
    write_csv(out / "berger_curve.csv", ("t", "curve"),
              list(zip(curve.t_values, curve.curve)))
    return EXIT_OK


_COMMANDS = {
    "sl-solve": cmd_sl_solve,
    "tube-sweep": cmd_tube_sweep,
    "bound": cmd_bound,
    "s1-dissect": cmd_s1_dissect,
    "compare-ode": cmd_compare_ode,
    "berger-curve": cmd_berger_curve,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--seed", type=int, default=7,
                        help="seed for randomized suites")
    common.add_argument("--config", default=None, help="JSON config file")
    common.add_argument("--override", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="override a config entry (value parsed as JSON "
                             "when possible, else kept as a string)")

    parser = argparse.ArgumentParser(
        prog="tubespec",
        description="spectral verification experiments: Sturm-Liouville "
                    "windows, tube sweeps, dissection bounds, discrete Hodge "
                    "case study, ODE comparison suites, Berger scaling curve")
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("sl-solve", parents=[common],
                   help="solve one eigenvalue window from a problem JSON")
    sub.add_parser("tube-sweep", parents=[common],
                   help="sweep tube spectra over an R grid; summary vs "
                        "threshold 1")
    bound = sub.add_parser("bound", parents=[common],
                           help="dissection lower bound from a cover JSON")
    bound.add_argument("--dirac", action="store_true",
                       help="emit only the first-order bound")
    bound.add_argument("--laplacian", action="store_true",
                       help="emit only the second-order bound")
    bound.add_argument("--ordered", action="store_true",
                       help="count ordered multi-indices in N")
    sub.add_parser("s1-dissect", parents=[common],
                   help="two-arc circle case study: bound vs full spectrum")
    sub.add_parser("compare-ode", parents=[common],
                   help="seeded comparison-ODE suites (A.1 slopes, A.2 "
                        "growth)")
    sub.add_parser("berger-curve", parents=[common],
                   help="normalized squared-eigenvalue scaling curve")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_INPUT
    try:
        config = _load_config(args)
        return _COMMANDS[args.command](args, config)
    except RuntimeError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ValueError, KeyError, TypeError, OSError,
            json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
