"""Command-line entry point: ``varbandit {regret,bai,bounds,casestudy,validate-config}``.

Exit codes: 0 success, 1 other library error, 2 bad configuration or
arguments, 3 infeasible budget, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from varbandit.errors import ConfigError, InfeasibleBudgetError, InputError, VarBanditError
from varbandit.harness.bai import run_bai_experiment
from varbandit.harness.casestudy import run_case_study
from varbandit.harness.config import load_config
from varbandit.harness.output import write_csv, write_json
from varbandit.harness.regret import run_regret_experiment
from varbandit.harness.sweep import evaluate_bound, run_bound_sweep
from varbandit.plotdata import bound_rows, emit_plot_data

log = logging.getLogger("varbandit")

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_BUDGET, EXIT_IO = 0, 1, 2, 3, 4

_BOUND_FLAGS = ("K", "n", "h2", "eps", "l", "u", "v2", "C", "c", "eta", "r", "gap", "gaps", "form", "constant")


def _add_run_flags(p: argparse.ArgumentParser, config_required: bool = True) -> None:
    p.add_argument("--config", required=config_required, help="experiment JSON file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config entry (dotted key, JSON value); repeatable")
    p.add_argument("--out-dir", help="directory for every output file (default: config output.dir or ./results)")
    p.add_argument("--workers", type=int, help="worker processes (default: config, then $VARBANDIT_WORKERS, then 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="varbandit", description="Variance-seeking bandit experiments and bounds.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (
        ("regret", "replicated regret curves"),
        ("bai", "fixed-budget best-variance-arm error rates"),
        ("casestudy", "two-stage option-trading simulation"),
    ):
        _add_run_flags(sub.add_parser(name, help=help_))

    b = sub.add_parser("bounds", help="evaluate one bound, or run a Monte Carlo sweep with --config")
    _add_run_flags(b, config_required=False)
    b.add_argument("--name", help="bound name, e.g. shvv_error or variance_concentration")
    for flag in _BOUND_FLAGS:
        b.add_argument(f"--{flag}", dest=f"b_{flag}", metavar=flag)

    v = sub.add_parser("validate-config", help="check a config against the schema and exit")
    v.add_argument("config", nargs="?")
    v.add_argument("--config", dest="config_opt")
    v.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    return parser


def _out_dir(args, cfg) -> Path:
    if args.out_dir:
        return Path(args.out_dir)
    return Path((cfg.get("output") or {}).get("dir", "results"))


def _write_sidecars(out: Path, cfg, summary) -> None:
    write_json(out / "resolved_config.json", {"config": cfg.raw, "config_hash": cfg.hash})
    write_json(out / "summary.json", {"kind": cfg.kind, "config_hash": cfg.hash, "aggregates": summary})


def _run(args) -> int:
    cfg = load_config(args.config, args.overrides)
    out = _out_dir(args, cfg)
    log.info("resolved config hash %s", cfg.hash)
    if args.command == "regret":
        res = run_regret_experiment(cfg, args.workers)
        emit_plot_data(res, out, cfg.get("thin_points", 100), cfg.get("full_trace", False))
        summary = res.summary()
    elif args.command == "bai":
        res = run_bai_experiment(cfg, args.workers)
        emit_plot_data(res, out)
        summary = res.summary()
    elif args.command == "casestudy":
        res = run_case_study(cfg, args.workers)
        emit_plot_data(res, out)
        summary = res.summary()
    else:
        rows, evaluated = run_bound_sweep(cfg, args.workers)
        emit_plot_data((rows, evaluated), out)
        summary = {
            "cells": len(rows),
            "dominated": sum(r.dominated for r in rows),
            "bounds": [{"name": n, "value": v, "vacuous": vac} for n, _p, v, vac in evaluated],
        }
    _write_sidecars(out, cfg, summary)
    for path in sorted(out.iterdir()):
        if path.is_file() and not path.name.startswith("."):
            print(path)
    return EXIT_OK


def _bound(args) -> int:
    params = {f: getattr(args, f"b_{f}") for f in _BOUND_FLAGS if getattr(args, f"b_{f}") is not None}
    try:
        value, vacuous = evaluate_bound(args.name, params)
    except InputError as exc:
        raise ConfigError(str(exc)) from None
    print(f"{args.name} value={value!r} vacuous={'true' if vacuous else 'false'}")
    if args.out_dir:
        header, rows = bound_rows([(args.name, params, value, vacuous)])
        write_csv(Path(args.out_dir) / "bounds.csv", header, rows)
    return EXIT_OK


def _validate(args) -> int:
    path = args.config or args.config_opt
    if path is None:
        raise ConfigError("validate-config needs a config path")
    cfg = load_config(path, args.overrides)
    print(f"ok {cfg.kind} {cfg.hash}")
    return EXIT_OK


def dispatch(args) -> int:
    if args.command == "validate-config":
        return _validate(args)
    if args.command == "bounds" and args.config is None:
        if args.name is None:
            raise ConfigError("bounds needs --name or --config")
        return _bound(args)
    return _run(args)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleBudgetError as exc:
        print(f"infeasible budget: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InputError, VarBanditError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
