"""Long-format CSV files holding the data behind each figure family.

Every writer emits rows in a fixed order (policy order from the config, then
``t`` or ``K`` ascending) so that re-running a seeded experiment reproduces
the files byte for byte.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from varbandit.harness.bai import BaiResult
from varbandit.harness.casestudy import CaseStudyResult
from varbandit.harness.output import thin_points, write_csv
from varbandit.harness.regret import RegretResult
from varbandit.harness.sweep import SweepRow

REGRET_HEADER = ("policy", "t", "mean_regret", "stderr")
PULLS_HEADER = ("policy", "arm", "mean_pulls")
ERROR_RATES_HEADER = ("policy", "K", "n", "error_rate", "stderr", "replications")
ERROR_VS_K_HEADER = ("experiment", "policy", "K", "n", "error_rate", "stderr")
CUMPROFIT_HEADER = ("strategy", "t", "mean_profit", "median_profit", "stderr")
TABLE_I_HEADER = ("replication", "rank", "stock_id", "reward", "trades", "premium")
TOTALS_HEADER = ("replication", "strategy", "total_reward", "total_premium", "final_profit")
TAIL_HEADER = (
    "arm", "statistic", "n", "eps", "replications", "hits",
    "empirical", "stderr", "bound", "vacuous", "dominated",
)


def regret_rows(result: RegretResult, points: int = 100, full_trace: bool = False):
    if not result.policies:
        return []
    ts = range(1, result.horizon + 1) if full_trace else thin_points(result.horizon, points)
    rows = []
    for p in result.policies:
        mean, se = result.mean[p], result.stderr[p]
        rows.extend((p, t, float(mean[t - 1]), float(se[t - 1])) for t in ts)
    return rows


def write_regret(result: RegretResult, out_dir, points: int = 100, full_trace: bool = False) -> list[Path]:
    out = Path(out_dir)
    pulls = [(p, i, float(c)) for p in result.policies for i, c in enumerate(result.mean_pulls[p])]
    return [
        write_csv(out / "regret_vs_time.csv", REGRET_HEADER, regret_rows(result, points, full_trace)),
        write_csv(out / "pulls.csv", PULLS_HEADER, pulls),
    ]


def write_bai(result: BaiResult, out_dir) -> list[Path]:
    out = Path(out_dir)
    rates = [(r.policy, r.n_arms, r.budget, r.error_rate, r.stderr, r.replications) for r in result.rows]
    by_k = sorted(
        ((r.experiment if r.experiment is not None else "", r.policy, r.n_arms, r.budget, r.error_rate, r.stderr)
         for r in result.rows),
        key=lambda row: (str(row[0]), row[1], row[2]),
    )
    return [
        write_csv(out / "error_rates.csv", ERROR_RATES_HEADER, rates),
        write_csv(out / "error_vs_K.csv", ERROR_VS_K_HEADER, by_k),
    ]


def _profit_rows(result: CaseStudyResult):
    rows = []
    if not result.records:
        return rows
    for strategy, attr in (("shvv_ucb_vv", "pipeline"), ("ucb1", "baseline")):
        traces = np.stack([getattr(r, attr).cumulative for r in result.records])
        mean = traces.mean(axis=0)
        med = np.median(traces, axis=0)
        if traces.shape[0] > 1:
            se = traces.std(axis=0, ddof=1) / math.sqrt(traces.shape[0])
        else:
            se = np.zeros(traces.shape[1])
        rows.extend((strategy, t + 1, float(mean[t]), float(med[t]), float(se[t])) for t in range(traces.shape[1]))
    return rows


def write_case_study(result: CaseStudyResult, out_dir) -> list[Path]:
    out = Path(out_dir)
    table, totals = [], []
    for rec in result.records:
        book = rec.pipeline
        for rank, s in enumerate(rec.shortlist, start=1):
            table.append((rec.replication_id, rank, s, book.reward[s], book.trades[s], book.premium[s]))
        for strategy, b in (("shvv_ucb_vv", rec.pipeline), ("ucb1", rec.baseline)):
            totals.append((rec.replication_id, strategy, b.total_reward, b.total_premium, b.final_profit))
    return [
        write_csv(out / "cumprofit_vs_t.csv", CUMPROFIT_HEADER, _profit_rows(result)),
        write_csv(out / "table_i.csv", TABLE_I_HEADER, table),
        write_csv(out / "totals.csv", TOTALS_HEADER, totals),
    ]


def bound_rows(evaluated) -> tuple[tuple, list]:
    """Header ``bound_name, <sorted param names>, value, vacuous`` and matching rows."""
    keys = sorted({k for _name, params, _v, _vac in evaluated for k in params})
    header = ("bound_name", *keys, "value", "vacuous")
    rows = []
    for name, params, value, vac in evaluated:
        cells = []
        for k in keys:
            v = params.get(k)
            cells.append(",".join(str(x) for x in v) if isinstance(v, (list, tuple)) else v)
        rows.append((name, *cells, value, vac))
    return header, rows


def write_sweep(rows: list[SweepRow], evaluated, out_dir) -> list[Path]:
    out = Path(out_dir)
    tail = [
        (r.arm, r.statistic, r.n, r.eps, r.replications, r.hits, r.empirical, r.stderr, r.bound, r.vacuous, r.dominated)
        for r in rows
    ]
    header, brows = bound_rows(evaluated)
    return [write_csv(out / "tail_sweep.csv", TAIL_HEADER, tail), write_csv(out / "bounds.csv", header, brows)]


def emit_plot_data(results, out_dir, points: int = 100, full_trace: bool = False) -> list[Path]:
    """Write the CSV family matching ``results``; returns the paths written."""
    if isinstance(results, RegretResult):
        return write_regret(results, out_dir, points, full_trace)
    if isinstance(results, BaiResult):
        return write_bai(results, out_dir)
    if isinstance(results, CaseStudyResult):
        return write_case_study(results, out_dir)
    if isinstance(results, tuple) and len(results) == 2:
        return write_sweep(results[0], results[1], out_dir)
    raise TypeError(f"no plot data writer for {type(results).__name__}")
