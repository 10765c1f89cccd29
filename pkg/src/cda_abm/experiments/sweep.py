"""
Sweep driver: seed ensembles over n_a for each additional-agent kind.

Cells are independent simulations and run on a bounded process pool. Results
are keyed by cell and sorted before aggregation, so the summary does not
depend on completion order or worker count.
"""

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from cda_abm.config.models import SimConfig, SweepSpec
from cda_abm.core.engine import run_simulation
from cda_abm.core.types import AgentKind, RunResult, SweepRow
from cda_abm.experiments.io import (
    SWEEP_SUMMARY,
    ensure_output_dir,
    run_file_stem,
    write_ledger,
    write_price_series,
    write_sweep_summary,
)
from cda_abm.experiments.seeds import derive_cell_seed

logger = logging.getLogger(__name__)

THREADS_ENV = "CDA_ABM_THREADS"


class SweepCell(BaseModel):
    kind: AgentKind
    n_a: int
    index: int
    seed: int       # seed as listed in the SweepSpec
    cell_seed: int  # derived seed actually simulated


def available_cores() -> int:
    """Cores this process may run on; honours CPU affinity where the platform exposes it."""
    if hasattr(os, "sched_getaffinity"):
        return len(os.sched_getaffinity(0)) or 1
    return os.cpu_count() or 1


def resolve_workers(requested: Optional[int] = None) -> int:
    """Worker count: the request (or all cores), capped by CDA_ABM_THREADS when set."""
    workers = requested or available_cores()
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            logger.warning(f"[Sweep] Ignoring non-integer {THREADS_ENV}={cap!r}")
    return max(1, workers)


def plan_cells(spec: SweepSpec) -> List[SweepCell]:
    return [
        SweepCell(
            kind=kind,
            n_a=n_a,
            index=i,
            seed=seed,
            cell_seed=derive_cell_seed(seed, kind, n_a, i, paired=spec.paired),
        )
        for kind in spec.aa_kinds
        for n_a in spec.na_values
        for i, seed in enumerate(spec.seeds)
    ]


def cell_config(base: SimConfig, cell: SweepCell) -> SimConfig:
    return base.with_updates(aa_kind=cell.kind, n_a=cell.n_a, seed=cell.cell_seed)


def run_configs(configs: List[SimConfig], workers: int, on_result: Optional[Callable[[int, RunResult], None]] = None) -> List[RunResult]:
    """Runs independent simulations, returning results in input order."""
    results: List[Optional[RunResult]] = [None] * len(configs)
    if workers <= 1 or len(configs) <= 1:
        for i, cfg in enumerate(configs):
            results[i] = run_simulation(cfg)
            if on_result:
                on_result(i, results[i])
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, result in enumerate(pool.map(run_simulation, configs)):
                results[i] = result
                if on_result:
                    on_result(i, result)
    return results


def _std_err(values: List[float]) -> Optional[float]:
    if len(values) < 2:
        return None
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def aggregate_cell(kind: AgentKind, n_a: int, runs: List[RunResult]) -> SweepRow:
    """Per-run averages over AAs, then averaged over seeds."""
    per_aa_profit = [r.mean_profit_per_aa for r in runs if r.mean_profit_per_aa is not None]
    per_aa_trades = [r.mean_trades_per_aa for r in runs if r.mean_trades_per_aa is not None]
    has_aas = n_a > 0 and len(per_aa_profit) == len(runs)
    return SweepRow(
        aa_kind=kind,
        n_a=n_a,
        n_seeds=len(runs),
        mean_profit_per_aa=float(np.mean(per_aa_profit)) if has_aas else None,
        std_err_profit=_std_err(per_aa_profit) if has_aas else None,
        mean_total_profit=float(np.mean([r.total_profit for r in runs])) if has_aas else None,
        mean_trades_per_aa=float(np.mean(per_aa_trades)) if has_aas else None,
        std_err_trades=_std_err(per_aa_trades) if has_aas else None,
        price_mean=float(np.mean([r.price_stats.mean for r in runs])),
        price_std=float(np.mean([r.price_stats.std for r in runs])),
        price_mad_from_fundamental=float(np.mean([r.price_stats.mean_abs_deviation_from_fundamental for r in runs])),
    )


def run_sweep(spec: SweepSpec, on_result: Optional[Callable[[SweepCell, RunResult], None]] = None) -> List[SweepRow]:
    outputs = ensure_output_dir(spec.outputs)
    cells = plan_cells(spec)
    workers = resolve_workers(spec.workers)
    logger.info(f"[Sweep] {len(cells)} runs over kinds={[k.value for k in spec.aa_kinds]} na={spec.na_values} with {workers} workers")

    def _done(i: int, result: RunResult):
        cell = cells[i]
        if spec.write_run_files:
            stem = run_file_stem(cell.kind.value, cell.n_a, cell.seed)
            write_ledger(outputs / f"ledger_{stem}.csv", result)
            if result.price_series is not None:
                write_price_series(outputs / f"prices_{stem}.csv", result.price_series, result.series_stride, result.tick_size)
        if on_result:
            on_result(cell, result)

    results = run_configs([cell_config(spec.base, c) for c in cells], workers, on_result=_done)

    grouped: Dict[Tuple[AgentKind, int], List[RunResult]] = {}
    for cell, result in zip(cells, results):
        grouped.setdefault((cell.kind, cell.n_a), []).append(result)
    rows = [aggregate_cell(kind, n_a, runs) for (kind, n_a), runs in sorted(grouped.items(), key=lambda kv: (kv[0][0].value, kv[0][1]))]

    write_sweep_summary(outputs / SWEEP_SUMMARY, rows)
    logger.info(f"[Sweep] Wrote {len(rows)} rows to {outputs / SWEEP_SUMMARY}")
    return rows
