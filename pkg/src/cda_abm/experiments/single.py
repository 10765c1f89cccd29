import logging
from pathlib import Path
from typing import Dict

from cda_abm.config.models import SimConfig
from cda_abm.core.engine import run_simulation
from cda_abm.core.types import RunResult
from cda_abm.experiments.io import ensure_output_dir, write_ledger, write_price_series, write_trades

logger = logging.getLogger(__name__)


def emit_timeseries(config: SimConfig, seed: int, path: Path, stride: int = 1) -> Path:
    """Runs one simulation and writes every `stride`-th (t, P^t) pair to `path`."""
    if stride < 1:
        stride = 1
    ensure_output_dir(path.parent)
    result = run_simulation(config.with_updates(seed=seed, series_stride=stride))
    return write_price_series(path, result.price_series or [], stride, result.tick_size)


def export_run(result: RunResult, out: Path) -> Dict[str, Path]:
    """Writes prices.csv, ledger.csv and (when recorded) trades.csv for a finished run."""
    ensure_output_dir(out)
    written = {"ledger": write_ledger(out / "ledger.csv", result)}
    if result.price_series is not None:
        written["prices"] = write_price_series(out / "prices.csv", result.price_series, result.series_stride, result.tick_size)
    if result.trades is not None:
        written["trades"] = write_trades(out / "trades.csv", result.trades, result.tick_size)
    for name, path in written.items():
        logger.info(f"[Export] {name}: {path}")
    return written
