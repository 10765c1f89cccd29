"""CSV export. Every file starts with a `#schema=N` comment line."""

import logging
import os
from decimal import Decimal
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from cda_abm.core.errors import OutputError
from cda_abm.core.types import RunResult, SweepRow
from cda_abm.utils.config import config

logger = logging.getLogger(__name__)

SWEEP_SUMMARY = "sweep_summary.csv"


def schema_version() -> int:
    return int(config.get("export.schema_version", 1))


def tick_decimals(tick_size: float) -> int:
    exponent = Decimal(str(tick_size)).normalize().as_tuple().exponent
    return max(0, -exponent)


def format_price(ticks: int, tick_size: float) -> str:
    """Exact decimal rendering of `ticks` x `tick_size`, with the tick's number of decimals."""
    d = tick_decimals(tick_size)
    scale = int(round(tick_size * 10**d))
    units = ticks * scale
    if d == 0:
        return str(units)
    sign = "-" if units < 0 else ""
    whole, frac = divmod(abs(units), 10**d)
    return f"{sign}{whole}.{frac:0{d}d}"


def ensure_output_dir(path: Path) -> Path:
    """Creates `path` if needed; raises OutputError if it cannot be written."""
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"Cannot create output directory {path}: {e}") from e
    if not path.is_dir() or not os.access(path, os.W_OK):
        raise OutputError(f"Output directory {path} is not writable")
    return path


def _write(df: pd.DataFrame, path: Path, float_format: Optional[str] = None) -> Path:
    try:
        with open(path, "w", newline="") as f:
            f.write(f"#schema={schema_version()}\n")
            df.to_csv(f, index=False, lineterminator="\n", float_format=float_format, na_rep="")
    except OSError as e:
        raise OutputError(f"Failed writing {path}: {e}") from e
    logger.debug(f"[Export] Wrote {len(df)} rows to {path}")
    return path


def write_price_series(path: Path, series: List[int], stride: int, tick_size: float) -> Path:
    df = pd.DataFrame({
        "t": [i * stride for i in range(len(series))],
        "mid_price": [format_price(p, tick_size) for p in series],
    })
    return _write(df, path)


def write_ledger(path: Path, result: RunResult) -> Path:
    tick = result.tick_size
    rows = [
        {
            "aa_index": e.aa_index,
            "kind": e.kind.value,
            "slot": e.slot,
            "activation_loop": e.activation_loop,
            "position": e.position,
            "cash": format_price(int(round(e.cash / tick)), tick),
            "profit": format_price(int(round(e.profit / tick)), tick),
            "trades": e.trades,
        }
        for e in result.aa_ledger
    ]
    columns = ["aa_index", "kind", "slot", "activation_loop", "position", "cash", "profit", "trades"]
    return _write(pd.DataFrame(rows, columns=columns), path)


def write_trades(path: Path, trades: List[Dict[str, int]], tick_size: float) -> Path:
    df = pd.DataFrame(trades, columns=["time", "price", "size", "buyer", "seller"])
    df["price"] = [format_price(p, tick_size) for p in df["price"]]
    return _write(df, path)


def write_sweep_summary(path: Path, rows: List[SweepRow]) -> Path:
    ordered = sorted(rows, key=lambda r: (r.aa_kind.value, r.n_a))
    df = pd.DataFrame([r.model_dump(mode="json") for r in ordered], columns=list(SweepRow.model_fields))
    return _write(df, path, float_format="%.6f")


def read_sweep_summary(path: Path) -> List[SweepRow]:
    df = pd.read_csv(path, comment="#")
    df = df.astype(object).where(pd.notna(df), None)
    return [SweepRow.model_validate(rec) for rec in df.to_dict(orient="records")]


def run_file_stem(kind: str, n_a: int, seed: int) -> str:
    return f"{kind}_{n_a}_{seed}"
