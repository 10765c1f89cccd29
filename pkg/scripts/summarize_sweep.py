"""
summarize_sweep.py — Collect sweep_summary.csv files into one comparison table.

Usage:
    python scripts/summarize_sweep.py sweep_out/                       # one sweep, rich table
    python scripts/summarize_sweep.py run_a/ run_b/ --merge            # average across sweeps
    python scripts/summarize_sweep.py sweep_out/ --pivot               # n_a rows x kind columns
    python scripts/summarize_sweep.py sweep_out/ --markdown            # plain markdown table
    python scripts/summarize_sweep.py sweep_out/ --save merged.csv     # write the merged table
"""

import argparse
import os
import sys

import pandas as pd
from rich import box
from rich.console import Console
from rich.table import Table

console = Console()

SUMMARY_NAME = "sweep_summary.csv"

_REQUIRED_COLUMNS = {"aa_kind", "n_a", "n_seeds", "mean_profit_per_aa", "mean_trades_per_aa", "price_std"}

METRIC_COLS = [
    "mean_profit_per_aa",
    "std_err_profit",
    "mean_total_profit",
    "mean_trades_per_aa",
    "price_std",
    "price_mad_from_fundamental",
]


def _resolve(path: str) -> str:
    return os.path.join(path, SUMMARY_NAME) if os.path.isdir(path) else path


def _validate_columns(df: pd.DataFrame, path: str):
    missing = _REQUIRED_COLUMNS - set(df.columns)
    if missing:
        console.print(f"[red]CSV '{path}' is missing required columns: {sorted(missing)}[/red]")
        sys.exit(1)


def load_data(paths) -> pd.DataFrame:
    frames = []
    for raw in paths:
        path = _resolve(raw)
        if not os.path.exists(path):
            console.print(f"[red]File not found: {path}[/red]")
            sys.exit(1)
        df = pd.read_csv(path, comment="#")
        _validate_columns(df, path)
        df["source"] = os.path.basename(os.path.dirname(os.path.abspath(path)))
        frames.append(df)
    console.print(f"[dim]Loaded {len(frames)} sweep(s): {[f['source'].iloc[0] for f in frames]}[/dim]")
    return pd.concat(frames, ignore_index=True)


def aggregate(df: pd.DataFrame) -> pd.DataFrame:
    """Seed-weighted mean of every metric per (kind, n_a)."""
    rows = []
    for (kind, n_a), sub in df.groupby(["aa_kind", "n_a"]):
        weights = sub["n_seeds"]
        row = {"aa_kind": kind, "n_a": n_a, "n_seeds": int(weights.sum()), "sweeps": len(sub)}
        for col in METRIC_COLS:
            if col not in sub:
                continue
            values = sub[col]
            mask = values.notna()
            row[col] = (values[mask] * weights[mask]).sum() / weights[mask].sum() if mask.any() else float("nan")
        rows.append(row)
    return pd.DataFrame(rows).sort_values(["aa_kind", "n_a"]).reset_index(drop=True)


def _fmt(value, digits=2) -> str:
    return "—" if pd.isna(value) else f"{value:.{digits}f}"


def print_summary_table(agg: pd.DataFrame, title: str):
    t = Table(title=title, box=box.SIMPLE_HEAVY, show_lines=False, title_style="bold white")
    t.add_column("Kind",        style="dim",     no_wrap=True)
    t.add_column("n_a",         justify="right", style="cyan")
    t.add_column("Profit/AA",   justify="right", style="bold green")
    t.add_column("± se",        justify="right", style="dim")
    t.add_column("Total",       justify="right")
    t.add_column("Trades/AA",   justify="right")
    t.add_column("Price std",   justify="right")
    t.add_column("|P-P_f|",     justify="right")
    t.add_column("Seeds",       justify="right", style="dim")

    prev_kind = None
    for _, r in agg.iterrows():
        kind_display = r["aa_kind"] if r["aa_kind"] != prev_kind else ""
        prev_kind = r["aa_kind"]
        t.add_row(
            kind_display,
            str(int(r["n_a"])),
            _fmt(r.get("mean_profit_per_aa")),
            _fmt(r.get("std_err_profit")),
            _fmt(r.get("mean_total_profit")),
            _fmt(r.get("mean_trades_per_aa"), 1),
            _fmt(r.get("price_std"), 4),
            _fmt(r.get("price_mad_from_fundamental"), 4),
            str(int(r["n_seeds"])),
        )

    console.print(t)


def print_pivot_table(agg: pd.DataFrame):
    """One row per n_a, one column group per kind."""
    kinds = sorted(agg["aa_kind"].unique())
    t = Table(title="Sweep — n_a × kind", box=box.SIMPLE_HEAVY, show_lines=True, title_style="bold white")
    t.add_column("n_a", style="cyan", justify="right")
    for kind in kinds:
        t.add_column(f"{kind}\nProfit/AA", justify="right", style="bold green")
        t.add_column(f"{kind}\nTrades/AA", justify="right")
        t.add_column(f"{kind}\nPrice std", justify="right")

    for n_a in sorted(agg["n_a"].unique()):
        row = [str(int(n_a))]
        for kind in kinds:
            match = agg[(agg["aa_kind"] == kind) & (agg["n_a"] == n_a)]
            if match.empty:
                row += ["—"] * 3
            else:
                r = match.iloc[0]
                row += [_fmt(r["mean_profit_per_aa"]), _fmt(r["mean_trades_per_aa"], 1), _fmt(r["price_std"], 4)]
        t.add_row(*row)

    console.print(t)


def print_markdown_table(agg: pd.DataFrame):
    """Plain markdown table. Never truncates."""
    print("| Kind | n_a | Profit/AA | ± se | Trades/AA | Price std | \\|P-P_f\\| | Seeds |")
    print("|------|-----|-----------|------|-----------|-----------|-----------|-------|")
    for _, r in agg.iterrows():
        print(
            f"| {r['aa_kind']} | {int(r['n_a'])} "
            f"| {_fmt(r.get('mean_profit_per_aa'))} | {_fmt(r.get('std_err_profit'))} "
            f"| {_fmt(r.get('mean_trades_per_aa'), 1)} | {_fmt(r.get('price_std'), 4)} "
            f"| {_fmt(r.get('price_mad_from_fundamental'), 4)} | {int(r['n_seeds'])} |"
        )


def main():
    parser = argparse.ArgumentParser(description="Summarize cda-abm sweep results")
    parser.add_argument("paths",      nargs="+", help="Sweep output directories or sweep_summary.csv files")
    parser.add_argument("--merge",    action="store_true", help="Average matching cells across all given sweeps")
    parser.add_argument("--pivot",    action="store_true", help="Pivot table: n_a rows × kind columns")
    parser.add_argument("--markdown", action="store_true", help="Print plain markdown table (no truncation)")
    parser.add_argument("--save",     default=None, help="Write the summarized table to this CSV path")
    args = parser.parse_args()

    df = load_data(args.paths)
    if args.merge or len(args.paths) == 1:
        tables = [("All sweeps" if len(args.paths) > 1 else df["source"].iloc[0], aggregate(df))]
    else:
        tables = [(source, aggregate(sub)) for source, sub in df.groupby("source", sort=False)]

    for title, agg in tables:
        print_summary_table(agg, f"cda-abm Sweep — {title}")
        if args.pivot:
            print_pivot_table(agg)
        if args.markdown:
            print_markdown_table(agg)

    if args.save:
        merged = tables[0][1] if len(tables) == 1 else pd.concat([a.assign(source=s) for s, a in tables], ignore_index=True)
        merged.to_csv(args.save, index=False)
        console.print(f"\n[bold green]Summary saved → {args.save}[/bold green]")


if __name__ == "__main__":
    main()
