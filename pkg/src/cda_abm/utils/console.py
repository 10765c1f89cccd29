from rich.console import Console
from rich.table import Table
from typing import List, Optional

from cda_abm.core.types import RunResult, SimulationTrace, SweepRow

console = Console()

def _fmt(value: Optional[float], digits: int = 2) -> str:
    return "-" if value is None else f"{value:.{digits}f}"

def print_run_summary(result: RunResult):
    stats = result.price_stats
    table = Table(title=f"Run seed={result.seed} kind={result.kind.value} n_a={result.n_a}", show_header=True, header_style="bold magenta")
    table.add_column("Metric", style="dim")
    table.add_column("Value", justify="right")
    table.add_row("P^t mean", _fmt(stats.mean))
    table.add_row("P^t std", _fmt(stats.std, 4))
    table.add_row("P^t min / max", f"{_fmt(stats.min)} / {_fmt(stats.max)}")
    table.add_row("mean |P^t - P_f|", _fmt(stats.mean_abs_deviation_from_fundamental, 4))
    table.add_row("trades", str(result.trade_digest.count))
    table.add_row("expired orders", str(result.expired_orders))
    table.add_row("mean AA profit", _fmt(result.mean_profit_per_aa))
    table.add_row("mean AA trades", _fmt(result.mean_trades_per_aa))
    table.add_row("trade checksum", result.trade_digest.checksum)
    table.add_row("price checksum", result.price_checksum)
    console.print(table)

def print_sweep_rows(rows: List[SweepRow], title: str = "Sweep Summary"):
    table = Table(title=title, show_header=True, header_style="bold cyan")
    for col in ("kind", "n_a", "seeds", "profit/AA", "±se", "total profit", "trades/AA", "price std", "|P-P_f|"):
        table.add_column(col, justify="right")
    for r in rows:
        table.add_row(
            r.aa_kind.value, str(r.n_a), str(r.n_seeds),
            _fmt(r.mean_profit_per_aa), _fmt(r.std_err_profit), _fmt(r.mean_total_profit),
            _fmt(r.mean_trades_per_aa), _fmt(r.price_std, 4), _fmt(r.price_mad_from_fundamental, 4),
        )
    console.print(table)

def print_trace(trace: SimulationTrace):
    table = Table(title="Run Trace", show_header=True, header_style="bold cyan")
    table.add_column("t", style="dim", justify="right")
    table.add_column("Action")
    table.add_column("Details", ratio=1)

    for event in trace.events:
        t = "-" if event.time is None else str(event.time)
        if event.action == "aa_activated":
            details = f"AA {event.details.get('aa_index')} | slot {event.details.get('slot')} | loop {event.details.get('loop')}"
            table.add_row(t, "[bold green]Activated[/bold green]", details)
        elif event.action == "aa_skipped":
            table.add_row(t, "[bold red]Skipped[/bold red]", f"{event.details.get('count')} AA orders: {event.details.get('reason')}")
        else:
            table.add_row(t, event.action, str(event.details))

    console.print(table)
