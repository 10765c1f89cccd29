import logging
import typer
from typing import Any, Dict, List, Optional
from pathlib import Path
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.progress import Progress
from rich.table import Table

from cda_abm.cli.config_loader import ConfigLoader, parse_assignments
from cda_abm.core.errors import CdaAbmError
from cda_abm.registry import registry
from cda_abm.utils.config import config

app = typer.Typer(help="cda-abm CLI: agent-based market simulation with a continuous double auction.")
console = Console()


def _setup_logging(verbose: bool):
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def _fail(message: str):
    console.print(f"[bold red]Error:[/bold red] {message}")
    raise typer.Exit(code=1)


def _load(config_path: Optional[Path]) -> Dict[str, Any]:
    return ConfigLoader.load_config(config_path) if config_path else {}


def _overrides(sets: Optional[List[str]], **flags: Any) -> Dict[str, Any]:
    data = parse_assignments(sets or [], source="--set")
    data.update({k: v for k, v in flags.items() if v is not None})
    return data


@app.command()
def init(
    path: Path = typer.Option(Path("cda_abm.conf"), "--output", "-o", help="Output path for the config file."),
    force: bool = typer.Option(False, "--force", "-f", help="Overwrite an existing file."),
):
    """
    Write a flat key=value config with the scaled profile and sweep defaults.
    """
    if path.exists() and not force:
        _fail(f"{path} already exists (use --force to overwrite).")

    lines = ["# cda-abm configuration (key=value; lists are comma separated)", "", "# simulation"]
    for key, value in config.profile("scaled").items():
        lines.append(f"{key}={str(value).lower() if isinstance(value, bool) else value}")
    lines += ["", "# sweep"]
    lines.append("na_values=" + ",".join(str(v) for v in config.get("sweep.na_values")))
    lines.append("aa_kinds=" + ",".join(config.get("sweep.aa_kinds")))
    lines.append(f"n_seeds={config.get('sweep.n_seeds')}")
    lines.append(f"base_seed={config.get('sweep.base_seed')}")
    lines.append("outputs=sweep_out")
    path.write_text("\n".join(lines) + "\n")

    console.print(f"[bold green]Success![/bold green] Created configuration at {path}")


@app.command("list")
def list_components():
    """
    List all registered strategies and observers.
    """
    import cda_abm.components  # noqa
    import cda_abm.validation.suite  # noqa

    console.print(Panel("[bold blue]Registered Components[/bold blue]"))
    for category, components in registry.list_all().items():
        console.print(f"\n[bold]{category.capitalize()}s:[/bold]")
        if not components:
            console.print("  [dim]None[/dim]")
        for name, cls in components.items():
            doc = cls.__doc__.strip().split('\n')[0] if cls.__doc__ else "No description"
            console.print(f"  - [cyan]{name}[/cyan]: {doc}")


@app.command()
def run(
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help="key=value or YAML config file."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed."),
    na: Optional[int] = typer.Option(None, "--na", help="Number of additional agents."),
    kind: Optional[str] = typer.Option(None, "--kind", help="Additional agent kind: none, afa or ata."),
    te: Optional[int] = typer.Option(None, "--te", help="Number of NA order events."),
    out: Path = typer.Option(Path("run_out"), "--out", "-o", help="Output directory."),
    stride: int = typer.Option(1, "--stride", help="Keep every k-th P^t in prices.csv."),
    trades: bool = typer.Option(False, "--trades", help="Also write the full trade log."),
    paper_scale: bool = typer.Option(False, "--paper-scale", help="Use the full published run length."),
    observer_name: Optional[str] = typer.Option(None, "--observer", help="Attach a registered observer (see `list`), e.g. invariants."),
    sets: Optional[List[str]] = typer.Option(None, "--set", "-s", help="Override any config field (KEY=VALUE). Repeatable."),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log progress and show the run trace."),
):
    """
    Run a single simulation and write prices.csv and ledger.csv.
    """
    from cda_abm.core.engine import create_observer, run_simulation
    from cda_abm.experiments.single import export_run
    from cda_abm.utils.console import print_run_summary, print_trace

    _setup_logging(verbose)
    try:
        overrides = _overrides(sets, seed=seed, n_a=na, aa_kind=kind, t_e=te, series_stride=max(stride, 1), record_trades=trades or None)
        sim_config = ConfigLoader.create_sim_config(_load(config_path), overrides, paper_scale=paper_scale)
        console.print(f"[dim]Running t_e={sim_config.t_e} kind={sim_config.aa_kind.value} n_a={sim_config.n_a} seed={sim_config.seed}...[/dim]")
        observer = create_observer(observer_name, sim_config) if observer_name else None
        with console.status("[bold green]Simulating...[/bold green]"):
            result = run_simulation(sim_config, observer=observer)
        export_run(result, out)
    except CdaAbmError as e:
        _fail(str(e))

    print_run_summary(result)
    if verbose:
        print_trace(result.trace)
    if observer is not None:
        problems = observer.problems()
        for problem in problems:
            console.print(f"  [yellow]{problem}[/yellow]")
        if problems:
            _fail(f"Observer '{observer_name}' reported {len(problems)} problem(s).")
        console.print(f"[green]Observer '{observer_name}' reported no problems.[/green]")
    console.print(f"[bold green]Success![/bold green] Outputs written to {out}")


@app.command()
def sweep(
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help="key=value or YAML config file."),
    kinds: Optional[List[str]] = typer.Option(None, "--kind", help="AA kind to sweep (afa/ata). Repeatable."),
    na_values: Optional[List[int]] = typer.Option(None, "--na", help="n_a grid value. Repeatable."),
    n_seeds: Optional[int] = typer.Option(None, "--seeds", help="Number of seeds per cell."),
    seed: Optional[int] = typer.Option(None, "--seed", help="First seed of the ensemble."),
    te: Optional[int] = typer.Option(None, "--te", help="Number of NA order events per run."),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory."),
    paired: bool = typer.Option(False, "--paired", help="Share NA randomness across cells of a seed."),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Worker processes (capped by CDA_ABM_THREADS)."),
    stride: Optional[int] = typer.Option(None, "--stride", help="Also write per-run prices every k steps."),
    paper_scale: bool = typer.Option(False, "--paper-scale", help="Use the full published run length."),
    sets: Optional[List[str]] = typer.Option(None, "--set", "-s", help="Override any config field (KEY=VALUE). Repeatable."),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log progress."),
):
    """
    Run seed ensembles over n_a for each AA kind and write sweep_summary.csv.
    """
    from cda_abm.experiments.sweep import plan_cells, run_sweep
    from cda_abm.utils.console import print_sweep_rows

    _setup_logging(verbose)
    try:
        data = _load(config_path)
        spec = ConfigLoader.create_sweep_spec(
            data,
            overrides=_overrides(sets, t_e=te, series_stride=stride),
            sweep_overrides={
                "aa_kinds": kinds or None,
                "na_values": na_values or None,
                "n_seeds": n_seeds,
                "base_seed": seed,
                "outputs": str(out) if out else None,
                "paired": paired or None,
                "workers": workers,
            },
            paper_scale=paper_scale,
        )
        total = len(plan_cells(spec))
        console.print(f"[bold green]Sweep:[/bold green] {total} runs -> {spec.outputs}")
        with Progress(console=console, transient=True) as progress:
            task = progress.add_task("Simulating", total=total)
            rows = run_sweep(spec, on_result=lambda cell, result: progress.advance(task))
    except CdaAbmError as e:
        _fail(str(e))

    print_sweep_rows(rows)
    console.print(f"[bold green]Success![/bold green] Summary written to {spec.outputs / 'sweep_summary.csv'}")


@app.command()
def validate(
    seed: int = typer.Option(42, "--seed", help="Seed for the small simulation checks."),
    oracle_orders: Optional[int] = typer.Option(None, "--oracle-orders", help="Random orders for the matcher oracle check."),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log each check."),
):
    """
    Run the invariant suite (matcher oracle, conservation, determinism, reduction) on small instances.
    """
    from cda_abm.validation.suite import run_validation_suite

    _setup_logging(verbose)
    try:
        with console.status("[bold green]Validating...[/bold green]"):
            results = run_validation_suite(seed=seed, oracle_orders=oracle_orders)
    except CdaAbmError as e:
        _fail(str(e))

    table = Table(title="Validation", show_header=True, header_style="bold cyan")
    table.add_column("Check")
    table.add_column("Result", justify="center")
    table.add_column("Detail", ratio=1)
    for r in results:
        table.add_row(r.name, "[green]ok[/green]" if r.passed else "[red]FAILED[/red]", r.detail)
    console.print(table)

    failed = [r.name for r in results if not r.passed]
    if failed:
        _fail(f"{len(failed)} check(s) failed: {', '.join(failed)}")
    console.print("[bold green]Success![/bold green] All invariants hold.")


@app.command()
def stability(
    kind: str = typer.Option(..., "--kind", help="AA kind to compare against the no-AA baseline (afa/ata)."),
    na: Optional[int] = typer.Option(None, "--na", help="Number of additional agents."),
    n_seeds: Optional[int] = typer.Option(None, "--seeds", help="Number of seed pairs."),
    seed: int = typer.Option(1, "--seed", help="First seed."),
    config_path: Optional[Path] = typer.Option(None, "--config", "-c", help="key=value or YAML config file."),
    te: Optional[int] = typer.Option(None, "--te", help="Number of NA order events per run."),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Worker processes (capped by CDA_ABM_THREADS)."),
    paper_scale: bool = typer.Option(False, "--paper-scale", help="Use the full published run length."),
    sets: Optional[List[str]] = typer.Option(None, "--set", "-s", help="Override any config field (KEY=VALUE). Repeatable."),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log progress."),
):
    """
    Compare the price std with and without AAs over paired seeds.
    """
    from cda_abm.core.types import AgentKind
    from cda_abm.experiments.stability import run_paired_stability

    _setup_logging(verbose)
    try:
        base = ConfigLoader.create_sim_config(_load(config_path), _overrides(sets, t_e=te), paper_scale=paper_scale)
        try:
            aa_kind = AgentKind(kind.lower())
        except ValueError:
            _fail(f"Unknown kind {kind!r}; expected afa or ata.")
        if aa_kind is AgentKind.NONE:
            _fail("stability needs an AA kind (afa or ata).")
        n_a = na if na is not None else config.get("stability.n_a", 99)
        count = n_seeds or config.get("stability.n_seeds", 10)
        with console.status("[bold green]Simulating pairs...[/bold green]"):
            report = run_paired_stability(base, aa_kind, n_a, list(range(seed, seed + count)), workers=workers)
    except CdaAbmError as e:
        _fail(str(e))

    table = Table(title=f"Paired stability: {aa_kind.value} x {n_a}", show_header=True, header_style="bold cyan")
    for col in ("seed", "baseline std", "with AAs std", "delta", "baseline |P-P_f|", "with AAs |P-P_f|"):
        table.add_column(col, justify="right")
    for o in report.outcomes:
        table.add_row(str(o.seed), f"{o.baseline_std:.4f}", f"{o.treated_std:.4f}", f"{o.delta:+.4f}", f"{o.baseline_mad:.4f}", f"{o.treated_mad:.4f}")
    console.print(table)
    console.print(f"Lower std in {report.fraction_lower:.0%} of pairs, higher in {report.fraction_higher:.0%}.")


@app.command()
def report(
    summary: Path = typer.Argument(..., help="Path to a sweep_summary.csv."),
):
    """
    Trend statistics of a sweep: profit vs n_a and the trade-count shape.
    """
    from cda_abm.experiments.analysis import evaluate_sweep
    from cda_abm.experiments.io import read_sweep_summary
    from cda_abm.utils.console import print_sweep_rows

    if not summary.exists():
        _fail(f"File {summary} not found.")
    try:
        rows = read_sweep_summary(summary)
    except Exception as e:
        _fail(f"Cannot read {summary}: {e}")

    print_sweep_rows(rows)
    for tr in evaluate_sweep(rows):
        lines = [
            f"n_a grid: {tr.na_values}",
            f"Spearman rho(n_a, profit/AA): {'-' if tr.spearman_rho is None else f'{tr.spearman_rho:.3f}'}",
            f"profit/AA first -> last: {tr.first_profit} -> {tr.last_profit}",
            f"profit increases with n_a: {tr.profit_increases}",
            f"profit decreases with n_a: {tr.profit_decreases}",
        ]
        if tr.trade_shape:
            lines.append(
                f"trades/AA drop to knee: {tr.trade_shape.early_drop:.1%}, late change: {tr.trade_shape.late_relative_change:.1%}, "
                f"rapid-then-stable: {tr.trade_shape.rapid_then_stable}"
            )
        console.print(Panel("\n".join(lines), title=f"[bold]{tr.kind.value}[/bold]"))


def main():
    app()

if __name__ == "__main__":
    main()
