from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.table import Table

from wienerlab import lab
from wienerlab.logs import configure_logging
from wienerlab.schemas.experiment import Report

app = typer.Typer(help="Time-frequency laboratory for Schrodinger-type multipliers on Wiener amalgam spaces.")
console = Console()


def _print_summary(report: Report) -> None:
    table = Table(title=f"{report.config.scenario.value} checks")
    table.add_column("check")
    table.add_column("value", justify="right")
    table.add_column("bound", justify="right")
    table.add_column("status")
    for check in report.checks:
        status = "[green]pass[/green]" if check.passed else "[red]FAIL[/red]"
        if check.reference is not None:
            bound = f"{check.comparison} {check.reference:g} ±{check.tolerance:.0%}"
        else:
            bound = f"{check.comparison} {check.tolerance:g}"
        table.add_row(check.name, f"{check.value:.3e}", bound, status)
    console.print(table)
    for scan in report.scans:
        console.print(f"{scan.label}: [bold]{scan.classification.value}[/bold] (slope {scan.slope:.3f})")


@app.command()
def run(
    config: Optional[Path] = typer.Option(None, "--config", help="Flat key = value configuration file"),
    scenario: Optional[str] = typer.Option(None, "--scenario", help="identities, norms, lemma_scan, sharpness or operator_spot"),
    p: Optional[float] = typer.Option(None, "--p"),
    q: Optional[float] = typer.Option(None, "--q", help="Use inf for the endpoint"),
    s: Optional[float] = typer.Option(None, "--s"),
    s_list: Optional[str] = typer.Option(None, "--s-list", help="Comma separated weight orders"),
    n_list: Optional[str] = typer.Option(None, "--n-list", help="Comma separated, strictly increasing support radii"),
    spot_n_list: Optional[str] = typer.Option(None, "--spot-n-list", help="Support radii for the operator path"),
    grid_m: Optional[int] = typer.Option(None, "--grid-m"),
    grid_l: Optional[float] = typer.Option(None, "--grid-l"),
    dim: Optional[int] = typer.Option(None, "--dim"),
    window: Optional[str] = typer.Option(None, "--window"),
    fmt: Optional[str] = typer.Option(None, "--format", help="json or csv"),
    out: Optional[Path] = typer.Option(None, "--out"),
    log_level: str = typer.Option("INFO", "--log-level"),
    json_logs: bool = typer.Option(False, "--json-logs"),
):
    """Run one scenario and exit with 0 (pass), 1 (check failed), 2 (configuration) or 3 (runtime)."""
    configure_logging(log_level, json=json_logs)
    overrides = {
        "scenario": scenario,
        "p": p,
        "q": q,
        "s": s,
        "s_list": s_list,
        "n_list": n_list,
        "spot_n_list": spot_n_list,
        "grid_m": grid_m,
        "grid_l": grid_l,
        "dimension": dim,
        "window": window,
        "format": fmt,
        "out": out,
    }
    code = lab.main(config, overrides, on_report=_print_summary)
    raise typer.Exit(code)


@app.command()
def scenarios():
    """List the available scenarios."""
    table = Table(title="scenarios")
    table.add_column("name")
    table.add_column("what it checks")
    for name, description in lab.SCENARIOS.items():
        table.add_row(name.value, description)
    console.print(table)


if __name__ == "__main__":
    app()
