"""Console summaries of runs"""

from typing import Any, Dict, List, Optional

from rich.console import Console
from rich.panel import Panel
from rich.table import Table


console = Console()


def format_value(value: Any) -> str:
    """Compact rendering of report values"""
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "✓" if value else "✗"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _flatten(data: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat = {}
    for key, value in data.items():
        if hasattr(value, "model_dump"):
            value = value.model_dump(mode="json")
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        elif isinstance(value, (list, tuple)) and (len(value) > 8 or any(isinstance(v, dict) for v in value)):
            flat[name] = f"[{len(value)} entries]"
        else:
            flat[name] = value
    return flat


def print_run_summary(command: str, summary: Dict[str, Any], exit_code: int = 0, note: str = ""):
    """Key/value table of a pipeline report"""

    style = "green" if exit_code == 0 else "red"
    title = f"novikov-lab {command}"
    if note:
        title += f" ({note})"

    table = Table(title=title, show_header=True, border_style=style)
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")

    for name, value in _flatten(summary).items():
        table.add_row(name, format_value(value))

    console.print(table)


def print_bound_checks(checks: List[Dict[str, Any]], title: str = "A-priori bounds"):
    table = Table(title=title)
    table.add_column("Check", style="cyan")
    table.add_column("Value", justify="right")
    table.add_column("Bound", justify="right")
    table.add_column("Margin", justify="right")
    table.add_column("", width=2)

    for check in checks:
        status_style = "green" if check["passed"] else "red"
        table.add_row(
            check["name"],
            format_value(check["value"]),
            format_value(check["bound"]),
            format_value(check["margin"]),
            f"[{status_style}]{format_value(check['passed'])}[/{status_style}]",
        )

    console.print(table)


def print_history(runs: List, total: Optional[int] = None, title: str = "Recent runs"):
    """Table of recorded runs; ``total`` counts the whole ledger"""

    if not runs:
        console.print("📭 No runs recorded", style="yellow")
        return

    shown = f"{len(runs)} of {total}" if total is not None else str(len(runs))
    table = Table(title=f"{title} ({shown})")
    table.add_column("#", style="cyan", width=4)
    table.add_column("When", width=16)
    table.add_column("Command", style="bold")
    table.add_column("Input hash", width=10)
    table.add_column("Exit", justify="right")
    table.add_column("t*", justify="right")
    table.add_column("Seconds", justify="right")
    table.add_column("Output")

    for run in runs:
        exit_style = "green" if run.exit_code == 0 else "red"
        table.add_row(
            str(run.id),
            run.created_at.strftime('%Y-%m-%d %H:%M') if run.created_at else "",
            run.command,
            run.input_hash[:8],
            f"[{exit_style}]{run.exit_code}[/{exit_style}]",
            format_value(run.t_star),
            format_value(run.wall_seconds),
            run.output_dir,
        )

    console.print(table)


def print_artifacts(out_dir: str, files: List[str]):
    body = "\n".join(f"• {name}" for name in files[:12])
    if len(files) > 12:
        body += f"\n… and {len(files) - 12} more"
    console.print(Panel(body or "(none)", title=f"Artifacts in {out_dir}", border_style="blue"))
