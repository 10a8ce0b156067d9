"""
Neighbors Command - Rank pairs and neighbor screens

Handles:
- rank(M) and rank(M | 1) for the minimum weight codeword matrix M
- The neighbor bound and the best neighbor minimum weight
- Row lists with sharding, budgets and resumable checkpoints
"""

import json
from pathlib import Path
from typing import List, Optional, Tuple

import typer
from rich.console import Console
from rich.table import Table

from dcsd.core.codebook import ListCheckpoint, read_row_list, shard_positions
from dcsd.core.errors import DcsdError
from dcsd.core.neighbors import NeighborReport, neighbor_report
from dcsd.commands.common import (
    get_config_manager,
    parse_kind,
    parse_shard,
    progress_bar,
    require_file,
    row_spec,
)

console = Console()


def neighbors(
    row: Optional[str] = typer.Option(None, "--row", "-r", help="First row, octal or binary"),
    file: Optional[Path] = typer.Option(None, "--file", "-f", help="Row list file"),
    kind: str = typer.Option("pure", "--kind", "-k", help="pure or bordered"),
    half: Optional[int] = typer.Option(None, "--half", "-n", help="Half size n"),
    screen: bool = typer.Option(True, "--screen/--no-screen", help="Examine the neighbors themselves"),
    shard: Optional[str] = typer.Option(None, "--shard", help="Process shard i of N rows, as i/N"),
    budget: Optional[int] = typer.Option(None, "--budget", min=1, help="Rows to process before checkpointing"),
    resume: Optional[Path] = typer.Option(None, "--resume", help="Continue from this checkpoint"),
    checkpoint: Path = typer.Option(Path("neighbors.ckpt"), "--checkpoint", help="Where to write the checkpoint"),
    as_json: bool = typer.Option(False, "--json", help="One JSON object per code instead of a table"),
):
    """
    Report rank pairs and neighbor minimum weights of self-dual codes.
    """
    if (row is None) == (file is None):
        raise typer.BadParameter("give exactly one of --row and --file")
    code_kind = parse_kind(kind)
    settings = get_config_manager().engine_settings()

    try:
        if row is not None:
            specs = [(1, row_spec(row, code_kind, half))]
            positions, next_position = [0], None
            state = None
        else:
            require_file(file, "--file")
            if half is None:
                raise typer.BadParameter("--file needs --half", param_hint="--half")
            entries = read_row_list(file, code_kind, half)
            specs = [(e.index, e.spec) for e in entries]
            state = _start_state(file, code_kind, half, shard, resume)
            positions, next_position = shard_positions(len(specs), state, budget)

        results: List[Tuple[int, NeighborReport]] = []
        with progress_bar("Screening neighbors", enabled=not as_json) as progress:
            for position in positions:
                index, spec = specs[position]
                report = neighbor_report(spec.build(), settings, screen=screen, progress=progress)
                results.append((index, report))
                if as_json:
                    typer.echo(json.dumps({"index": index, **_as_dict(report)}))

        if not as_json:
            _print_table(results, screen)

        if state is not None and next_position is not None:
            state.model_copy(update={"position": next_position}).save(checkpoint)
            console.print(f"[yellow]Budget reached; resume with --resume {checkpoint}[/yellow]")

    except DcsdError as e:
        console.print(f"[red]Error analysing neighbors: {e}[/red]")
        raise typer.Exit(1)


def _start_state(
    file: Path, kind, half: int, shard: Optional[str], resume: Optional[Path]
) -> ListCheckpoint:
    shard_index, shard_total = parse_shard(shard)
    state = ListCheckpoint(
        job="neighbors",
        source=str(file),
        kind=kind,
        half_size=half,
        shard_index=shard_index,
        shard_total=shard_total,
    )
    if resume is None:
        return state
    saved = ListCheckpoint.load(require_file(resume, "--resume"))
    if not saved.same_job(state):
        raise typer.BadParameter("checkpoint was written for a different job", param_hint="--resume")
    return saved


def _as_dict(report: NeighborReport) -> dict:
    return {
        "length": report.length,
        "d": report.d,
        "rank_m": report.rank_m,
        "rank_m_aug": report.rank_m_aug,
        "neighbor_bound": report.neighbor_bound,
        "best_neighbor_min_weight": report.best_neighbor_min_weight,
        "neighbors_examined": report.neighbors_examined,
    }


def _print_table(results: List[Tuple[int, NeighborReport]], screen: bool) -> None:
    table = Table(title="Neighbor Analysis")
    table.add_column("i", justify="right", style="cyan")
    table.add_column("n", justify="right")
    table.add_column("d", justify="right")
    table.add_column("rank M", justify="right", style="green")
    table.add_column("rank M|1", justify="right", style="green")
    table.add_column("bound", justify="right")
    if screen:
        table.add_column("best d'", justify="right", style="yellow")

    for index, report in results:
        cells = [
            str(index),
            str(report.length),
            str(report.d),
            str(report.rank_m),
            str(report.rank_m_aug),
            str(report.neighbor_bound),
        ]
        if screen:
            cells.append(str(report.best_neighbor_min_weight))
        table.add_row(*cells)

    console.print(table)
