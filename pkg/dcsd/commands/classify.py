"""
Classify Command - Classify double circulant codes up to equivalence

Handles:
- Search, minimum weight screen, enumerator fitting and equivalence dedup
- Classifying a supplied row list instead of searching
- Appending records to a record file, sharding and resumable checkpoints
"""

import json
from dataclasses import replace
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.table import Table

from dcsd.core.codebook import (
    ListCheckpoint,
    RecordStore,
    encode_octal,
    read_row_list,
    shard_positions,
)
from dcsd.core.codes import Parity
from dcsd.core.errors import DcsdError
from dcsd.core.search import SearchSpec, canonical_row, classify as classify_search, classify_rows
from dcsd.commands.common import get_config_manager, progress_bar, require_file
from dcsd.commands.search import build_spec, load_resume

console = Console()


def classify(
    kind: str = typer.Option(..., "--kind", "-k", help="pure or bordered"),
    half: int = typer.Option(..., "--half", "-n", help="Half size n of the circulant block"),
    dmin: int = typer.Option(..., "--dmin", "-d", help="Minimum weight every kept code must reach"),
    parity: str = typer.Option("singly_even", "--parity", help="singly_even or doubly_even"),
    rows: Optional[Path] = typer.Option(None, "--rows", help="Classify this row list instead of searching"),
    out: Path = typer.Option(Path("records.txt"), "--out", "-o", help="Record file to append to"),
    with_aut: bool = typer.Option(False, "--aut", help="Compute automorphism group orders"),
    node_budget: Optional[int] = typer.Option(None, "--node-budget", help="Equivalence search nodes before giving up"),
    shard: Optional[str] = typer.Option(None, "--shard", help="Shard i of N, as i/N (necklaces, or list positions with --rows)"),
    budget: Optional[int] = typer.Option(None, "--budget", min=1, help="Necklaces (or listed rows) to examine before checkpointing"),
    resume: Optional[Path] = typer.Option(None, "--resume", help="Continue from this checkpoint"),
    checkpoint: Path = typer.Option(Path("classify.ckpt"), "--checkpoint", help="Where to write the checkpoint"),
):
    """
    Classify the double circulant self-dual codes reaching --dmin.

    One record per equivalence class is appended to --out. Records already
    in the file are kept, so shards can share one record file. Classes whose
    equivalence could not be settled within the node budget are kept and
    marked with a trailing '?'.
    """
    spec = build_spec(kind, half, dmin, parity, shard, budget)
    config_manager = get_config_manager()
    settings = config_manager.engine_settings()
    nodes = node_budget or config_manager.node_budget

    try:
        store = RecordStore(out, spec_echo=json.dumps(spec.model_dump(mode="json"), sort_keys=True))

        if rows is not None:
            entries = read_row_list(require_file(rows, "--rows"), spec.kind, half)
            state = _list_state(rows, spec, resume)
            positions, next_position = shard_positions(len(entries), state, budget)
            chosen = [entries[p] for p in positions]
            with progress_bar(f"Classifying {len(chosen)} rows") as progress:
                records, screened = classify_rows(
                    [e.spec.first_row for e in chosen],
                    spec.kind,
                    dmin,
                    settings,
                    parity_target=Parity(parity),
                    node_budget=nodes,
                    with_aut=with_aut,
                    progress=progress,
                )
            index_of = {}
            for e in chosen:
                index_of.setdefault(canonical_row(e.spec.first_row), e.index)
            records = [replace(r, index=index_of.get(r.canonical_row)) for r in records]
            candidates = len(chosen)
            pending = None
            if next_position is not None:
                pending = state.model_copy(update={"position": next_position})
        else:
            start = load_resume(resume, spec)
            with progress_bar("Screening candidates") as progress:
                result = classify_search(
                    spec,
                    settings,
                    node_budget=nodes,
                    with_aut=with_aut,
                    resume=start,
                    progress=progress,
                )
            records, screened = result.records, result.screened
            candidates, pending = result.candidates, result.checkpoint

        added = store.extend(records)
        _print_summary(records, candidates, screened, added, out)

        if pending is not None:
            pending.save(checkpoint)
            console.print(f"[yellow]Budget reached; resume with --resume {checkpoint}[/yellow]")

    except DcsdError as e:
        console.print(f"[red]Error classifying codes: {e}[/red]")
        raise typer.Exit(1)


def _list_state(rows: Path, spec: SearchSpec, resume: Optional[Path]) -> ListCheckpoint:
    """Where a row-list classification starts: the checkpoint if given, else position 0."""
    state = ListCheckpoint(
        job="classify",
        source=str(rows),
        kind=spec.kind,
        half_size=spec.half_size,
        shard_index=spec.shard_index,
        shard_total=spec.shard_total,
    )
    if resume is None:
        return state
    saved = ListCheckpoint.load(require_file(resume, "--resume"))
    if not saved.same_job(state):
        raise typer.BadParameter("checkpoint was written for a different job", param_hint="--resume")
    return saved


def _print_summary(records, candidates: int, screened: int, added: int, out: Path) -> None:
    table = Table(title="Classified Codes")
    table.add_column("Row", style="cyan")
    table.add_column("d", justify="right")
    table.add_column("Enumerator", style="green")
    table.add_column("|Aut|", justify="right", style="yellow")
    for record in records:
        aut = "-"
        if record.aut_order is not None:
            aut = f"{'>=' if record.aut_partial else ''}{record.aut_order}"
        table.add_row(
            encode_octal(record.canonical_row) + (" ?" if record.undecided else ""),
            str(record.d),
            record.enumerator.to_token() if record.enumerator else "-",
            aut,
        )
    if records:
        console.print(table)
    undecided = sum(1 for r in records if r.undecided)
    console.print(
        f"[green]{candidates} candidates, {screened} reached the minimum weight, "
        f"{len(records)} classes ({added} new in {out})[/green]"
    )
    if undecided:
        console.print(
            f"[yellow]{undecided} classes left undecided by the node budget; "
            f"raise --node-budget to settle them[/yellow]"
        )
