"""
Search Command - Enumerate canonical self-dual first rows

Handles:
- Building a search specification from the command line
- Streaming canonical candidate rows to a file or stdout
- Sharding, work budgets and resumable checkpoints
"""

from pathlib import Path
from typing import Optional

import typer
from rich.console import Console

from dcsd.core.codebook import encode_octal
from dcsd.core.codes import Parity
from dcsd.core.errors import BudgetExhausted, DcsdError, InvalidSpec
from dcsd.core.search import Checkpoint, SearchSpec, enumerate_candidates
from dcsd.commands.common import get_config_manager, parse_kind, parse_shard, require_file

console = Console(stderr=True)


def build_spec(
    kind: str,
    half: int,
    dmin: int,
    parity: str,
    shard: Optional[str],
    budget: Optional[int],
) -> SearchSpec:
    """SearchSpec from command-line values; problems are usage errors."""
    shard_index, shard_total = parse_shard(shard)
    try:
        return SearchSpec.parse(
            kind=parse_kind(kind),
            half_size=half,
            parity_target=Parity(parity),
            d_target=dmin,
            shard_index=shard_index,
            shard_total=shard_total,
            budget=budget,
            shard_prefix_min=get_config_manager().config.search.shard_prefix_min,
        )
    except (InvalidSpec, ValueError) as e:
        raise typer.BadParameter(str(e)) from None


def load_resume(resume: Optional[Path], spec: SearchSpec) -> Optional[Checkpoint]:
    if resume is None:
        return None
    try:
        saved = Checkpoint.load(require_file(resume, "--resume"))
    except InvalidSpec as e:
        raise typer.BadParameter(str(e), param_hint="--resume") from None
    if not saved.spec.same_search(spec):
        raise typer.BadParameter("checkpoint was written for a different search", param_hint="--resume")
    return saved


def search(
    kind: str = typer.Option(..., "--kind", "-k", help="pure or bordered"),
    half: int = typer.Option(..., "--half", "-n", help="Half size n of the circulant block"),
    dmin: int = typer.Option(..., "--dmin", "-d", help="Target minimum weight (even)"),
    parity: str = typer.Option("singly_even", "--parity", help="singly_even or doubly_even"),
    shard: Optional[str] = typer.Option(None, "--shard", help="Search shard i of N, as i/N"),
    budget: Optional[int] = typer.Option(None, "--budget", min=1, help="Necklaces to examine before checkpointing"),
    resume: Optional[Path] = typer.Option(None, "--resume", help="Continue from this checkpoint"),
    checkpoint: Path = typer.Option(Path("search.ckpt"), "--checkpoint", help="Where to write the checkpoint"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write rows here instead of stdout"),
):
    """
    List canonical first rows whose circulant passes the self-duality test.

    Rows are written in octal, one per line, and can be fed to classify --rows.
    """
    spec = build_spec(kind, half, dmin, parity, shard, budget)
    start = load_resume(resume, spec)

    every = None if spec.budget is not None else get_config_manager().config.search.checkpoint_every
    run = spec if every is None else spec.model_copy(update={"budget": every})

    found = 0
    saved = False
    sink = open(out, "a" if start is not None else "w") if out else None
    try:
        while True:
            try:
                for r in enumerate_candidates(run, resume=start):
                    line = encode_octal(r)
                    if sink:
                        sink.write(line + "\n")
                    else:
                        typer.echo(line)
                    found += 1
                break
            except BudgetExhausted as e:
                if sink:
                    sink.flush()
                e.checkpoint.save(checkpoint)
                if every is None:
                    console.print(
                        f"[yellow]{found} candidate rows; budget reached, resume with --resume {checkpoint}[/yellow]"
                    )
                    return
                # periodic checkpoint of an unbudgeted run
                saved = True
                start = e.checkpoint
        if saved:
            checkpoint.unlink(missing_ok=True)
        console.print(f"[green]Search complete: {found} candidate rows[/green]")
    except DcsdError as e:
        console.print(f"[red]Error searching: {e}[/red]")
        raise typer.Exit(1)
    finally:
        if sink:
            sink.close()
