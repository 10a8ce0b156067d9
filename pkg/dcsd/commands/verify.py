"""
Verify Command - Check a row list against expected code properties

Handles:
- Self-duality, parity and minimum weight of every listed code
- Enumerator fitting and comparison with expected parameters
- Optional automorphism group orders
- A machine-readable JSON diff on the first mismatch
- Bundled published datasets, sharding, budgets and resumable checkpoints
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

import typer
from rich.console import Console
from rich.table import Table

from dcsd.core.codebook import (
    Expectation,
    ListCheckpoint,
    bundled_path,
    expectation_diff,
    load_expectations,
    read_row_list,
    shard_positions,
)
from dcsd.core.codes import CodeKind, Parity, parity_class
from dcsd.core.enumerators import EnumeratorFamily, counting_plan, fit
from dcsd.core.equivalence import aut_order
from dcsd.core.errors import AmbiguousEnumerator, DcsdError, InconsistentProfile
from dcsd.core.weights import EngineSettings, count_low_weight, min_weight, shadow_profile
from dcsd.commands.common import (
    get_config_manager,
    parse_family,
    parse_kind,
    parse_shard,
    progress_bar,
    require_file,
)

console = Console()


@dataclass(frozen=True)
class Dataset:
    rows: str
    expectations: str
    kind: CodeKind
    half_size: int
    d: int
    family: EnumeratorFamily


DATASETS = {
    "c96": Dataset(
        "c96_singly_even.txt", "c96_singly_even.yml", CodeKind.PURE, 48, 16,
        EnumeratorFamily.LEN96_SINGLY_EVEN,
    ),
    "b92": Dataset(
        "b92_extremal.txt", "b92_extremal.yml", CodeKind.BORDERED, 45, 16,
        EnumeratorFamily.LEN92,
    ),
}


def verify(
    file: Optional[Path] = typer.Option(None, "--file", "-f", help="Row list file"),
    dataset: Optional[str] = typer.Option(None, "--dataset", help="Bundled published list: c96 or b92"),
    kind: Optional[str] = typer.Option(None, "--kind", "-k", help="pure or bordered"),
    half: Optional[int] = typer.Option(None, "--half", "-n", help="Half size n"),
    dmin: Optional[int] = typer.Option(None, "--dmin", "-d", help="Expected minimum weight of every code"),
    family: Optional[str] = typer.Option(None, "--family", help="Enumerator family to fit"),
    expect: Optional[Path] = typer.Option(None, "--expect", "-e", help="YAML file of expected properties"),
    with_aut: bool = typer.Option(False, "--aut", help="Also compute automorphism group orders"),
    shard: Optional[str] = typer.Option(None, "--shard", help="Process shard i of N rows, as i/N"),
    budget: Optional[int] = typer.Option(None, "--budget", min=1, help="Rows to process before checkpointing"),
    resume: Optional[Path] = typer.Option(None, "--resume", help="Continue from this checkpoint"),
    checkpoint: Path = typer.Option(Path("verify.ckpt"), "--checkpoint", help="Where to write the checkpoint"),
):
    """
    Verify every code in a row list.

    Exits 1 at the first code that disagrees with --dmin, --family or the
    --expect file, after printing the difference as one JSON line.
    """
    if (file is None) == (dataset is None):
        raise typer.BadParameter("give exactly one of --file and --dataset")

    if dataset is not None:
        if dataset not in DATASETS:
            raise typer.BadParameter(f"unknown dataset {dataset!r} (choose from {', '.join(DATASETS)})", param_hint="--dataset")
        bundled = DATASETS[dataset]
        file = bundled_path(bundled.rows)
        expect = expect or bundled_path(bundled.expectations)
        code_kind = bundled.kind
        half = half or bundled.half_size
        dmin = dmin or bundled.d
        chosen_family = parse_family(family) or bundled.family
    else:
        require_file(file, "--file")
        if kind is None or half is None:
            raise typer.BadParameter("--file needs --kind and --half")
        code_kind = parse_kind(kind)
        chosen_family = parse_family(family)

    config_manager = get_config_manager()
    settings = config_manager.engine_settings()

    try:
        expectations = load_expectations(require_file(expect, "--expect")) if expect else {}
        entries = read_row_list(file, code_kind, half)

        shard_index, shard_total = parse_shard(shard)
        state = ListCheckpoint(
            job="verify",
            source=str(file),
            kind=code_kind,
            half_size=half,
            shard_index=shard_index,
            shard_total=shard_total,
        )
        if resume is not None:
            saved = ListCheckpoint.load(require_file(resume, "--resume"))
            if not saved.same_job(state):
                raise typer.BadParameter("checkpoint was written for a different job", param_hint="--resume")
            state = saved
        positions, next_position = shard_positions(len(entries), state, budget)

        rows: List[Dict[str, Any]] = []
        with progress_bar(f"Verifying {len(positions)} codes") as progress:
            for done, position in enumerate(positions, start=1):
                entry = entries[position]
                expected = expectations.get(entry.index, Expectation())
                target_family = chosen_family or (expected.enumerator.family if expected.enumerator else None)
                observed = _observe(
                    entry.spec.build(),
                    settings,
                    target_family,
                    config_manager.node_budget if with_aut else None,
                )
                diff = expectation_diff(entry.index, observed, expected)
                if dmin is not None and observed["d"] != dmin:
                    diff.insert(0, {"index": entry.index, "field": "d", "expected": dmin, "observed": observed["d"]})
                if target_family is not None and observed.get("fit_error"):
                    diff.append({"index": entry.index, "field": "enumerator", "expected": target_family.value, "observed": observed["fit_error"]})
                if diff:
                    _print_results(rows)
                    for item in diff:
                        typer.echo(json.dumps(item, sort_keys=True))
                    console.print(f"[red]Code {entry.index} does not match (line {entry.line})[/red]")
                    raise typer.Exit(1)
                rows.append({"index": entry.index, **observed})
                if progress:
                    progress(done, len(positions))

        _print_results(rows)
        if next_position is not None:
            state.model_copy(update={"position": next_position}).save(checkpoint)
            console.print(f"[yellow]Budget reached after {len(rows)} codes; resume with --resume {checkpoint}[/yellow]")
        else:
            console.print(f"[green]All {len(rows)} codes verified[/green]")

    except DcsdError as e:
        console.print(f"[red]Error verifying codes: {e}[/red]")
        raise typer.Exit(1)


def _observe(
    code,
    settings: EngineSettings,
    family: Optional[EnumeratorFamily],
    node_budget: Optional[int],
) -> Dict[str, Any]:
    hints = code.structural_sets
    parity = parity_class(code)
    d = min_weight(code, settings, hints=hints)
    observed: Dict[str, Any] = {"d": d, "parity": parity.value, "enumerator": None, "aut_order": None}
    if family is not None:
        plan = counting_plan(family, d)
        profile = count_low_weight(code, plan.code_radius, settings, hints=hints)
        shadow = None
        if plan.shadow_radius is not None and parity is Parity.SINGLY_EVEN:
            shadow = shadow_profile(code, plan.shadow_radius, settings)
        try:
            observed["enumerator"] = fit(family, profile, shadow).to_token()
        except (InconsistentProfile, AmbiguousEnumerator) as e:
            observed["fit_error"] = str(e)
    if node_budget is not None:
        observed["aut_order"] = aut_order(code, settings, node_budget=node_budget)
    return observed


def _print_results(rows: List[Dict[str, Any]]) -> None:
    if not rows:
        return
    table = Table(title="Verified Codes")
    table.add_column("i", justify="right", style="cyan")
    table.add_column("d", justify="right")
    table.add_column("Parity")
    table.add_column("Enumerator", style="green")
    table.add_column("|Aut|", justify="right", style="yellow")
    for row in rows:
        table.add_row(
            str(row["index"]),
            str(row["d"]),
            row["parity"],
            row["enumerator"] or "-",
            str(row["aut_order"]) if row["aut_order"] is not None else "-",
        )
    console.print(table)
