"""
Report Command - Enumerator histograms from record files

Handles:
- Merging record files from several shards
- Printing the histogram table for the records' enumerator family
- Comparing the histogram with the bundled published table
"""

from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console

from dcsd.core.codebook import (
    RecordStore,
    compare_histograms,
    emit_report,
    histogram,
    published_histogram,
)
from dcsd.core.codes import CodeKind
from dcsd.core.errors import DcsdError
from dcsd.commands.common import parse_family, require_file

console = Console(stderr=True)


def report(
    records: List[Path] = typer.Argument(..., help="Record files to merge"),
    family: Optional[str] = typer.Option(None, "--family", help="Expected enumerator family"),
    compare: bool = typer.Option(False, "--compare", help="Diff against the published table"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write the table here instead of stdout"),
):
    """
    Print the enumerator histogram of classified codes.

    The output does not depend on the order of the records.
    """
    chosen = parse_family(family)
    for path in records:
        require_file(path, "RECORDS")

    try:
        merged = RecordStore.load(records[0]).records
        seen = set(merged)
        for path in records[1:]:
            for record in RecordStore.load(path).records:
                if record not in seen:
                    seen.add(record)
                    merged.append(record)

        text = emit_report(merged, chosen)
        if out:
            out.write_text(text + "\n" if text else "")
            console.print(f"[green]Report for {len(merged)} records written to {out}[/green]")
        elif text:
            typer.echo(text)

        if compare:
            if not merged:
                console.print("[yellow]No records to compare[/yellow]")
                raise typer.Exit(1)
            kind = CodeKind.PURE if all(r.kind is CodeKind.PURE for r in merged) else CodeKind.BORDERED
            family_found = merged[0].enumerator.family
            differences = compare_histograms(histogram(merged), published_histogram(family_found, kind))
            if differences:
                for key, expected, observed in differences:
                    typer.echo(f"differs at {key}: published {expected}, observed {observed}")
                console.print(f"[red]{len(differences)} entries differ from the published table[/red]")
                raise typer.Exit(1)
            console.print("[green]Histogram matches the published table[/green]")

    except DcsdError as e:
        console.print(f"[red]Error building report: {e}[/red]")
        raise typer.Exit(1)
