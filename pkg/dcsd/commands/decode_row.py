"""
Decode-row Command - Convert first rows between octal and binary

Handles:
- Decoding an octal row to its bit string and weight
- Encoding a binary row to octal
- Optional self-duality and parity check of the resulting code
"""

from typing import Optional

import typer
from rich.console import Console

from dcsd.core.codebook import decode_octal, encode_octal
from dcsd.core.codes import CirculantSpec, is_self_dual, parity_class
from dcsd.core.errors import DcsdError
from dcsd.core.gf2 import BitVector
from dcsd.commands.common import parse_kind

console = Console()


def decode_row(
    octal: Optional[str] = typer.Option(None, "--octal", "-o", help="Row in octal"),
    bits: Optional[int] = typer.Option(None, "--bits", "-b", help="Bits the octal row carries (default 3 per digit)"),
    binary: Optional[str] = typer.Option(None, "--binary", help="Row as a 0/1 string, to encode"),
    kind: Optional[str] = typer.Option(None, "--kind", "-k", help="Also check the pure/bordered code it generates"),
):
    """
    Decode an octal first row, or encode a binary one.

    Prints the bit string (coordinate 0 first), its weight and its octal form.
    """
    if (octal is None) == (binary is None):
        raise typer.BadParameter("give exactly one of --octal and --binary")
    code_kind = parse_kind(kind) if kind else None

    try:
        if octal is not None:
            row = decode_octal(octal, bits if bits is not None else 3 * len(octal))
        else:
            if not binary or set(binary) - {"0", "1"}:
                raise typer.BadParameter(f"{binary!r} is not a 0/1 string", param_hint="--binary")
            row = BitVector.from_string(binary)

        typer.echo(f"bits: {row}")
        typer.echo(f"length: {row.length}")
        typer.echo(f"weight: {row.weight}")
        typer.echo(f"octal: {encode_octal(row)}")

        if code_kind is not None:
            code = CirculantSpec(code_kind, row).build()
            typer.echo(f"code: [{code.length},{code.dimension}] {code_kind.value}")
            if is_self_dual(code):
                typer.echo(f"self-dual: yes ({parity_class(code).value})")
            else:
                typer.echo("self-dual: no")

    except DcsdError as e:
        console.print(f"[red]Error decoding row: {e}[/red]")
        raise typer.Exit(1)
