"""
Aut Command - Automorphism group order of a double circulant code

Handles:
- Computing |Aut(C)| by search over coordinate permutations
- Listing the strong generators found
- Reporting the partial order when the node budget runs out
"""

from typing import Optional

import typer
from rich.console import Console

from dcsd.core.equivalence import automorphism_group
from dcsd.core.errors import DcsdError, EquivalenceUndecided
from dcsd.commands.common import get_config_manager, parse_kind, row_spec

console = Console()


def aut(
    row: str = typer.Option(..., "--row", "-r", help="First row, octal or binary"),
    kind: str = typer.Option("pure", "--kind", "-k", help="pure or bordered"),
    half: Optional[int] = typer.Option(None, "--half", "-n", help="Half size n (for octal rows)"),
    node_budget: Optional[int] = typer.Option(None, "--node-budget", help="Search nodes before giving up"),
    generators: bool = typer.Option(False, "--generators", "-g", help="Print the generators found"),
):
    """
    Compute the automorphism group order of one code.
    """
    spec = row_spec(row, parse_kind(kind), half)
    config_manager = get_config_manager()
    budget = node_budget or config_manager.node_budget

    try:
        code = spec.build()
        with console.status(f"Searching automorphisms of the [{code.length},{code.dimension}] code..."):
            group = automorphism_group(code, config_manager.engine_settings(), node_budget=budget)

        typer.echo(f"aut_order: {group.order}")
        typer.echo(f"orbits: {' '.join(str(s) for s in group.orbit_sizes)}")
        if generators:
            for g in group.generators:
                typer.echo(" ".join(str(i) for i in g))

    except EquivalenceUndecided as e:
        console.print(f"[yellow]Search budget of {budget} nodes exhausted: {e}[/yellow]")
        if e.partial_order is not None:
            typer.echo(f"partial_order: {e.partial_order}")
        raise typer.Exit(1)
    except DcsdError as e:
        console.print(f"[red]Error computing automorphisms: {e}[/red]")
        raise typer.Exit(1)
