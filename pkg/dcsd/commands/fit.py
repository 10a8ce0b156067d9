"""
Fit Command - Weight enumerator parameters from counts, or counts from parameters

Handles:
- Fitting family parameters from supplied code/shadow counts
- Fitting parameters of a code given by its first row
- Predicting displayed coefficients from a parameter token
"""

from typing import Dict, Optional

import typer
from rich.console import Console
from rich.table import Table

from dcsd.core.codes import Parity, parity_class
from dcsd.core.enumerators import (
    EnumeratorParams,
    counting_plan,
    displayed_weights,
    family_for,
    fit as fit_family,
    is_admissible,
    predict,
    predict_shadow,
)
from dcsd.core.errors import AmbiguousEnumerator, DcsdError
from dcsd.core.weights import count_low_weight, min_weight, shadow_profile
from dcsd.commands.common import (
    get_config_manager,
    parse_family,
    parse_kind,
    progress_bar,
    row_spec,
)

console = Console()


def _parse_counts(text: Optional[str], option: str) -> Dict[int, int]:
    """`16:12060,18:106560` -> {16: 12060, 18: 106560}."""
    if not text:
        return {}
    counts = {}
    for item in text.split(","):
        try:
            w, c = item.split(":")
            counts[int(w)] = int(c)
        except ValueError:
            raise typer.BadParameter(f"expected w:count pairs, got {item!r}", param_hint=option) from None
    return counts


def fit(
    family: Optional[str] = typer.Option(None, "--family", "-f", help="len90, len92, len96se or len96de"),
    counts: Optional[str] = typer.Option(None, "--counts", help="Code counts as w:A_w,..."),
    shadow_counts: Optional[str] = typer.Option(None, "--shadow", help="Shadow counts as w:S_w,..."),
    row: Optional[str] = typer.Option(None, "--row", "-r", help="Fit the code with this first row instead"),
    kind: str = typer.Option("pure", "--kind", "-k", help="pure or bordered (with --row)"),
    half: Optional[int] = typer.Option(None, "--half", "-n", help="Half size n (with an octal --row)"),
    params: Optional[str] = typer.Option(None, "--params", "-p", help="Predict from a token such as len92:3,0,1842"),
):
    """
    Fit or evaluate a weight enumerator family.

    With --counts the family parameters are solved for; with --row the
    counts are computed first; with --params the displayed coefficients
    are predicted.
    """
    modes = sum(x is not None for x in (counts, row, params))
    if modes != 1:
        raise typer.BadParameter("give exactly one of --counts, --row and --params")

    try:
        if params is not None:
            _show_prediction(EnumeratorParams.from_token(params))
            return

        chosen = parse_family(family)
        if counts is not None:
            if chosen is None:
                raise typer.BadParameter("--counts needs --family", param_hint="--family")
            code_counts = _parse_counts(counts, "--counts")
            shadow = _parse_counts(shadow_counts, "--shadow") or None
        else:
            spec = row_spec(row, parse_kind(kind), half)
            settings = get_config_manager().engine_settings()
            code = spec.build()
            hints = code.structural_sets
            parity = parity_class(code)
            with progress_bar("Counting low-weight codewords") as progress:
                d = min_weight(code, settings, hints=hints)
                chosen = chosen or family_for(code.length, parity, d)
                if chosen is None:
                    console.print(
                        f"[yellow]No enumerator family covers length {code.length}, "
                        f"{parity.value}, d = {d}[/yellow]"
                    )
                    raise typer.Exit(1)
                plan = counting_plan(chosen, d)
                code_counts = count_low_weight(
                    code, plan.code_radius, settings, hints=hints, progress=progress
                )
                shadow = None
                if plan.shadow_radius is not None and parity is Parity.SINGLY_EVEN:
                    shadow = shadow_profile(code, plan.shadow_radius, settings, progress=progress)
            typer.echo(f"d: {d}")

        fitted = fit_family(chosen, code_counts, shadow)
        typer.echo(f"params: {fitted.to_token()}")
        typer.echo(f"admissible: {'yes' if is_admissible(fitted) else 'no'}")

    except AmbiguousEnumerator as e:
        console.print(f"[yellow]{e}[/yellow]")
        for candidate in e.candidates:
            typer.echo(f"candidate: {candidate.to_token()}")
        raise typer.Exit(1)
    except DcsdError as e:
        console.print(f"[red]Error fitting enumerator: {e}[/red]")
        raise typer.Exit(1)


def _show_prediction(params: EnumeratorParams) -> None:
    code_weights, shadow_weights = displayed_weights(params.family)
    table = Table(title=f"Displayed coefficients of {params}")
    table.add_column("Series", style="cyan")
    table.add_column("w", justify="right")
    table.add_column("Count", justify="right", style="green")
    for w in code_weights:
        table.add_row("A", str(w), str(predict(params, w)))
    for w in shadow_weights:
        table.add_row("S", str(w), str(predict_shadow(params, w)))
    console.print(table)
    typer.echo(f"admissible: {'yes' if is_admissible(params) else 'no'}")
