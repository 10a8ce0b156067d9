"""
dcsd - Main Entry Point

This is the main entry point for the dcsd application.
It sets up the command structure, logging and global configuration.
"""

import logging
import sys
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.text import Text

from dcsd.commands import (
    aut,
    classify,
    common,
    config,
    decode_row,
    fit,
    neighbors,
    report,
    search,
    verify,
)
from dcsd.core.config_manager import ConfigManager
from dcsd import __version__, CLI_NAME

console = Console()

app = typer.Typer(
    name=CLI_NAME,
    help=f"""
    {CLI_NAME} - Double circulant self-dual codes

    Search, classify and verify binary double circulant self-dual codes.

    Features:
    • Exact low-weight codeword counts over disjoint information sets
    • Weight enumerator fitting for lengths 90, 92 and 96
    • Equivalence testing and automorphism group orders
    • Neighbor rank pairs and screens
    • Resumable, sharded searches

    Get started: {CLI_NAME} decode-row --octal 045722771307000 --bits 45
    """,
    rich_markup_mode="rich",
    no_args_is_help=True,
    add_completion=True,
    context_settings={"help_option_names": ["-h", "--help"]},
)


def get_config_manager() -> ConfigManager:
    """Get or create the global configuration manager."""
    return common.get_config_manager()


def setup_logging(verbose: bool) -> None:
    """Route library logging through Rich; INFO when verbose, WARNING otherwise."""
    logger = logging.getLogger(CLI_NAME)
    for handler in list(logger.handlers):
        if isinstance(handler, RichHandler):
            logger.removeHandler(handler)
    logger.addHandler(RichHandler(console=Console(stderr=True), show_path=False))
    logger.setLevel(logging.INFO if verbose else logging.WARNING)
    logger.propagate = False


def version_callback(value: bool):
    """Display version information and exit."""
    if value:
        version_panel = Panel(
            Text(f"{CLI_NAME} v{__version__}", style="bold blue"),
            title="Version Information",
            subtitle="Double circulant self-dual codes",
            border_style="blue",
        )
        console.print(version_panel)
        raise typer.Exit()


@app.callback()
def main(
    version: bool = typer.Option(
        None,
        "--version",
        "-V",
        help="Show version information",
        callback=version_callback,
        is_eager=True,
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose output"),
    config_path: Optional[Path] = typer.Option(
        None,
        "--config",
        "-c",
        help="Path to configuration file",
        file_okay=True,
        dir_okay=False,
    ),
    workers: Optional[int] = typer.Option(None, "--workers", "-j", min=1, help="Worker threads (overrides config)"),
    work_budget: Optional[int] = typer.Option(None, "--work-budget", min=1, help="Weight engine work budget (overrides config)"),
):
    """
    dcsd - Double circulant self-dual codes.
    """
    try:
        manager = ConfigManager(config_path=config_path, verbose=verbose)
    except Exception as e:
        console.print(f"[red]Error initializing configuration: {e}[/red]")
        raise typer.Exit(1)

    overrides = {}
    if workers is not None:
        overrides["workers"] = workers
    if work_budget is not None:
        overrides["work_budget"] = work_budget
    if overrides:
        manager.config.engine = manager.config.engine.model_copy(update=overrides)
    common.set_config_manager(manager)

    setup_logging(verbose or manager.config.verbose)


app.command(name="search", rich_help_panel="Search Commands")(search.search)
app.command(name="classify", rich_help_panel="Search Commands")(classify.classify)
app.command(name="verify", rich_help_panel="Verification Commands")(verify.verify)
app.command(name="neighbors", rich_help_panel="Verification Commands")(neighbors.neighbors)
app.command(name="aut", rich_help_panel="Verification Commands")(aut.aut)
app.command(name="fit", rich_help_panel="Enumerator Commands")(fit.fit)
app.command(name="decode-row", rich_help_panel="Codec Commands")(decode_row.decode_row)
app.command(name="report", rich_help_panel="Enumerator Commands")(report.report)

app.add_typer(
    config.app,
    name="config",
    help="Manage CLI configuration and settings",
    rich_help_panel="Configuration",
)


def cli_exception_handler(exc_type, exc_value, exc_traceback):
    """Custom exception handler for the CLI."""
    if exc_type == KeyboardInterrupt:
        console.print("\n[yellow]Operation cancelled by user.[/yellow]")
        sys.exit(130)

    if get_config_manager().is_debug_mode():
        import traceback

        console.print("[red]Debug mode - Full traceback:[/red]")
        traceback.print_exception(exc_type, exc_value, exc_traceback)
    else:
        console.print(f"[red]Unexpected error: {exc_value}[/red]")
        console.print("[dim]Set DCSD_DEBUG=1 for the full traceback[/dim]")

    sys.exit(1)


def main_entry_point():
    """
    Main entry point for the CLI when called from command line.
    This is what gets called when user runs 'dcsd' command.
    """
    sys.excepthook = cli_exception_handler

    try:
        app()
    except KeyboardInterrupt:
        console.print("\n[yellow]Operation cancelled by user.[/yellow]")
        sys.exit(130)
    except Exception as e:
        if get_config_manager().is_debug_mode():
            raise
        console.print(f"[red]Fatal error: {e}[/red]")
        console.print("[dim]Set DCSD_DEBUG=1 for the full traceback[/dim]")
        sys.exit(1)


if __name__ == "__main__":
    main_entry_point()
