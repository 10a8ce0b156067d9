"""
Shared helpers for command modules.

Handles:
- The configuration manager chosen by the global --config option
- Option parsing shared by several commands (shards, families, rows)
- Rich progress bars driven by engine progress callbacks
"""

from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, Tuple

import typer
from rich.console import Console
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
)

from dcsd.core.codebook import parse_row_token
from dcsd.core.codes import CirculantSpec, CodeKind
from dcsd.core.config_manager import ConfigManager
from dcsd.core.enumerators import EnumeratorFamily
from dcsd.core.errors import RowParseError
from dcsd.core.weights import ProgressCallback

console = Console()

_config_manager: Optional[ConfigManager] = None

FAMILY_ALIASES = {
    "len90": EnumeratorFamily.LEN90,
    "len92": EnumeratorFamily.LEN92,
    "len96se": EnumeratorFamily.LEN96_SINGLY_EVEN,
    "len96de": EnumeratorFamily.LEN96_DOUBLY_EVEN,
}


def set_config_manager(manager: Optional[ConfigManager]) -> None:
    global _config_manager
    _config_manager = manager


def get_config_manager() -> ConfigManager:
    """Get or create the configuration manager for this invocation."""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


def parse_shard(text: Optional[str]) -> Tuple[int, int]:
    """`i/N` -> (i, N); None means the whole job."""
    if not text:
        return 0, 1
    try:
        index, total = (int(part) for part in text.split("/"))
    except ValueError:
        raise typer.BadParameter(f"expected i/N, got {text!r}", param_hint="--shard") from None
    if total < 1 or not 0 <= index < total:
        raise typer.BadParameter(f"shard {index} is outside 0..{total - 1}", param_hint="--shard")
    return index, total


def parse_family(text: Optional[str]) -> Optional[EnumeratorFamily]:
    if text is None:
        return None
    if text in FAMILY_ALIASES:
        return FAMILY_ALIASES[text]
    try:
        return EnumeratorFamily(text)
    except ValueError:
        choices = ", ".join(FAMILY_ALIASES)
        raise typer.BadParameter(f"unknown family {text!r} (choose from {choices})", param_hint="--family") from None


def parse_kind(text: str) -> CodeKind:
    try:
        return CodeKind(text.lower())
    except ValueError:
        raise typer.BadParameter(f"kind must be pure or bordered, got {text!r}", param_hint="--kind") from None


def row_spec(token: str, kind: CodeKind, half_size: Optional[int]) -> CirculantSpec:
    """A spec from one command-line row; binary tokens fix their own half size."""
    token = token.strip()
    if half_size is None:
        half_size = len(token) if set(token) <= {"0", "1"} else 3 * len(token)
    try:
        return CirculantSpec(kind, parse_row_token(token, half_size))
    except RowParseError as e:
        raise typer.BadParameter(str(e), param_hint="--row") from None


def require_file(path: Path, option: str) -> Path:
    if not path.exists():
        raise typer.BadParameter(f"{path} does not exist", param_hint=option)
    return path


@contextmanager
def progress_bar(description: str, enabled: bool = True) -> Iterator[Optional[ProgressCallback]]:
    """A transient progress bar; yields the callback to hand to the engine."""
    if not enabled:
        yield None
        return
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
        transient=True,
    ) as progress:
        task = progress.add_task(description, total=None)

        def update(done: int, total: int) -> None:
            progress.update(task, completed=done, total=total)

        yield update
