"""
dcsd Commands

This module contains all command implementations for the dcsd CLI.
Commands are organized by functionality and provide the main user interface.
"""

from dcsd.commands import (
    aut,
    classify,
    config,
    decode_row,
    fit,
    neighbors,
    report,
    search,
    verify,
)

__all__ = [
    "aut",
    "classify",
    "config",
    "decode_row",
    "fit",
    "neighbors",
    "report",
    "search",
    "verify",
]
