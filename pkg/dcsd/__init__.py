"""
dcsd - Double circulant self-dual codes.

Construct, search, classify and verify binary double circulant self-dual
codes: exact low-weight counting over information sets, weight enumerator
fitting, equivalence testing, neighbor analysis and published-table
reproduction.
"""

__version__ = "0.1.0"
__author__ = "dcsd Development Team"
__description__ = "Search, classify and verify binary double circulant self-dual codes"

VERSION_INFO = {
    "version": __version__,
    "description": __description__,
    "author": __author__,
}

# CLI Constants
CLI_NAME = "dcsd"
CLI_CONFIG_DIR = "~/.dcsd"
CLI_CONFIG_FILE = "config.yml"

__all__ = [
    "__version__",
    "__author__",
    "__description__",
    "VERSION_INFO",
    "CLI_NAME",
    "CLI_CONFIG_DIR",
    "CLI_CONFIG_FILE",
]
