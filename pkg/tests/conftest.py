"""
Shared fixtures for the dcsd test suite.

Every test runs with HOME pointed at a temporary directory and with the
DCSD_* environment cleared, so no user configuration leaks in.
"""

import os

import pytest
from typer.testing import CliRunner

from dcsd.commands import common
from dcsd.core.codes import CirculantSpec, CodeKind
from dcsd.core.gf2 import BitVector
from dcsd.core.weights import EngineSettings


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Fresh HOME, no DCSD_* overrides, no cached config manager."""
    home = tmp_path / "home"
    home.mkdir()
    monkeypatch.setenv("HOME", str(home))
    for name in list(os.environ):
        if name.startswith("DCSD_"):
            monkeypatch.delenv(name)
    common.set_config_manager(None)
    yield home
    common.set_config_manager(None)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def settings():
    return EngineSettings(work_budget=2**26)


def _code(kind: CodeKind, bits: str):
    return CirculantSpec(kind, BitVector.from_string(bits)).build()


@pytest.fixture
def golay():
    """Bordered n = 11: the extended Golay code [24, 12, 8]."""
    return _code(CodeKind.BORDERED, "11011100010")


@pytest.fixture
def hamming():
    """Pure n = 4: the extended Hamming code [8, 4, 4]."""
    return _code(CodeKind.PURE, "1110")


@pytest.fixture
def b12():
    """Pure n = 6: a singly even [12, 6, 4] code."""
    return _code(CodeKind.PURE, "111110")


@pytest.fixture
def i2_4():
    """Pure n = 4 with r = e_0: four disjoint weight-2 words, [8, 4, 2]."""
    return _code(CodeKind.PURE, "1000")
