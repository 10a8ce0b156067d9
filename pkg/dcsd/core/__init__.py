"""
Core library: GF(2) algebra, code construction, weight counting, enumerator
families, search and classification, equivalence, neighbors and file formats.
"""

from dcsd.core.codes import CirculantSpec, CodeKind, LinearCode, Parity
from dcsd.core.errors import DcsdError
from dcsd.core.gf2 import BitMatrix, BitVector
from dcsd.core.weights import EngineSettings

__all__ = [
    "BitMatrix",
    "BitVector",
    "CirculantSpec",
    "CodeKind",
    "DcsdError",
    "EngineSettings",
    "LinearCode",
    "Parity",
]
