"""
Pure and bordered double circulant codes.

A code is held as a LinearCode: the reduced row echelon generator (canonical,
used for membership and equality) plus the construction rows it was built
from (used for the self-duality test and to keep the circulant structure
visible to search and equivalence code).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, Optional, Sequence, Tuple

import numpy as np

from dcsd.core.errors import ContractViolation, DegenerateExtension, InvalidSpec
from dcsd.core.gf2 import (
    BitMatrix,
    BitVector,
    circulant,
    column_bits,
    eliminate,
    nullspace_basis,
    popcounts,
    words_for,
)

logger = logging.getLogger(__name__)


class CodeKind(str, Enum):
    PURE = "pure"
    BORDERED = "bordered"


class Parity(str, Enum):
    DOUBLY_EVEN = "doubly_even"
    SINGLY_EVEN = "singly_even"


@dataclass(frozen=True)
class CirculantSpec:
    """A candidate code in compressed form: construction kind plus first row."""

    kind: CodeKind
    first_row: BitVector

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", CodeKind(self.kind))
        if self.first_row.length < 1:
            raise InvalidSpec("first row must be nonempty")
        if self.kind is CodeKind.BORDERED and self.half_size % 2 == 0:
            raise InvalidSpec(
                f"bordered construction needs odd half size (length = 0 mod 4), got n={self.half_size}"
            )

    @property
    def half_size(self) -> int:
        return self.first_row.length

    @property
    def length(self) -> int:
        n = self.half_size
        return 2 * n if self.kind is CodeKind.PURE else 2 * n + 2

    def build(self) -> LinearCode:
        if self.kind is CodeKind.PURE:
            return build_pure(self)
        return build_bordered(self)


class LinearCode:
    """An [n, k] binary code."""

    __slots__ = ("_generator", "_pivots", "_construction", "spec", "structural_sets")

    def __init__(
        self,
        rows: BitMatrix,
        *,
        spec: Optional[CirculantSpec] = None,
        structural_sets: Sequence[Tuple[int, ...]] = (),
    ):
        reduced, pivots = eliminate(rows.words, range(rows.cols))
        self._generator = BitMatrix(reduced, rows.cols)
        self._pivots = tuple(pivots)
        self._construction = rows
        self.spec = spec
        self.structural_sets = tuple(tuple(s) for s in structural_sets)

    @classmethod
    def from_vectors(cls, vectors: Sequence[BitVector], length: Optional[int] = None) -> LinearCode:
        return cls(BitMatrix.from_vectors(vectors, cols=length))

    @property
    def length(self) -> int:
        return self._generator.cols

    @property
    def dimension(self) -> int:
        return self._generator.rows

    @property
    def generator(self) -> BitMatrix:
        """Reduced row echelon generator matrix."""
        return self._generator

    @property
    def construction(self) -> BitMatrix:
        """The rows the code was built from (may include dependent rows)."""
        return self._construction

    @property
    def pivots(self) -> Tuple[int, ...]:
        return self._pivots

    def __repr__(self) -> str:
        origin = f", {self.spec.kind.value}" if self.spec else ""
        return f"LinearCode([{self.length},{self.dimension}]{origin})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearCode):
            return NotImplemented
        return self._generator == other._generator

    def __hash__(self) -> int:
        return hash(self._generator)

    # Membership

    def residues(self, words: np.ndarray) -> np.ndarray:
        """Reduce packed vectors modulo the row space; zero rows are codewords."""
        w = np.array(words, dtype=np.uint64, copy=True).reshape(-1, self._generator.n_words)
        g = self._generator.words
        for i, p in enumerate(self._pivots):
            hit = column_bits(w, p).astype(bool)
            if hit.any():
                w[hit] ^= g[i]
        return w

    def contains_words(self, words: np.ndarray) -> np.ndarray:
        return ~np.any(self.residues(words), axis=1)

    def contains(self, v: BitVector) -> bool:
        if v.length != self.length:
            raise ContractViolation(f"vector length {v.length} != code length {self.length}")
        return bool(self.contains_words(v.words(self._generator.n_words)[None, :])[0])

    def contains_code(self, other: LinearCode) -> bool:
        return other.dimension == 0 or bool(np.all(self.contains_words(other.generator.words)))

    # Derived codes

    def dual(self) -> LinearCode:
        basis = nullspace_basis(self._generator)
        return LinearCode(BitMatrix.from_vectors(basis, cols=self.length))

    def permuted(self, perm: Sequence[int]) -> LinearCode:
        """Image under the coordinate map i -> perm[i]."""
        return LinearCode(self._generator.permute_columns(perm))

    def codeword_words(self) -> np.ndarray:
        """All 2^k codewords as packed rows (small codes only)."""
        if self.dimension > 26:
            raise ContractViolation(f"refusing to list 2^{self.dimension} codewords")
        out = np.zeros((1, self._generator.n_words), dtype=np.uint64)
        for row in self._generator.words:
            out = np.vstack([out, out ^ row])
        return out

    def codewords(self) -> Iterator[BitVector]:
        for w in self.codeword_words():
            yield BitVector.from_words(w, self.length)


def intersection_dimension(c1: LinearCode, c2: LinearCode) -> int:
    """dim(C1 ∩ C2) = dim C1 + dim C2 - dim(C1 + C2)."""
    if c1.length != c2.length:
        raise ContractViolation("codes must have equal length")
    joint = LinearCode(c1.generator.vstack(c2.generator))
    return c1.dimension + c2.dimension - joint.dimension


def build_pure(spec: CirculantSpec) -> LinearCode:
    """The [2n, n] code generated by (I_n | R)."""
    if spec.kind is not CodeKind.PURE:
        raise InvalidSpec("build_pure needs a pure spec")
    n = spec.half_size
    rows = BitMatrix.identity(n).hstack(circulant(spec.first_row))
    halves = (tuple(range(n)), tuple(range(n, 2 * n)))
    return LinearCode(rows, spec=spec, structural_sets=halves)


def build_bordered(spec: CirculantSpec) -> LinearCode:
    """The [2n+2, n+1] code generated by (I_{n+1} | B), B = [[0, 1…1], [1^T, R']]."""
    if spec.kind is not CodeKind.BORDERED:
        raise InvalidSpec("build_bordered needs a bordered spec")
    n = spec.half_size
    if n % 2 == 0:
        raise InvalidSpec(f"bordered construction needs odd n, got {n}")
    border = np.zeros((n + 1, n + 1), dtype=np.uint8)
    border[0, 1:] = 1
    border[1:, 0] = 1
    border[1:, 1:] = circulant(spec.first_row).to_dense()
    rows = BitMatrix.identity(n + 1).hstack(BitMatrix.from_dense(border))
    halves = (tuple(range(n + 1)), tuple(range(n + 1, 2 * n + 2)))
    return LinearCode(rows, spec=spec, structural_sets=halves)


def circulant_self_orthogonality(kind: CodeKind, first_row: BitVector) -> bool:
    """
    Polynomial form of the self-duality condition, without building matrices.

    Pure: R R^T = I, i.e. wt(r) odd and r·shift_j(r) = 0 for 0 < j <= n/2.
    Bordered: B B^T = I, i.e. n odd, wt(r) even and r·shift_j(r) = 1 for j != 0.
    """
    n = first_row.length
    kind = CodeKind(kind)
    if kind is CodeKind.PURE:
        if first_row.weight % 2 == 0:
            return False
        off_diagonal = 0
    else:
        if n % 2 == 0 or first_row.weight % 2:
            return False
        off_diagonal = 1
    for j in range(1, n // 2 + 1):
        if first_row.dot(first_row.cyclic_shift(j)) != off_diagonal:
            return False
    return True


def is_self_dual(code: LinearCode) -> bool:
    """dimension = length/2 and G·G^T = 0 on the construction rows."""
    if 2 * code.dimension != code.length:
        return False
    return code.construction.gram().is_zero()


def parity_class(code: LinearCode) -> Parity:
    if not is_self_dual(code):
        raise ContractViolation("parity class is defined for self-dual codes only")
    weights = code.construction.row_weights()
    if np.all(weights % 4 == 0):
        return Parity.DOUBLY_EVEN
    return Parity.SINGLY_EVEN


def _kernel_of_functional(code: LinearCode, values: np.ndarray) -> LinearCode:
    """Subcode on which the linear functional with generator-row values `values` vanishes."""
    rows = code.generator.words
    ones = np.flatnonzero(values)
    if ones.size == 0:
        return code
    p = int(ones[0])
    kept = [rows[i] for i in range(len(rows)) if not values[i]]
    kept += [rows[i] ^ rows[p] for i in ones[1:]]
    n_words = words_for(code.length)
    words = np.array(kept, dtype=np.uint64).reshape(-1, n_words)
    return LinearCode(BitMatrix(words, code.length))


def doubly_even_subcode(code: LinearCode) -> LinearCode:
    """C_0 = {c in C : wt(c) = 0 mod 4}, for a self-orthogonal even code."""
    halves = (code.generator.row_weights() // 2) % 2
    return _kernel_of_functional(code, halves)


def subcode_orthogonal_to(code: LinearCode, x: BitVector) -> LinearCode:
    """<x>^⊥ ∩ C."""
    if x.length != code.length:
        raise ContractViolation(f"vector length {x.length} != code length {code.length}")
    inner = popcounts(code.generator.words & x.words(code.generator.n_words)) % 2
    return _kernel_of_functional(code, inner)


def extend(code_0: LinearCode, x: BitVector) -> LinearCode:
    """<C_0, x> = C_0 ∪ (x + C_0)."""
    if code_0.contains(x):
        raise DegenerateExtension("extension vector already lies in the code")
    return LinearCode(code_0.generator.with_row(x))


@dataclass(frozen=True)
class ShadowProfile:
    """Shadow S = (u1 + C_0) ∪ (u2 + C_0); counts are filled by the weight engine."""

    coset_reps: Tuple[BitVector, BitVector]
    subcode: LinearCode
    counts: Dict[int, int] = field(default_factory=dict)
    radius: Optional[int] = None

    def count(self, w: int) -> int:
        if self.radius is None or w > self.radius:
            raise ContractViolation(f"shadow count S_{w} is not covered (radius {self.radius})")
        return self.counts.get(w, 0)


def shadow(code: LinearCode) -> ShadowProfile:
    """Coset representatives of the shadow of a singly even self-dual code."""
    if parity_class(code) is not Parity.SINGLY_EVEN:
        raise ContractViolation("the shadow is taken of singly even self-dual codes")
    code_0 = doubly_even_subcode(code)
    outside = next(
        g for g in code.generator if not code_0.contains(g)
    )
    u1 = next(v for v in code_0.dual().generator if not code.contains(v))
    logger.debug("shadow of %r: u1 weight %d", code, u1.weight)
    return ShadowProfile(coset_reps=(u1, u1 + outside), subcode=code_0)
