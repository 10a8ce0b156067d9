"""
Packed GF(2) linear algebra.

BitVector keeps its coordinates in a Python integer (coordinate i is bit i),
BitMatrix keeps rows packed little-endian into uint64 words so that row
addition and population counts run word-parallel under numpy. Coordinate 0 is
the least significant bit of word 0 in both representations.

Nothing here mutates its inputs: reductions always work on private copies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from dcsd.core.errors import ContractViolation

WORD_BITS = 64
_ONE = np.uint64(1)


def words_for(cols: int) -> int:
    """Number of uint64 words needed to hold `cols` bits (at least one)."""
    return max(1, (cols + WORD_BITS - 1) // WORD_BITS)


def int_to_words(value: int, n_words: int) -> np.ndarray:
    return np.frombuffer(value.to_bytes(8 * n_words, "little"), dtype="<u8").astype(np.uint64)


def words_to_int(words: np.ndarray) -> int:
    return int.from_bytes(np.ascontiguousarray(words, dtype="<u8").tobytes(), "little")


def popcounts(words: np.ndarray) -> np.ndarray:
    """Row weights of a packed (rows, W) array, or the weight of a single packed row."""
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def column_bits(words: np.ndarray, col: int) -> np.ndarray:
    word, bit = divmod(col, WORD_BITS)
    return (words[:, word] >> np.uint64(bit)) & _ONE


@dataclass(frozen=True, slots=True)
class BitVector:
    """Immutable binary vector of fixed length."""

    length: int
    value: int = 0

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ContractViolation("vector length must be non-negative")
        if self.value < 0 or self.value >> self.length:
            raise ContractViolation(f"value has bits beyond length {self.length}")

    # Construction

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(length, 0)

    @classmethod
    def ones(cls, length: int) -> BitVector:
        return cls(length, (1 << length) - 1)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitVector:
        value = 0
        length = 0
        for i, b in enumerate(bits):
            if b not in (0, 1, True, False):
                raise ContractViolation(f"bit {i} is {b!r}, expected 0 or 1")
            if b:
                value |= 1 << i
            length = i + 1
        return cls(length, value)

    @classmethod
    def from_string(cls, text: str) -> BitVector:
        """Parse '0101…' with coordinate 0 first."""
        text = text.strip()
        if any(ch not in "01" for ch in text):
            raise ContractViolation(f"not a bit string: {text!r}")
        return cls.from_bits(int(ch) for ch in text)

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> BitVector:
        value = 0
        for i in support:
            if not 0 <= i < length:
                raise ContractViolation(f"support index {i} outside 0..{length - 1}")
            value |= 1 << i
        return cls(length, value)

    @classmethod
    def from_words(cls, words: np.ndarray, length: int) -> BitVector:
        return cls(length, words_to_int(words) & ((1 << length) - 1))

    # Access

    def bit(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.value >> i) & 1

    def __getitem__(self, i: int) -> int:
        return self.bit(i)

    def __len__(self) -> int:
        return self.length

    def __iter__(self) -> Iterator[int]:
        return (self.value >> i & 1 for i in range(self.length))

    @property
    def weight(self) -> int:
        return self.value.bit_count()

    def support(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.length) if self.value >> i & 1)

    def to_bits(self) -> Tuple[int, ...]:
        return tuple(self)

    def words(self, n_words: Optional[int] = None) -> np.ndarray:
        return int_to_words(self.value, n_words or words_for(self.length))

    def __str__(self) -> str:
        return "".join("1" if self.value >> i & 1 else "0" for i in range(self.length))

    def __repr__(self) -> str:
        return f"BitVector({str(self)!r})"

    # Arithmetic

    def _check(self, other: BitVector) -> None:
        if not isinstance(other, BitVector):
            raise TypeError(f"expected BitVector, got {type(other).__name__}")
        if other.length != self.length:
            raise ContractViolation(f"length mismatch: {self.length} vs {other.length}")

    def __add__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self.length, self.value ^ other.value)

    __xor__ = __add__

    def __and__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self.length, self.value & other.value)

    def dot(self, other: BitVector) -> int:
        self._check(other)
        return (self.value & other.value).bit_count() & 1

    def is_zero(self) -> bool:
        return self.value == 0

    # Cyclic structure

    def cyclic_shift(self, k: int = 1) -> BitVector:
        """Shift right by k positions: coordinate j moves to j + k (mod length)."""
        n = self.length
        if n == 0:
            return self
        k %= n
        mask = (1 << n) - 1
        return BitVector(n, ((self.value << k) | (self.value >> (n - k))) & mask)

    def transpose_row(self) -> BitVector:
        """First row of the transposed circulant: (r_0, r_{n-1}, ..., r_1)."""
        n = self.length
        if n == 0:
            return self
        return BitVector.from_bits([self.bit(0)] + [self.bit(n - j) for j in range(1, n)])


class BitMatrix:
    """Immutable binary matrix with rows packed into uint64 words."""

    __slots__ = ("_words", "rows", "cols")

    def __init__(self, words: np.ndarray, cols: int):
        words = np.array(words, dtype=np.uint64, copy=True)
        if words.ndim != 2:
            raise ContractViolation("packed words must be two-dimensional")
        if words.shape[1] != words_for(cols):
            raise ContractViolation(f"{words.shape[1]} words per row cannot hold exactly {cols} columns")
        tail = cols % WORD_BITS
        if tail and words.shape[0] and np.any(words[:, -1] >> np.uint64(tail)):
            raise ContractViolation("packed rows have bits beyond the column count")
        words.setflags(write=False)
        self._words = words
        self.rows = words.shape[0]
        self.cols = cols

    # Construction

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(np.zeros((rows, words_for(cols)), dtype=np.uint64), cols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls.from_vectors([BitVector(n, 1 << i) for i in range(n)], cols=n)

    @classmethod
    def from_vectors(cls, vectors: Sequence[BitVector], cols: Optional[int] = None) -> BitMatrix:
        vectors = list(vectors)
        if cols is None:
            if not vectors:
                raise ContractViolation("column count required for an empty matrix")
            cols = vectors[0].length
        if any(v.length != cols for v in vectors):
            raise ContractViolation(f"every row must have length {cols}")
        n_words = words_for(cols)
        words = np.zeros((len(vectors), n_words), dtype=np.uint64)
        for i, v in enumerate(vectors):
            words[i] = v.words(n_words)
        return cls(words, cols)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> BitMatrix:
        return cls.from_dense(np.array(rows, dtype=np.uint8).reshape(len(rows), -1))

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> BitMatrix:
        dense = np.asarray(dense, dtype=np.uint8) & 1
        if dense.ndim != 2:
            raise ContractViolation("dense matrix must be two-dimensional")
        rows, cols = dense.shape
        n_words = words_for(cols)
        padded = np.zeros((rows, n_words * WORD_BITS), dtype=np.uint8)
        padded[:, :cols] = dense
        packed = np.ascontiguousarray(np.packbits(padded, axis=1, bitorder="little"))
        return cls(packed.view("<u8").astype(np.uint64).reshape(rows, n_words), cols)

    # Access

    @property
    def words(self) -> np.ndarray:
        return self._words

    @property
    def n_words(self) -> int:
        return self._words.shape[1]

    def row(self, i: int) -> BitVector:
        return BitVector.from_words(self._words[i], self.cols)

    def __len__(self) -> int:
        return self.rows

    def __iter__(self) -> Iterator[BitVector]:
        return (self.row(i) for i in range(self.rows))

    def to_vectors(self) -> List[BitVector]:
        return list(self)

    def to_dense(self) -> np.ndarray:
        as_bytes = np.ascontiguousarray(self._words, dtype="<u8").view(np.uint8)
        as_bytes = as_bytes.reshape(self.rows, 8 * self.n_words)
        return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, : self.cols]

    def row_weights(self) -> np.ndarray:
        return popcounts(self._words)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.cols == other.cols and np.array_equal(self._words, other._words)

    def __hash__(self) -> int:
        return hash((self.cols, self._words.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"

    # Algebra

    def transpose(self) -> BitMatrix:
        return BitMatrix.from_dense(self.to_dense().T)

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        if self.cols != other.rows:
            raise ContractViolation(f"cannot multiply {self!r} by {other!r}")
        product = self.to_dense().astype(np.int64) @ other.to_dense().astype(np.int64)
        return BitMatrix.from_dense(product & 1)

    def gram(self, other: Optional[BitMatrix] = None) -> BitMatrix:
        """Pairwise inner products: self · other^T."""
        other = self if other is None else other
        if self.cols != other.cols:
            raise ContractViolation("gram product needs equal column counts")
        product = self.to_dense().astype(np.int64) @ other.to_dense().astype(np.int64).T
        return BitMatrix.from_dense(product & 1)

    def apply(self, x: BitVector) -> BitVector:
        """m · x^T as a vector indexed by rows."""
        if x.length != self.cols:
            raise ContractViolation(f"vector length {x.length} != {self.cols} columns")
        parities = popcounts(self._words & x.words(self.n_words)) & 1
        return BitVector.from_bits(int(p) for p in parities) if self.rows else BitVector(0)

    def is_zero(self) -> bool:
        return not np.any(self._words)

    def hstack(self, *others: BitMatrix) -> BitMatrix:
        return BitMatrix.from_dense(np.hstack([self.to_dense()] + [o.to_dense() for o in others]))

    def vstack(self, *others: BitMatrix) -> BitMatrix:
        if any(o.cols != self.cols for o in others):
            raise ContractViolation("vstack needs equal column counts")
        return BitMatrix(np.vstack([self._words] + [o.words for o in others]), self.cols)

    def with_row(self, v: BitVector) -> BitMatrix:
        return self.vstack(BitMatrix.from_vectors([v], cols=self.cols))

    def with_column(self, v: BitVector) -> BitMatrix:
        """Augment with v as an extra last column."""
        if v.length != self.rows:
            raise ContractViolation(f"column length {v.length} != {self.rows} rows")
        bits = np.fromiter(v, dtype=np.uint64, count=v.length)
        return BitMatrix(_append_column(self._words, self.cols, bits), self.cols + 1)

    def select_columns(self, columns: Sequence[int]) -> BitMatrix:
        return BitMatrix.from_dense(self.to_dense()[:, list(columns)])

    def permute_columns(self, perm: Sequence[int]) -> BitMatrix:
        """Move coordinate i to position perm[i]."""
        dense = self.to_dense()
        out = np.zeros_like(dense)
        out[:, np.asarray(perm)] = dense
        return BitMatrix.from_dense(out)


def _append_column(words: np.ndarray, cols: int, bits: np.ndarray) -> np.ndarray:
    rows = words.shape[0]
    out = np.zeros((rows, words_for(cols + 1)), dtype=np.uint64)
    out[:, : words.shape[1]] = words
    word, bit = divmod(cols, WORD_BITS)
    out[:, word] |= (bits.astype(np.uint64) & _ONE) << np.uint64(bit)
    return out


def eliminate(words: np.ndarray, column_order: Iterable[int]) -> Tuple[np.ndarray, List[int]]:
    """
    Gauss-Jordan elimination over a private copy of packed rows.

    Pivots are taken in `column_order`; the returned rows are the nonzero rows
    of the reduced form, row i carrying pivot column pivots[i] and no other
    returned row having a one in that column.
    """
    w = np.array(words, dtype=np.uint64, copy=True)
    nrows = w.shape[0]
    pivots: List[int] = []
    r = 0
    for c in column_order:
        if r == nrows:
            break
        bits = column_bits(w, c)
        hits = np.flatnonzero(bits[r:])
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            w[[r, p]] = w[[p, r]]
            bits[[r, p]] = bits[[p, r]]
        mask = bits.astype(bool)
        mask[r] = False
        if mask.any():
            w[mask] ^= w[r]
        pivots.append(int(c))
        r += 1
    return w[:r], pivots


def row_reduce(m: BitMatrix, column_order: Optional[Iterable[int]] = None) -> Tuple[BitMatrix, List[int]]:
    """Reduced row echelon form (dependent rows dropped) and its pivot columns."""
    order = range(m.cols) if column_order is None else column_order
    reduced, pivots = eliminate(m.words, order)
    return BitMatrix(reduced, m.cols), pivots


def circulant(first_row: BitVector) -> BitMatrix:
    """n×n matrix whose row i is first_row cyclically shifted right by i."""
    if first_row.length < 1:
        raise ContractViolation("circulant needs a nonempty first row")
    return BitMatrix.from_vectors([first_row.cyclic_shift(i) for i in range(first_row.length)])


def rank(m: BitMatrix) -> int:
    if m.rows == 0:
        return 0
    return len(eliminate(m.words, range(m.cols))[1])


def solve(m: BitMatrix, target: BitVector) -> Optional[BitVector]:
    """
    Some x with m · x^T = target, or None when the system is inconsistent.

    Free variables are set to zero, so the answer is the back-substitution
    solution of the reduced system.
    """
    if target.length != m.rows:
        raise ContractViolation(f"target length {target.length} != {m.rows} rows")
    bits = np.fromiter(target, dtype=np.uint64, count=target.length)
    augmented = _append_column(m.words, m.cols, bits)
    reduced, pivots = eliminate(augmented, range(m.cols + 1))
    if pivots and pivots[-1] == m.cols:
        return None
    rhs = column_bits(reduced, m.cols) if len(pivots) else np.zeros(0, dtype=np.uint64)
    value = 0
    for i, p in enumerate(pivots):
        if rhs[i]:
            value |= 1 << p
    return BitVector(m.cols, value)


def nullspace_basis(m: BitMatrix) -> List[BitVector]:
    """Basis of {x : m · x^T = 0}; it has cols - rank(m) vectors."""
    if m.rows == 0:
        return [BitVector(m.cols, 1 << c) for c in range(m.cols)]
    reduced, pivots = eliminate(m.words, range(m.cols))
    pivot_set = set(pivots)
    basis = []
    for f in range(m.cols):
        if f in pivot_set:
            continue
        value = 1 << f
        for i in np.flatnonzero(column_bits(reduced, f)):
            value |= 1 << pivots[int(i)]
        basis.append(BitVector(m.cols, value))
    return basis
