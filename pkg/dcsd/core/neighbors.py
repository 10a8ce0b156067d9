"""
Self-dual neighbors of a self-dual code.

A neighbor D of C shares a subspace of codimension one with it. Neighbors
that avoid every minimum weight codeword of C come from even-weight
solutions x of M x^T = 1, with M the matrix of weight-d codewords: take
C_0 = <x>^perp ∩ C and extend it by x or by x + y for any y in C \\ C_0.

Every solution is x0 + v with v in the null space of M, which contains C.
Solutions that differ by a codeword of C give the same pair of neighbors,
so the walk runs over a complement of C in that null space.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np

from dcsd.core.codes import LinearCode, extend, subcode_orthogonal_to
from dcsd.core.errors import BudgetExhausted, ContractViolation
from dcsd.core.gf2 import BitMatrix, BitVector, nullspace_basis, rank, solve
from dcsd.core.weights import (
    EngineSettings,
    ProgressCallback,
    low_weight_codewords,
    meets_min_weight,
    min_weight,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NeighborReport:
    length: int
    d: int
    rank_m: int
    rank_m_aug: int
    neighbor_bound: int
    best_neighbor_min_weight: Optional[int] = None
    neighbors_examined: int = 0

    @property
    def t(self) -> int:
        return self.rank_m

    @property
    def solvable(self) -> bool:
        return self.rank_m == self.rank_m_aug


def weight_d_matrix(
    code: LinearCode,
    settings: Optional[EngineSettings] = None,
    *,
    d: Optional[int] = None,
) -> BitMatrix:
    """All minimum weight codewords as rows, in lexicographic order (coordinate 0 first)."""
    settings = settings or EngineSettings()
    if d is None:
        d = min_weight(code, settings, hints=code.structural_sets)
    words = low_weight_codewords(code, [d], settings, hints=code.structural_sets)[d]
    if len(words):
        raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
        bits = np.unpackbits(raw, axis=1, bitorder="little")[:, : code.length]
        words = words[np.lexsort(bits[:, ::-1].T)]
    return BitMatrix(words, code.length)


def rank_pair(
    code: LinearCode,
    settings: Optional[EngineSettings] = None,
    *,
    m: Optional[BitMatrix] = None,
) -> Tuple[int, int]:
    """(rank M, rank of M with the all-one column appended)."""
    if m is None:
        m = weight_d_matrix(code, settings)
    return rank(m), rank(m.with_column(BitVector.ones(m.rows)))


def _require_self_dual(code: LinearCode) -> None:
    if 2 * code.dimension != code.length or not code.construction.gram().is_zero():
        raise ContractViolation("neighbors are taken of self-dual codes")


def _complement(code: LinearCode, basis: List[BitVector]) -> List[BitVector]:
    """Vectors of `basis` that extend the row space of `code` one dimension at a time."""
    span = code
    chosen = []
    for v in basis:
        if not span.contains(v):
            chosen.append(v)
            span = LinearCode(span.generator.with_row(v))
    return chosen


def enumerate_neighbors(
    code: LinearCode,
    settings: Optional[EngineSettings] = None,
    *,
    m: Optional[BitMatrix] = None,
    start: int = 0,
    budget: Optional[int] = None,
) -> Iterator[LinearCode]:
    """
    Self-dual neighbors containing no minimum weight codeword of `code`.

    Solution classes are visited in Gray code order; `start` skips the first
    classes and `budget` bounds how many are visited, after which the stream
    ends with BudgetExhausted carrying the next start index.
    """
    _require_self_dual(code)
    if m is None:
        m = weight_d_matrix(code, settings)
    x = solve(m, BitVector.ones(m.rows))
    if x is None:
        logger.debug("%r: M x = 1 has no solution", code)
        return
    free = _complement(code, nullspace_basis(m))
    logger.debug("%r: %d solution classes", code, 1 << len(free))
    visited = 0
    for i in range(1 << len(free)):
        if i:
            x = x + free[(i & -i).bit_length() - 1]
        if i < start:
            continue
        if budget is not None and visited >= budget:
            raise BudgetExhausted(f"visited {visited} solution classes", checkpoint=i)
        visited += 1
        if x.weight % 2:
            continue
        code_0 = subcode_orthogonal_to(code, x)
        y = next(g for g in code.generator if g.dot(x) == 1)
        yield extend(code_0, x)
        yield extend(code_0, x + y)


def _screen(
    code: LinearCode,
    settings: EngineSettings,
    d: int,
    m: BitMatrix,
    bound: int,
    progress: Optional[ProgressCallback],
) -> Tuple[int, int]:
    best = 0
    examined = 0
    hints = code.structural_sets
    for neighbor in enumerate_neighbors(code, settings, m=m):
        examined += 1
        if meets_min_weight(neighbor, d + 2, settings, hints=hints):
            best = min_weight(neighbor, settings, hints=hints)
            logger.info("%r has a neighbor of minimum weight %d", code, best)
            return best, examined
        best = max(best, min_weight(neighbor, settings, hints=hints))
        if progress:
            progress(examined, bound)
    return best, examined


def best_neighbor_min_weight(
    code: LinearCode,
    settings: Optional[EngineSettings] = None,
    *,
    d: Optional[int] = None,
    progress: Optional[ProgressCallback] = None,
) -> int:
    """Largest neighbor minimum weight; stops at the first neighbor reaching d + 2. 0 if none."""
    settings = settings or EngineSettings()
    if d is None:
        d = min_weight(code, settings, hints=code.structural_sets)
    m = weight_d_matrix(code, settings, d=d)
    bound = 2 * (1 << (code.length // 2 - rank(m)))
    return _screen(code, settings, d, m, bound, progress)[0]


def neighbor_report(
    code: LinearCode,
    settings: Optional[EngineSettings] = None,
    *,
    screen: bool = True,
    progress: Optional[ProgressCallback] = None,
) -> NeighborReport:
    """Rank pair, neighbor bound and (optionally) the neighbor screen of one code."""
    _require_self_dual(code)
    settings = settings or EngineSettings()
    d = min_weight(code, settings, hints=code.structural_sets)
    m = weight_d_matrix(code, settings, d=d)
    rank_m, rank_aug = rank_pair(code, settings, m=m)
    bound = 2 * (1 << (code.length // 2 - rank_m))
    best = None
    examined = 0
    if screen and rank_m == rank_aug:
        best, examined = _screen(code, settings, d, m, bound, progress)
    elif screen:
        best = 0
    return NeighborReport(
        length=code.length,
        d=d,
        rank_m=rank_m,
        rank_m_aug=rank_aug,
        neighbor_bound=bound,
        best_neighbor_min_weight=best,
        neighbors_examined=examined,
    )
