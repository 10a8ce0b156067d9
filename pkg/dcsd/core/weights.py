"""
Low-weight codeword enumeration over information sets.

Every codeword is the sum of the systematic generator rows selected by its
restriction to an information set. Enumerating all messages of weight <= rho
over several information sets whose "fresh" parts are disjoint visits every
codeword of weight below

    bound(rho) = sum_j max(0, rho + 1 - (k - fresh_j))

so counts up to bound(rho) - 1 are exact. A codeword reached from several
sets is counted once, at the set where its restriction is lightest (ties go
to the lowest set index), so nothing has to be remembered between blocks.

When every generator row has even weight the code is even, so a bound is
rounded up to the next even number and only even weights are tallied.

Work is split into blocks keyed by (set, message weight, first row index);
blocks are independent and their partial counts add up. Inside a block the
leading rows of each message move in revolving-door order, so consecutive
prefixes differ by one row swap.
"""

from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from dcsd.core.codes import LinearCode, ShadowProfile, extend, shadow
from dcsd.core.errors import ContractViolation, WorkBudgetExceeded
from dcsd.core.gf2 import BitVector, eliminate, int_to_words, popcounts

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, int], None]

DEFAULT_WORK_BUDGET = 2**33
TAIL_SIZE = 4


@dataclass(frozen=True)
class EngineSettings:
    """Knobs shared by every enumeration call."""

    work_budget: int = DEFAULT_WORK_BUDGET
    workers: int = 1
    seed: int = 0x5EED
    max_information_sets: int = 8


@dataclass(frozen=True)
class WeightProfile:
    """Exact codeword counts A_w for every w <= radius."""

    counts: Dict[int, int]
    radius: int

    def count(self, w: int) -> int:
        if w > self.radius:
            raise ContractViolation(f"A_{w} is beyond the guaranteed radius {self.radius}")
        return self.counts.get(w, 0)

    __getitem__ = count

    def exact_counts(self) -> Dict[int, int]:
        """Every weight 0..radius, zeros included."""
        return {w: self.counts.get(w, 0) for w in range(self.radius + 1)}

    @property
    def min_weight(self) -> Optional[int]:
        """Smallest nonzero weight present, or None when it exceeds the radius."""
        present = [w for w, c in self.counts.items() if w > 0 and c > 0]
        return min(present) if present else None

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class InformationSet:
    columns: Tuple[int, ...]
    fresh: int
    rows: np.ndarray = field(repr=False)
    mask: np.ndarray = field(repr=False)


def _make_set(reduced: np.ndarray, pivots: List[int], fresh: int, n_words: int) -> InformationSet:
    mask_value = 0
    for c in pivots:
        mask_value |= 1 << c
    rows = np.array(reduced, dtype=np.uint64)
    rows.setflags(write=False)
    return InformationSet(tuple(pivots), fresh, rows, int_to_words(mask_value, n_words))


def information_sets(
    code: LinearCode,
    *,
    hints: Sequence[Sequence[int]] = (),
    max_sets: int = 8,
    seed: int = 0x5EED,
) -> List[InformationSet]:
    """
    Information sets for enumeration, structural halves first.

    Hints that are not information sets of this code are skipped. Further
    sets are grown greedily from random column orders that put unused columns
    first; growth stops when a new set would bring no fresh column.
    """
    k, n = code.dimension, code.length
    if k == 0:
        raise ContractViolation("the zero code has no information sets")
    words = code.generator.words
    n_words = code.generator.n_words
    used: set = set()
    sets: List[InformationSet] = []

    for hint in list(code.structural_sets) + [tuple(h) for h in hints]:
        if len(sets) >= max_sets:
            break
        if len(hint) != k or any(not 0 <= c < n for c in hint):
            continue
        reduced, pivots = eliminate(words, hint)
        if len(pivots) != k:
            logger.debug("hint of size %d is not an information set of %r", len(hint), code)
            continue
        fresh = len(set(pivots) - used)
        if fresh == 0:
            continue
        sets.append(_make_set(reduced, pivots, fresh, n_words))
        used |= set(pivots)

    rng = np.random.default_rng(seed)
    while len(sets) < max_sets:
        unused = [c for c in range(n) if c not in used]
        if not unused:
            break
        order = [int(c) for c in rng.permutation(unused)]
        order += [int(c) for c in rng.permutation(sorted(used))] if used else []
        reduced, pivots = eliminate(words, order)
        fresh = sum(1 for p in pivots if p not in used)
        if fresh == 0:
            break
        sets.append(_make_set(reduced, pivots, fresh, n_words))
        used |= set(pivots)

    logger.debug(
        "%r: %d information sets, fresh sizes %s", code, len(sets), [s.fresh for s in sets]
    )
    return sets


def is_even(code: LinearCode) -> bool:
    """True iff every codeword has even weight."""
    return not bool((popcounts(code.generator.words) & 1).any())


def guarantee_bound(sets: Sequence[InformationSet], k: int, rho: int, even: bool = False) -> int:
    """Every codeword not visited by message weight <= rho has at least this weight."""
    if rho >= k:
        return 1 << 62
    bound = sum(max(0, rho + 1 - (k - s.fresh)) for s in sets)
    return bound + (bound & 1) if even else bound


def revolving_door(items: Sequence[int], t: int, forward: bool = True) -> Iterator[Tuple[int, ...]]:
    """All t-subsets of items; each differs from the one before by swapping one element."""
    n = len(items)
    if t == 0:
        yield ()
        return
    if t > n:
        return
    if t == n:
        yield tuple(items)
        return
    head, last = items[:-1], items[-1]
    if forward:
        yield from revolving_door(head, t, True)
        for c in revolving_door(head, t - 1, False):
            yield c + (last,)
    else:
        for c in revolving_door(head, t - 1, True):
            yield c + (last,)
        yield from revolving_door(head, t, False)


def enumeration_cost(sets: Sequence[InformationSet], k: int, rho: int) -> int:
    if rho >= k:
        return 1 << k
    return len(sets) * sum(comb(k, m) for m in range(rho + 1))


def _plan(
    sets: List[InformationSet], k: int, radius: int, even: bool = False
) -> Tuple[int, List[InformationSet]]:
    """Smallest message weight (and fewest sets) whose guarantee covers `radius`."""
    for rho in range(k):
        if guarantee_bound(sets, k, rho, even) >= radius + 1:
            chosen = list(sets)
            while len(chosen) > 1 and guarantee_bound(chosen[:-1], k, rho, even) >= radius + 1:
                chosen.pop()
            return rho, chosen
    return k, sets[:1]


class _Scanner:
    """Generates message blocks for one information-set family and screens them."""

    def __init__(
        self,
        sets: Sequence[InformationSet],
        k: int,
        coset_filter: Optional[np.ndarray] = None,
        even: bool = False,
    ):
        self.sets = list(sets)
        self.k = k
        self.even = even
        self.masks = np.stack([s.mask for s in self.sets])
        self.coset_filter = coset_filter
        self._tables: Dict[Tuple[int, int], Tuple[np.ndarray, np.ndarray]] = {}
        self._lock = threading.Lock()

    def _table(self, j: int, s: int) -> Tuple[np.ndarray, np.ndarray]:
        key = (j, s)
        with self._lock:
            if key not in self._tables:
                rows = self.sets[j].rows
                combos = np.array(list(combinations(range(self.k), s)), dtype=np.intp).reshape(-1, s)
                table = np.bitwise_xor.reduce(rows[combos], axis=1)
                offsets = np.searchsorted(combos[:, 0], np.arange(self.k + 1), side="left")
                self._tables[key] = (table, offsets)
            return self._tables[key]

    def blocks(self, j: int, m: int, b: int) -> Iterator[np.ndarray]:
        """All weight-m messages over set j whose lowest row index is b, as codewords."""
        rows = self.sets[j].rows
        if m == 0:
            if b == 0:
                yield np.zeros((1, rows.shape[1]), dtype=np.uint64)
            return
        s = min(m, TAIL_SIZE)
        p = m - s
        table, offsets = self._table(j, s)
        if p == 0:
            block = table[offsets[b] : offsets[b + 1]]
            if len(block):
                yield block
            return
        prefix: Optional[np.ndarray] = None
        previous: Tuple[int, ...] = ()
        for rest in revolving_door(tuple(range(b + 1, self.k)), p - 1):
            if prefix is None:
                prefix = np.bitwise_xor.reduce(rows[[b, *rest]], axis=0)
            else:
                for i in set(previous).symmetric_difference(rest):
                    prefix = prefix ^ rows[i]
            previous = rest
            last = rest[-1] if rest else b
            start = offsets[last + 1]
            if start >= len(table):
                continue
            yield table[start:] ^ prefix

    def scan(
        self,
        j: int,
        m: int,
        b: int,
        radius: int,
        *,
        dedup: bool = True,
        collect: FrozenSet[int] = frozenset(),
    ) -> _UnitResult:
        counts = np.zeros(radius + 1, dtype=np.int64)
        found_min: Optional[int] = None
        collected: Dict[int, List[np.ndarray]] = {w: [] for w in collect}
        thresholds = np.full(len(self.sets), m, dtype=np.int64)
        thresholds[:j] = m + 1
        for block in self.blocks(j, m, b):
            if self.coset_filter is not None:
                block = block[(popcounts(block & self.coset_filter) & 1).astype(bool)]
            if dedup and len(self.sets) > 1 and len(block):
                restricted = popcounts(block[:, None, :] & self.masks[None, :, :])
                block = block[np.all(restricted >= thresholds, axis=1)]
            if not len(block):
                continue
            weights = popcounts(block)
            nonzero = weights[weights > 0]
            if nonzero.size:
                lightest = int(nonzero.min())
                found_min = lightest if found_min is None else min(found_min, lightest)
            small = weights <= radius
            if small.any() and self.even:
                half = radius // 2 + 1
                counts[::2] += np.bincount(weights[small] >> 1, minlength=half)[:half]
            elif small.any():
                counts += np.bincount(weights[small], minlength=radius + 1)[: radius + 1]
            for w in collect:
                hit = block[weights == w]
                if len(hit):
                    collected[w].append(hit.copy())
        return _UnitResult(counts, found_min, collected)

    def units(self, m: int, set_indices: Iterable[int]) -> List[Tuple[int, int, int]]:
        if m == 0:
            return [(j, 0, 0) for j in set_indices]
        return [(j, m, b) for j in set_indices for b in range(self.k - m + 1)]


@dataclass
class _UnitResult:
    counts: np.ndarray
    found_min: Optional[int]
    collected: Dict[int, List[np.ndarray]]


def _run_units(
    units: List[Tuple[int, int, int]],
    work: Callable[[Tuple[int, int, int]], _UnitResult],
    workers: int,
    progress: Optional[ProgressCallback],
) -> Iterator[_UnitResult]:
    total = len(units)
    if workers <= 1 or total <= 1:
        for done, unit in enumerate(units, start=1):
            yield work(unit)
            if progress:
                progress(done, total)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for done, result in enumerate(pool.map(work, units), start=1):
            yield result
            if progress:
                progress(done, total)


def _count(
    code: LinearCode,
    radius: int,
    settings: EngineSettings,
    *,
    hints: Sequence[Sequence[int]] = (),
    coset_filter: Optional[np.ndarray] = None,
    collect: FrozenSet[int] = frozenset(),
    progress: Optional[ProgressCallback] = None,
) -> Tuple[np.ndarray, Dict[int, np.ndarray]]:
    k = code.dimension
    even = is_even(code)
    radius = min(radius, code.length)
    sets = information_sets(
        code, hints=hints, max_sets=settings.max_information_sets, seed=settings.seed
    )
    rho, chosen = _plan(sets, k, radius, even)
    cost = enumeration_cost(chosen, k, rho)
    if cost > settings.work_budget:
        achieved = -1
        for r in range(k + 1):
            if enumeration_cost(sets, k, r) > settings.work_budget:
                break
            achieved = code.length if r >= k else guarantee_bound(sets, k, r, even) - 1
        raise WorkBudgetExceeded(radius, achieved, cost, settings.work_budget)

    logger.info(
        "counting %r to radius %d: message weight %d over %d sets, %d evaluations",
        code, radius, rho, len(chosen), cost,
    )
    scanner = _Scanner(chosen, k, coset_filter, even)
    full = rho >= k
    units: List[Tuple[int, int, int]] = []
    for m in range(rho + 1):
        units += scanner.units(m, range(len(chosen)))

    def work(unit: Tuple[int, int, int]) -> _UnitResult:
        j, m, b = unit
        return scanner.scan(j, m, b, radius, dedup=not full, collect=collect)

    counts = np.zeros(radius + 1, dtype=np.int64)
    gathered: Dict[int, List[np.ndarray]] = {w: [] for w in collect}
    for result in _run_units(units, work, settings.workers, progress):
        counts += result.counts
        for w, parts in result.collected.items():
            gathered[w].extend(parts)
    n_words = code.generator.n_words
    stacked = {
        w: np.vstack(parts) if parts else np.zeros((0, n_words), dtype=np.uint64)
        for w, parts in gathered.items()
    }
    return counts, stacked


def count_low_weight(
    code: LinearCode,
    target_radius: int,
    settings: Optional[EngineSettings] = None,
    *,
    hints: Sequence[Sequence[int]] = (),
    progress: Optional[ProgressCallback] = None,
) -> WeightProfile:
    """Exact A_w for all w <= target_radius."""
    if code.dimension < 1:
        raise ContractViolation("counting needs a code of dimension at least 1")
    settings = settings or EngineSettings()
    counts, _ = _count(code, target_radius, settings, hints=hints, progress=progress)
    radius = min(target_radius, code.length)
    return WeightProfile({w: int(c) for w, c in enumerate(counts) if c}, radius)


def low_weight_codewords(
    code: LinearCode,
    weights: Iterable[int],
    settings: Optional[EngineSettings] = None,
    *,
    hints: Sequence[Sequence[int]] = (),
    progress: Optional[ProgressCallback] = None,
) -> Dict[int, np.ndarray]:
    """All codewords of the given weights, as packed rows (each exactly once)."""
    wanted = frozenset(int(w) for w in weights)
    if not wanted:
        return {}
    if code.dimension < 1:
        raise ContractViolation("enumeration needs a code of dimension at least 1")
    settings = settings or EngineSettings()
    _, collected = _count(
        code, max(wanted), settings, hints=hints, collect=wanted, progress=progress
    )
    return collected


def count_coset_low_weight(
    code_0: LinearCode,
    rep: BitVector,
    target_radius: int,
    settings: Optional[EngineSettings] = None,
    *,
    hints: Sequence[Sequence[int]] = (),
    progress: Optional[ProgressCallback] = None,
) -> Dict[int, int]:
    """Exact counts of vectors of weight <= target_radius in rep + C_0."""
    if code_0.contains(rep):
        raise ContractViolation("coset representative lies in the code")
    settings = settings or EngineSettings()
    # A dual vector that is odd on rep separates the coset from C_0 inside <C_0, rep>.
    separator = next(v for v in code_0.dual().generator if v.dot(rep) == 1)
    joined = extend(code_0, rep)
    counts, _ = _count(
        joined,
        target_radius,
        settings,
        hints=tuple(code_0.structural_sets) + tuple(tuple(h) for h in hints),
        coset_filter=separator.words(joined.generator.n_words),
        progress=progress,
    )
    return {w: int(c) for w, c in enumerate(counts) if c}


def shadow_profile(
    code: LinearCode,
    target_radius: int,
    settings: Optional[EngineSettings] = None,
    *,
    progress: Optional[ProgressCallback] = None,
) -> ShadowProfile:
    """Shadow coset representatives with exact S_w for w <= target_radius."""
    base = shadow(code)
    totals: Dict[int, int] = {}
    for rep in base.coset_reps:
        counts = count_coset_low_weight(
            base.subcode, rep, target_radius, settings, hints=code.structural_sets, progress=progress
        )
        for w, c in counts.items():
            totals[w] = totals.get(w, 0) + c
    return ShadowProfile(
        coset_reps=base.coset_reps,
        subcode=base.subcode,
        counts=totals,
        radius=min(target_radius, code.length),
    )


def _deepen(
    code: LinearCode,
    settings: EngineSettings,
    hints: Sequence[Sequence[int]],
    stop: Callable[[Optional[int], int], Optional[int]],
    progress: Optional[ProgressCallback],
) -> int:
    """
    Iterative deepening over message weight.

    After each level `stop(best, bound)` decides: it returns the answer to
    finish with, or None to go one level deeper.
    """
    k = code.dimension
    even = is_even(code)
    sets = information_sets(
        code, hints=hints, max_sets=settings.max_information_sets, seed=settings.seed
    )
    best: Optional[int] = None
    for rho in range(k + 1):
        active = range(1) if rho >= k else range(len(sets))
        scanner = _Scanner(sets[: len(active)], k)
        units = scanner.units(rho, active)

        def work(unit: Tuple[int, int, int]) -> _UnitResult:
            j, m, b = unit
            return scanner.scan(j, m, b, 0, dedup=False)

        for result in _run_units(units, work, settings.workers, progress):
            if result.found_min is not None:
                best = result.found_min if best is None else min(best, result.found_min)
        bound = guarantee_bound(sets, k, rho, even)
        if rho >= k:
            bound = 1 << 62
        answer = stop(best, bound)
        if answer is not None:
            logger.debug("%r: deepening stopped at message weight %d", code, rho)
            return answer
    raise AssertionError("full enumeration must settle the minimum weight")


def min_weight(
    code: LinearCode,
    settings: Optional[EngineSettings] = None,
    *,
    hints: Sequence[Sequence[int]] = (),
    progress: Optional[ProgressCallback] = None,
) -> int:
    """Exact minimum nonzero weight."""
    if code.dimension < 1:
        raise ContractViolation("minimum weight needs a code of dimension at least 1")

    def stop(best: Optional[int], bound: int) -> Optional[int]:
        return best if best is not None and best <= bound else None

    return _deepen(code, settings or EngineSettings(), hints, stop, progress)


def meets_min_weight(
    code: LinearCode,
    d: int,
    settings: Optional[EngineSettings] = None,
    *,
    hints: Sequence[Sequence[int]] = (),
    progress: Optional[ProgressCallback] = None,
) -> bool:
    """True iff every nonzero codeword has weight >= d; exits as soon as it is decided."""
    if code.dimension < 1:
        return True

    def stop(best: Optional[int], bound: int) -> Optional[bool]:
        if best is not None and best < d:
            return False
        if bound >= d:
            return True
        return None

    return bool(_deepen(code, settings or EngineSettings(), hints, stop, progress))


def weight_distribution(code: LinearCode) -> Dict[int, int]:
    """Complete distribution by listing all 2^k codewords."""
    weights = popcounts(code.codeword_words())
    values, counts = np.unique(weights, return_counts=True)
    return {int(w): int(c) for w, c in zip(values, counts)}
