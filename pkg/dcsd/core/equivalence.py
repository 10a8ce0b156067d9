"""
Permutation equivalence and automorphism groups of binary codes.

Handles:
- Fingerprints: permutation invariants used as a coarse screen
- Colour refinement on the low-weight codeword incidence structure
- Backtracking over refinement-compatible permutations, with every leaf
  verified by code membership of the permuted generator rows
- Automorphism group order as a stabilizer chain (product of base orbits)
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Set, Tuple

import numpy as np

from dcsd.core.codes import LinearCode, ShadowProfile
from dcsd.core.errors import ContractViolation, EquivalenceUndecided
from dcsd.core.weights import (
    EngineSettings,
    WeightProfile,
    count_low_weight,
    low_weight_codewords,
    min_weight,
)

logger = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 200_000

Permutation = Tuple[int, ...]


@dataclass(frozen=True)
class Fingerprint:
    """Permutation-invariant summary of a code; equal codes always agree."""

    length: int
    dimension: int
    d: int
    a_d: int
    a_d2: int
    shadow: Tuple[Tuple[int, int], ...] = ()
    incidence: Tuple[Tuple[int, int], ...] = ()

    def as_tuple(self) -> tuple:
        return (
            self.length,
            self.dimension,
            self.d,
            self.a_d,
            self.a_d2,
            self.shadow,
            self.incidence,
        )


def fingerprint(
    code: LinearCode,
    settings: Optional[EngineSettings] = None,
    *,
    d: Optional[int] = None,
    profile: Optional[WeightProfile] = None,
    shadow: Optional[ShadowProfile] = None,
) -> Fingerprint:
    """
    Invariants of `code`. Shadow counts enter only when a shadow profile is
    supplied, so compare fingerprints built the same way.
    """
    settings = settings or EngineSettings()
    hints = code.structural_sets
    if d is None:
        d = profile.min_weight if profile is not None and profile.min_weight else min_weight(
            code, settings, hints=hints
        )
    if profile is None or profile.radius < d + 2:
        profile = count_low_weight(code, min(d + 2, code.length), settings, hints=hints)
    words = low_weight_codewords(code, [d], settings, hints=hints)[d]
    per_coordinate = _unpack(words, code.length).sum(axis=0)
    histogram = tuple(sorted(Counter(int(c) for c in per_coordinate).items()))
    shadow_counts: Tuple[Tuple[int, int], ...] = ()
    if shadow is not None and shadow.radius is not None:
        shadow_counts = tuple(sorted((w, c) for w, c in shadow.counts.items() if c))
    a_d2 = profile.count(d + 2) if d + 2 <= profile.radius else 0
    return Fingerprint(
        length=code.length,
        dimension=code.dimension,
        d=d,
        a_d=profile.count(d),
        a_d2=a_d2,
        shadow=shadow_counts,
        incidence=histogram,
    )


def _unpack(words: np.ndarray, length: int) -> np.ndarray:
    if len(words) == 0:
        return np.zeros((0, length), dtype=np.uint8)
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :length]


@dataclass
class _Incidence:
    """Dense low-weight codeword incidence, layered by weight."""

    matrix: np.ndarray
    layers: np.ndarray
    word_index: np.ndarray = field(init=False)
    coord_index: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.word_index, self.coord_index = np.nonzero(self.matrix)

    @property
    def length(self) -> int:
        return self.matrix.shape[1]


def _layer_weights(code: LinearCode, settings: EngineSettings) -> List[int]:
    """Weights d, d+1, ... until the codewords of those weights cover every coordinate."""
    d = min_weight(code, settings, hints=code.structural_sets)
    weights = [d]
    while True:
        words = low_weight_codewords(code, weights, settings, hints=code.structural_sets)
        covered = np.zeros(code.length, dtype=bool)
        for w in weights:
            covered |= _unpack(words[w], code.length).any(axis=0)
        if covered.all() or weights[-1] >= code.length:
            return weights
        weights.append(weights[-1] + 1)


def _incidence(code: LinearCode, weights: Sequence[int], settings: EngineSettings) -> _Incidence:
    words = low_weight_codewords(code, weights, settings, hints=code.structural_sets)
    blocks = [_unpack(words[w], code.length) for w in weights]
    layers = np.concatenate([np.full(len(b), i, dtype=np.int64) for i, b in enumerate(blocks)])
    return _Incidence(np.vstack(blocks).astype(np.float64), layers)


def _relabel(keys: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    unique, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    return unique, inverse.reshape(-1).astype(np.int64), counts


def _refine(inc: _Incidence, colours: np.ndarray) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """
    Colour refinement on the bipartite codeword/coordinate graph until stable.

    Colour labels are ranks of sorted invariant keys, so two codes refined
    from corresponding colourings get comparable labels. The trace records
    every round and must match for the colourings to correspond.
    """
    n = inc.length
    trace: List[int] = []
    while True:
        n_colours = int(colours.max()) + 1
        onehot = np.zeros((n, n_colours))
        onehot[np.arange(n), colours] = 1.0
        word_keys = np.column_stack([inc.layers, (inc.matrix @ onehot).astype(np.int64)])
        word_unique, word_colour, _ = _relabel(word_keys)
        n_word_colours = len(word_unique)
        flat = inc.coord_index * n_word_colours + word_colour[inc.word_index]
        profile = np.bincount(flat, minlength=n * n_word_colours).reshape(n, n_word_colours)
        coord_keys = np.column_stack([colours, profile])
        coord_unique, refined, counts = _relabel(coord_keys)
        trace.append(hash((word_unique.tobytes(), coord_unique.tobytes(), counts.tobytes())))
        if len(coord_unique) == n_colours:
            return refined, tuple(trace)
        colours = refined


def _individualize(colours: np.ndarray, v: int) -> np.ndarray:
    marked = colours.copy()
    marked[v] = colours.max() + 1
    return marked


def _target_cell(colours: np.ndarray) -> Optional[np.ndarray]:
    """Coordinates of the smallest non-singleton colour class, lowest colour first."""
    values, counts = np.unique(colours, return_counts=True)
    multiple = counts > 1
    if not multiple.any():
        return None
    sizes = counts[multiple]
    colour = values[multiple][int(np.argmin(sizes))]
    return np.flatnonzero(colours == colour)


@dataclass
class _PathNode:
    colours: np.ndarray
    trace: Tuple[int, ...]
    cell: Optional[np.ndarray]
    chosen: Optional[int]


class _Search:
    """
    Leaf search from a target code towards the first path of a reference code.

    Automorphisms of the target prune the search: when the subtree below w
    fails, so does the subtree below every image of w under automorphisms
    fixing the points chosen so far. Automorphisms are supplied up front or
    learned whenever a failed leaf maps onto the first target leaf.
    """

    def __init__(
        self,
        reference: LinearCode,
        ref_inc: _Incidence,
        target: LinearCode,
        tgt_inc: _Incidence,
        node_budget: int,
        automorphisms: Sequence[Permutation] = (),
    ):
        self.reference = reference
        self.target = target
        self.ref_inc = ref_inc
        self.tgt_inc = tgt_inc
        self.node_budget = node_budget
        self.nodes = 0
        self.automorphisms: List[Permutation] = list(automorphisms)
        self.first_leaf: Optional[np.ndarray] = None
        self.path = self._first_path()

    def _first_path(self) -> List[_PathNode]:
        colours, trace = _refine(self.ref_inc, np.zeros(self.ref_inc.length, dtype=np.int64))
        path = []
        while True:
            cell = _target_cell(colours)
            chosen = None if cell is None else int(cell[0])
            path.append(_PathNode(colours, trace, cell, chosen))
            if cell is None:
                return path
            colours, trace = _refine(self.ref_inc, _individualize(colours, chosen))

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise EquivalenceUndecided(f"search exceeded {self.node_budget} refinement nodes")

    def root(self) -> Optional[np.ndarray]:
        colours, trace = _refine(self.tgt_inc, np.zeros(self.tgt_inc.length, dtype=np.int64))
        return colours if trace == self.path[0].trace else None

    def _leaf_map(self, colours: np.ndarray) -> Permutation:
        leaf = self.path[-1].colours
        by_colour = np.argsort(colours)
        return tuple(int(i) for i in by_colour[leaf])

    def _verifies(self, perm: Permutation) -> bool:
        return self.target.contains_code(self.reference.permuted(perm))

    def _learn(self, colours: np.ndarray) -> None:
        """Compare a failed leaf with the first target leaf; keep the map if it is an automorphism."""
        if self.first_leaf is None:
            self.first_leaf = colours
            return
        by_colour = np.argsort(colours)
        perm = tuple(int(i) for i in by_colour[self.first_leaf])
        if perm == tuple(range(len(perm))) or perm in self.automorphisms:
            return
        if self.target.contains_code(self.target.permuted(perm)):
            self.automorphisms.append(perm)

    def stabilizer(self, prefix: Sequence[int]) -> List[Permutation]:
        """Known automorphisms fixing every point of `prefix`."""
        return [g for g in self.automorphisms if all(g[p] == p for p in prefix)]

    def find(
        self, colours: np.ndarray, depth: int, prefix: Tuple[int, ...] = ()
    ) -> Optional[Permutation]:
        """A permutation mapping reference onto target through this node, or None."""
        node = self.path[depth]
        if node.cell is None:
            perm = self._leaf_map(colours)
            if self._verifies(perm):
                return perm
            self._learn(colours)
            return None
        cell = np.flatnonzero(colours == node.colours[node.chosen])
        if len(cell) != len(node.cell):
            return None
        pruned: Set[int] = set()
        for w in cell:
            w = int(w)
            if w in pruned:
                continue
            found = self.branch(colours, w, depth, prefix)
            if found is not None:
                return found
            pruned |= _orbit(w, self.stabilizer(prefix))
        return None

    def branch(
        self, colours: np.ndarray, w: int, depth: int, prefix: Tuple[int, ...] = ()
    ) -> Optional[Permutation]:
        """Individualize w at `depth` and continue the search below it."""
        self._tick()
        refined, trace = _refine(self.tgt_inc, _individualize(colours, w))
        if trace != self.path[depth + 1].trace:
            return None
        return self.find(refined, depth + 1, (*prefix, w))


def find_equivalence(
    c1: LinearCode,
    c2: LinearCode,
    settings: Optional[EngineSettings] = None,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    screened: bool = False,
    automorphisms: Sequence[Permutation] = (),
) -> Optional[Permutation]:
    """A coordinate permutation p with c1.permuted(p) == c2, or None.

    `screened` skips the fingerprint comparison when the caller already made it.
    `automorphisms` are known automorphisms of c2; they only speed the search up.
    """
    if c1.length != c2.length or c1.dimension != c2.dimension:
        raise ContractViolation(
            f"equivalence needs codes of equal parameters, got {c1!r} and {c2!r}"
        )
    settings = settings or EngineSettings()
    if c1.dimension == 0:
        return tuple(range(c1.length))
    if not screened and fingerprint(c1, settings) != fingerprint(c2, settings):
        return None
    weights = _layer_weights(c1, settings)
    search = _Search(
        c1,
        _incidence(c1, weights, settings),
        c2,
        _incidence(c2, weights, settings),
        node_budget,
        automorphisms,
    )
    colours = search.root()
    if colours is None:
        return None
    perm = search.find(colours, 0)
    logger.debug(
        "equivalence %r ~ %r: %s after %d nodes, %d automorphisms learned",
        c1, c2, perm is not None, search.nodes, len(search.automorphisms) - len(automorphisms),
    )
    return perm


def are_equivalent(
    c1: LinearCode,
    c2: LinearCode,
    settings: Optional[EngineSettings] = None,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    screened: bool = False,
    automorphisms: Sequence[Permutation] = (),
) -> bool:
    """True iff some coordinate permutation maps c1 onto c2."""
    found = find_equivalence(
        c1, c2, settings, node_budget=node_budget, screened=screened, automorphisms=automorphisms
    )
    return found is not None


@dataclass(frozen=True)
class AutomorphismGroup:
    """
    Aut(C) as found by the stabilizer chain search. When the node budget ran
    out, `complete` is False and `order` is a divisor of the true order.
    """

    order: int
    generators: Tuple[Permutation, ...]
    base: Tuple[int, ...] = ()
    orbit_sizes: Tuple[int, ...] = ()
    complete: bool = True


def _orbit(point: int, generators: Sequence[Permutation]) -> Set[int]:
    orbit = {point}
    frontier = [point]
    while frontier:
        p = frontier.pop()
        for g in generators:
            q = g[p]
            if q not in orbit:
                orbit.add(q)
                frontier.append(q)
    return orbit


def automorphism_group(
    code: LinearCode,
    settings: Optional[EngineSettings] = None,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> AutomorphismGroup:
    """
    Aut(C) as a stabilizer chain along the first refinement path.

    Working upwards from the deepest base point, each orbit of the point
    stabilizer is closed under the generators found so far; only points still
    outside the closure need a search, and a failed point rules out its whole
    orbit. The order is the product of the orbit sizes.
    """
    if code.dimension == 0:
        raise ContractViolation("automorphism group needs a nonzero codeword")
    settings = settings or EngineSettings()
    inc = _incidence(code, _layer_weights(code, settings), settings)
    search = _Search(code, inc, code, inc, node_budget)
    strong: List[Permutation] = []
    orbit_sizes: List[int] = []
    order = 1
    levels = search.path[:-1]
    for depth in range(len(levels) - 1, -1, -1):
        node = levels[depth]
        prefix = tuple(level.chosen for level in levels[:depth])
        # learned automorphisms need not fix the prefix
        orbit = _orbit(node.chosen, search.stabilizer(prefix))
        excluded: Set[int] = set()
        try:
            for w in node.cell:
                w = int(w)
                if w in orbit or w in excluded:
                    continue
                perm = search.branch(node.colours, w, depth, prefix)
                if perm is None:
                    excluded |= _orbit(w, search.stabilizer(prefix))
                    continue
                strong.append(perm)
                if perm not in search.automorphisms:
                    search.automorphisms.append(perm)
                orbit = _orbit(node.chosen, search.stabilizer(prefix))
        except EquivalenceUndecided as e:
            raise EquivalenceUndecided(
                str(e),
                partial_order=order * len(orbit),
                generators=tuple(search.automorphisms),
            ) from None
        orbit_sizes.append(len(orbit))
        order *= len(orbit)
    orbit_sizes.reverse()
    logger.info("|Aut(%r)| = %d after %d nodes", code, order, search.nodes)
    return AutomorphismGroup(
        order=order,
        generators=tuple(strong),
        base=tuple(node.chosen for node in levels),
        orbit_sizes=tuple(orbit_sizes),
    )


def known_automorphisms(
    code: LinearCode,
    settings: Optional[EngineSettings] = None,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> AutomorphismGroup:
    """The full group, or what the search found before the node budget ran out."""
    try:
        return automorphism_group(code, settings, node_budget=node_budget)
    except EquivalenceUndecided as e:
        logger.warning("%r: automorphism search undecided, |Aut| >= %s", code, e.partial_order)
        return AutomorphismGroup(
            order=e.partial_order or 1, generators=e.generators, complete=False
        )


def aut_order(
    code: LinearCode,
    settings: Optional[EngineSettings] = None,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> int:
    return automorphism_group(code, settings, node_budget=node_budget).order


def automorphism_generators(
    code: LinearCode,
    settings: Optional[EngineSettings] = None,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> List[Permutation]:
    """Strong generators found while computing the group order."""
    return list(automorphism_group(code, settings, node_budget=node_budget).generators)
