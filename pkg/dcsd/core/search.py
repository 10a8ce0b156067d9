"""
Candidate search and classification for double circulant self-dual codes.

Handles:
- Search specifications and their validation
- Canonical first rows under cyclic shifts and transposition
- Fixed-weight necklace generation, sharding and resumable checkpoints
- The classification pipeline: min-weight screen, weight profiles,
  enumerator fitting, fingerprint grouping and equivalence dedup
"""

from __future__ import annotations

import json
import logging
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import islice
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from dcsd.core.codes import (
    CirculantSpec,
    CodeKind,
    LinearCode,
    Parity,
    ShadowProfile,
    circulant_self_orthogonality,
    parity_class,
)
from dcsd.core.enumerators import (
    EnumeratorParams,
    counting_plan,
    family_for,
    fit,
)
from dcsd.core.equivalence import (
    DEFAULT_NODE_BUDGET,
    AutomorphismGroup,
    Fingerprint,
    are_equivalent,
    fingerprint,
    known_automorphisms,
)
from dcsd.core.errors import (
    AmbiguousEnumerator,
    BudgetExhausted,
    EquivalenceUndecided,
    InconsistentProfile,
    InvalidSpec,
)
from dcsd.core.gf2 import BitVector
from dcsd.core.weights import (
    EngineSettings,
    ProgressCallback,
    WeightProfile,
    count_low_weight,
    meets_min_weight,
    min_weight,
    shadow_profile,
)

logger = logging.getLogger(__name__)

CHECKPOINT_HEADER = "# dcsd-checkpoint v1"


class SearchSpec(BaseModel):
    """What to search for, and which slice of the search this run covers."""

    model_config = ConfigDict(frozen=True)

    kind: CodeKind = Field(..., description="Pure or bordered construction")
    half_size: int = Field(..., ge=1, description="Size n of the circulant block")
    parity_target: Parity = Field(default=Parity.SINGLY_EVEN, description="Parity class to search")
    d_target: int = Field(..., ge=2, description="Minimum weight every kept code must reach")
    shard_index: int = Field(default=0, ge=0, description="This run's shard")
    shard_total: int = Field(default=1, ge=1, description="Number of shards")
    shard_prefix_min: int = Field(
        default=8, ge=1, description="Shortest row prefix hashed when assigning shards"
    )
    budget: Optional[int] = Field(
        default=None, ge=1, description="Necklaces to examine before checkpointing"
    )

    @model_validator(mode="after")
    def _check_consistency(self) -> SearchSpec:
        if self.d_target % 2:
            raise ValueError(f"d_target must be even, got {self.d_target}")
        if self.shard_index >= self.shard_total:
            raise ValueError(f"shard {self.shard_index} is outside 0..{self.shard_total - 1}")
        length = self.length
        if self.kind is CodeKind.BORDERED:
            if self.half_size % 2 == 0:
                raise ValueError("bordered construction needs odd half size (length = 0 mod 4)")
            if self.parity_target is Parity.SINGLY_EVEN and length % 8 == 0:
                raise ValueError(
                    f"no bordered singly even self-dual code has length {length} = 0 mod 8"
                )
        if self.parity_target is Parity.DOUBLY_EVEN and length % 8:
            raise ValueError(f"doubly even self-dual codes need length = 0 mod 8, got {length}")
        return self

    @classmethod
    def parse(cls, **values: Any) -> SearchSpec:
        """Build a spec, reporting any problem as InvalidSpec."""
        try:
            return cls(**values)
        except ValidationError as e:
            problems = "; ".join(err["msg"] for err in e.errors())
            raise InvalidSpec(problems) from None

    @property
    def length(self) -> int:
        n = self.half_size
        return 2 * n if self.kind is CodeKind.PURE else 2 * n + 2

    def allowed_weights(self) -> List[int]:
        """
        First-row weights compatible with the parity target and d_target.

        Pure generator rows weigh 1 + wt(r); bordered rows weigh 2 + wt(r)
        below a border row of weight n + 1.
        """
        n, d = self.half_size, self.d_target
        if self.kind is CodeKind.PURE:
            residue = 1 if self.parity_target is Parity.SINGLY_EVEN else 3
            return [w for w in range(max(1, d - 1), n + 1) if w % 4 == residue]
        if self.parity_target is Parity.DOUBLY_EVEN:
            return [w for w in range(max(0, d - 2), n + 1) if w % 4 == 2]
        return [w for w in range(max(0, d - 2), n + 1) if w % 2 == 0]

    def same_search(self, other: SearchSpec) -> bool:
        """Equal apart from the work budget."""
        return self.model_dump(exclude={"budget"}) == other.model_dump(exclude={"budget"})


def canonical_row(r: BitVector) -> BitVector:
    """Lexicographic minimum over all cyclic shifts of r and of its transpose row."""
    candidates = []
    for base in (r, r.transpose_row()):
        candidates.extend(base.cyclic_shift(j) for j in range(r.length))
    return min(candidates, key=str)


def necklaces(n: int, weight: int) -> Iterator[Tuple[int, ...]]:
    """Binary necklaces of length n and the given weight, as lex-min rotations in lex order."""
    a = [0] * (n + 1)

    def generate(t: int, p: int, ones: int) -> Iterator[Tuple[int, ...]]:
        if ones > weight or ones + (n - t + 1) < weight:
            return
        if t > n:
            if n % p == 0:
                yield tuple(a[1:])
            return
        a[t] = a[t - p]
        yield from generate(t + 1, p, ones + a[t])
        if a[t - p] == 0:
            a[t] = 1
            yield from generate(t + 1, t, ones + 1)

    yield from generate(1, 1, 0)


def shard_of(r: BitVector, total: int, prefix_min: int = 8) -> int:
    prefix = str(r)[: min(r.length, max(prefix_min, r.length // 4))]
    return zlib.crc32(prefix.encode("ascii")) % total


@dataclass(frozen=True)
class Checkpoint:
    """Resume point: every necklace before (weight, index) has been examined."""

    spec: SearchSpec
    weight: int
    index: int

    def save(self, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        body = (
            f"{CHECKPOINT_HEADER}\n"
            f"# spec: {json.dumps(self.spec.model_dump(mode='json'), sort_keys=True)}\n"
            f"cursor {self.weight} {self.index}\n"
        )
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(body)
        tmp.replace(path)

    @classmethod
    def load(cls, path: Union[str, Path]) -> Checkpoint:
        lines = Path(path).read_text().splitlines()
        if not lines or lines[0].strip() != CHECKPOINT_HEADER:
            raise InvalidSpec(f"{path} is not a dcsd checkpoint")
        spec_data: Optional[Dict[str, Any]] = None
        cursor: Optional[Tuple[int, int]] = None
        for line in lines[1:]:
            if line.startswith("# spec:"):
                spec_data = json.loads(line[len("# spec:") :])
            elif line.startswith("cursor "):
                _, weight, index = line.split()
                cursor = (int(weight), int(index))
        if spec_data is None or cursor is None:
            raise InvalidSpec(f"{path}: checkpoint is missing its spec or cursor")
        return cls(SearchSpec.parse(**spec_data), *cursor)


def enumerate_candidates(
    spec: SearchSpec,
    *,
    resume: Optional[Checkpoint] = None,
) -> Iterator[BitVector]:
    """
    Canonical self-orthogonal first rows of this shard, weight class by weight class.

    When spec.budget runs out the stream ends with BudgetExhausted,
    whose checkpoint continues exactly where this run stopped.
    """
    if resume is not None and not resume.spec.same_search(spec):
        raise InvalidSpec("checkpoint was written for a different search")
    n = spec.half_size
    examined = 0
    for weight in spec.allowed_weights():
        if resume is not None and weight < resume.weight:
            continue
        start = resume.index if resume is not None and weight == resume.weight else 0
        for index, bits in enumerate(islice(necklaces(n, weight), start, None), start=start):
            if spec.budget is not None and examined >= spec.budget:
                raise BudgetExhausted(
                    f"examined {examined} necklaces; stopped at weight {weight}, index {index}",
                    Checkpoint(spec, weight, index),
                )
            examined += 1
            r = BitVector.from_bits(bits)
            if spec.shard_total > 1:
                if shard_of(r, spec.shard_total, spec.shard_prefix_min) != spec.shard_index:
                    continue
            if not circulant_self_orthogonality(spec.kind, r):
                continue
            if r != canonical_row(r):
                continue
            yield r
        logger.debug("weight class %d done (%d necklaces examined so far)", weight, examined)


@dataclass(frozen=True)
class ClassificationRecord:
    """
    One equivalence class of double circulant codes.

    `undecided` marks a code whose equivalence to an earlier class could not be
    settled within the node budget; `aut_partial` marks an automorphism group
    order that is only a lower bound.
    """

    canonical_row: BitVector
    kind: CodeKind
    d: Optional[int] = None
    enumerator: Optional[EnumeratorParams] = None
    aut_order: Optional[int] = None
    aut_partial: bool = False
    undecided: bool = False
    fingerprint: Optional[Fingerprint] = field(default=None, compare=False)
    index: Optional[int] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", CodeKind(self.kind))
        object.__setattr__(self, "canonical_row", canonical_row(self.canonical_row))

    @property
    def half_size(self) -> int:
        return self.canonical_row.length

    @property
    def code_length(self) -> int:
        n = self.half_size
        return 2 * n if self.kind is CodeKind.PURE else 2 * n + 2

    def spec(self) -> CirculantSpec:
        return CirculantSpec(self.kind, self.canonical_row)

    def sort_key(self) -> Tuple[int, str, str]:
        return (self.code_length, self.kind.value, str(self.canonical_row))


@dataclass
class CodeAnalysis:
    """Everything classification learns about one code."""

    spec: CirculantSpec
    code: LinearCode
    parity: Parity
    d: int
    profile: WeightProfile
    shadow: Optional[ShadowProfile]
    enumerator: Optional[EnumeratorParams]
    fingerprint: Fingerprint


def analyse(spec: CirculantSpec, settings: Optional[EngineSettings] = None) -> CodeAnalysis:
    """Minimum weight, weight profile, shadow counts and enumerator of one code."""
    settings = settings or EngineSettings()
    code = spec.build()
    hints = code.structural_sets
    parity = parity_class(code)
    d = min_weight(code, settings, hints=hints)
    family = family_for(code.length, parity, d)
    plan = counting_plan(family, d)
    profile = count_low_weight(code, plan.code_radius, settings, hints=hints)
    shadow = None
    if plan.shadow_radius is not None and parity is Parity.SINGLY_EVEN:
        shadow = shadow_profile(code, plan.shadow_radius, settings)
    params = None
    if family is not None:
        try:
            params = fit(family, profile, shadow)
        except (InconsistentProfile, AmbiguousEnumerator) as e:
            logger.warning("%s: enumerator not fitted: %s", spec.first_row, e)
    return CodeAnalysis(
        spec=spec,
        code=code,
        parity=parity,
        d=d,
        profile=profile,
        shadow=shadow,
        enumerator=params,
        fingerprint=fingerprint(code, settings, d=d, profile=profile, shadow=shadow),
    )


@dataclass
class ClassificationResult:
    records: List[ClassificationRecord]
    candidates: int
    screened: int
    checkpoint: Optional[Checkpoint] = None

    @property
    def complete(self) -> bool:
        return self.checkpoint is None


def _fan_out(items: Sequence[Any], work, workers: int, progress: Optional[ProgressCallback]) -> List[Any]:
    results = []
    total = len(items)
    if workers <= 1:
        for done, item in enumerate(items, start=1):
            results.append(work(item))
            if progress:
                progress(done, total)
        return results
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for done, result in enumerate(pool.map(work, items), start=1):
            results.append(result)
            if progress:
                progress(done, total)
    return results


def classify_rows(
    rows: Iterable[BitVector],
    kind: Union[CodeKind, str],
    d_target: int,
    settings: Optional[EngineSettings] = None,
    *,
    parity_target: Optional[Parity] = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
    with_aut: bool = False,
    progress: Optional[ProgressCallback] = None,
) -> Tuple[List[ClassificationRecord], int]:
    """
    Classify the codes built from `rows` up to equivalence.

    Returns one record per class, sorted by canonical row, and the number of
    codes that passed the minimum weight screen.
    """
    settings = settings or EngineSettings()
    kind = CodeKind(kind)
    specs = [CirculantSpec(kind, r) for r in rows]
    inner = replace(settings, workers=1)

    def screen(spec: CirculantSpec) -> bool:
        code = spec.build()
        if parity_target is not None and parity_class(code) is not parity_target:
            return False
        return meets_min_weight(code, d_target, inner, hints=code.structural_sets)

    passed = [s for s, ok in zip(specs, _fan_out(specs, screen, settings.workers, progress)) if ok]
    logger.info("%d of %d candidates reach minimum weight %d", len(passed), len(specs), d_target)

    # rows sharing a canonical row give equivalent codes
    distinct: Dict[str, CirculantSpec] = {}
    for s in passed:
        distinct.setdefault(str(canonical_row(s.first_row)), s)
    unique = [distinct[key] for key in sorted(distinct)]

    analyses = _fan_out(unique, lambda s: analyse(s, inner), settings.workers, None)

    automorphisms: Dict[int, AutomorphismGroup] = {}

    def group_of(position: int) -> AutomorphismGroup:
        if position not in automorphisms:
            automorphisms[position] = known_automorphisms(
                analyses[position].code, inner, node_budget=node_budget
            )
        return automorphisms[position]

    groups: Dict[Fingerprint, List[int]] = {}
    undecided: Set[int] = set()
    for position, analysis in enumerate(analyses):
        members = groups.setdefault(analysis.fingerprint, [])
        known = group_of(position).generators if with_aut and members else ()
        duplicate = False
        for other in members:
            try:
                duplicate = are_equivalent(
                    analyses[other].code,
                    analysis.code,
                    inner,
                    node_budget=node_budget,
                    screened=True,
                    automorphisms=known,
                )
            except EquivalenceUndecided as e:
                logger.warning(
                    "%s vs %s undecided, kept as its own class: %s",
                    analysis.spec.first_row, analyses[other].spec.first_row, e,
                )
                undecided.add(position)
                continue
            if duplicate:
                break
        if not duplicate:
            members.append(position)

    records = []
    for members in groups.values():
        for position in members:
            a = analyses[position]
            group = group_of(position) if with_aut else None
            records.append(
                ClassificationRecord(
                    canonical_row=a.spec.first_row,
                    kind=kind,
                    d=a.d,
                    enumerator=a.enumerator,
                    aut_order=group.order if group else None,
                    aut_partial=group is not None and not group.complete,
                    undecided=position in undecided,
                    fingerprint=a.fingerprint,
                )
            )
    records.sort(key=ClassificationRecord.sort_key)
    return records, len(passed)


def classify(
    spec: SearchSpec,
    settings: Optional[EngineSettings] = None,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    with_aut: bool = False,
    resume: Optional[Checkpoint] = None,
    progress: Optional[ProgressCallback] = None,
) -> ClassificationResult:
    """
    Search, screen and deduplicate. A budget stop still classifies the rows
    found so far and hands back the checkpoint to continue from.
    """
    rows: List[BitVector] = []
    checkpoint = None
    try:
        for r in enumerate_candidates(spec, resume=resume):
            rows.append(r)
    except BudgetExhausted as e:
        checkpoint = e.checkpoint
        logger.info("search budget exhausted: %s", e)
    records, screened = classify_rows(
        rows,
        spec.kind,
        spec.d_target,
        settings,
        parity_target=spec.parity_target,
        node_budget=node_budget,
        with_aut=with_aut,
        progress=progress,
    )
    return ClassificationResult(records, len(rows), screened, checkpoint)
