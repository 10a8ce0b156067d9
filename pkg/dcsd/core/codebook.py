"""
Row codecs, row-list files, classification record stores and reports.

Handles:
- The octal first-row codec (3 bits per digit, leftmost bit first)
- Liberal row-list ingestion: optional index, octal or binary token
- Append-only record files, one classification record per line
- Expectation files for verification runs
- Histogram reports in the layout of the published tables
"""

from __future__ import annotations

import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from tabulate import tabulate

from dcsd.core.codes import CirculantSpec, CodeKind, is_self_dual
from dcsd.core.enumerators import EnumeratorFamily, EnumeratorParams, PARAMETER_NAMES
from dcsd.core.errors import ContractViolation, DataError, InvalidSpec, RowParseError
from dcsd.core.gf2 import BitVector
from dcsd.core.search import ClassificationRecord

logger = logging.getLogger(__name__)

RECORDS_HEADER = "# dcsd-records v1"
LIST_CHECKPOINT_HEADER = "# dcsd-list-checkpoint v1"
MISSING = "-"
UNDECIDED = "?"
LOWER_BOUND = ">="

_TRIPLES = {str(d): ((d >> 2) & 1, (d >> 1) & 1, d & 1) for d in range(8)}


@dataclass(frozen=True)
class OctalRow:
    """Octal text together with the number of bits it carries."""

    text: str
    bit_length: int

    def decode(self) -> BitVector:
        return decode_octal(self.text, self.bit_length)

    @classmethod
    def from_vector(cls, v: BitVector) -> OctalRow:
        return cls(encode_octal(v), v.length)

    def __str__(self) -> str:
        return self.text


def encode_octal(v: BitVector) -> str:
    """Octal digits for v, zero padded at the end to a multiple of 3 bits."""
    bits = list(v) + [0] * (-v.length % 3)
    return "".join(
        str(bits[i] << 2 | bits[i + 1] << 1 | bits[i + 2]) for i in range(0, len(bits), 3)
    )


def decode_octal(text: str, bit_length: int, *, line: Optional[int] = None) -> BitVector:
    """The first `bit_length` bits of the digit triples; the padding must be zero."""
    for position, ch in enumerate(text, start=1):
        if ch not in _TRIPLES:
            raise RowParseError(f"{ch!r} is not an octal digit", line=line, position=position)
    digits = len(text)
    if not 3 * digits - 2 <= bit_length <= 3 * digits:
        raise RowParseError(
            f"{digits} octal digits cannot carry {bit_length} bits", line=line
        )
    bits = [b for ch in text for b in _TRIPLES[ch]]
    if any(bits[bit_length:]):
        raise RowParseError(
            "nonzero padding after the last bit", line=line, position=digits
        )
    return BitVector.from_bits(bits[:bit_length])


def parse_row_token(token: str, half_size: int, *, line: Optional[int] = None) -> BitVector:
    """Binary when the token has exactly half_size 0/1 characters, octal otherwise."""
    token = token.strip().strip("()")
    if len(token) == half_size and set(token) <= {"0", "1"}:
        return BitVector.from_string(token)
    return decode_octal(token, half_size, line=line)


@dataclass(frozen=True)
class RowEntry:
    line: int
    index: int
    spec: CirculantSpec


def read_row_list(
    source: Union[str, Path, Iterable[str]],
    kind: Union[CodeKind, str],
    half_size: int,
) -> List[RowEntry]:
    """
    Parse a row list. Each non-comment line holds an optional index followed
    by one row token; a missing index continues the running count.
    """
    kind = CodeKind(kind)
    lines = Path(source).read_text().splitlines() if isinstance(source, (str, Path)) else source
    entries: List[RowEntry] = []
    for number, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        fields = text.replace("&", " ").split()
        if len(fields) == 1:
            index, token = len(entries) + 1, fields[0]
        elif len(fields) == 2:
            try:
                index = int(fields[0].rstrip(".:").strip("[]"))
            except ValueError:
                raise RowParseError(f"bad row index {fields[0]!r}", line=number) from None
            token = fields[1]
        else:
            raise RowParseError(f"expected '[index] row', got {len(fields)} fields", line=number)
        row = parse_row_token(token, half_size, line=number)
        try:
            spec = CirculantSpec(kind, row)
        except InvalidSpec as e:
            raise DataError(str(e), line=number) from None
        if not is_self_dual(spec.build()):
            raise DataError(f"row {token} does not give a self-dual code", line=number)
        entries.append(RowEntry(number, index, spec))
    logger.info("read %d %s rows of half size %d", len(entries), kind.value, half_size)
    return entries


def ingest_row_list(
    source: Union[str, Path, Iterable[str]],
    kind: Union[CodeKind, str],
    half_size: int,
) -> List[CirculantSpec]:
    """Specs in file order, every one checked to build a self-dual code."""
    return [entry.spec for entry in read_row_list(source, kind, half_size)]


def bundled_path(name: str) -> Path:
    """Path of a data file shipped with the package."""
    return Path(str(resources.files("dcsd").joinpath("data", name)))


def load_published_tables() -> Dict[str, Any]:
    with open(bundled_path("tables.yml")) as f:
        return yaml.safe_load(f) or {}


# Records


def half_size_for(length: int, kind: CodeKind) -> int:
    return length // 2 if kind is CodeKind.PURE else (length - 2) // 2


def format_record(record: ClassificationRecord) -> str:
    """
    `length kind octal d family:params aut [index] [?]`, '-' for unknown fields.

    A partial automorphism group order is written `>=N`; a trailing `?` marks a
    class whose equivalence to another class was left undecided.
    """
    aut = MISSING
    if record.aut_order is not None:
        aut = f"{LOWER_BOUND if record.aut_partial else ''}{record.aut_order}"
    fields = [
        str(record.code_length),
        record.kind.value,
        encode_octal(record.canonical_row),
        MISSING if record.d is None else str(record.d),
        MISSING if record.enumerator is None else record.enumerator.to_token(),
        aut,
    ]
    if record.index is not None:
        fields.append(str(record.index))
    if record.undecided:
        fields.append(UNDECIDED)
    return " ".join(fields)


def parse_record(text: str, *, line: Optional[int] = None) -> ClassificationRecord:
    fields = text.split()
    undecided = bool(fields) and fields[-1] == UNDECIDED
    if undecided:
        fields.pop()
    if len(fields) not in (6, 7):
        raise RowParseError(f"record needs 6 or 7 fields, got {len(fields)}", line=line)
    aut_token = fields[5]
    aut_partial = aut_token.startswith(LOWER_BOUND)
    try:
        length = int(fields[0])
        kind = CodeKind(fields[1])
        d = None if fields[3] == MISSING else int(fields[3])
        enumerator = None if fields[4] == MISSING else EnumeratorParams.from_token(fields[4])
        aut = None if aut_token == MISSING else int(aut_token.removeprefix(LOWER_BOUND))
        index = int(fields[6]) if len(fields) == 7 else None
    except (ValueError, ContractViolation) as e:
        raise RowParseError(f"bad record field: {e}", line=line) from None
    row = decode_octal(fields[2], half_size_for(length, kind), line=line)
    return ClassificationRecord(
        canonical_row=row,
        kind=kind,
        d=d,
        enumerator=enumerator,
        aut_order=aut,
        aut_partial=aut_partial,
        undecided=undecided,
        index=index,
    )


class RecordStore:
    """
    Append-only file of classification records, unique by canonical row.

    The file starts with a format header and an optional spec echo; each
    further line is one record. Appending a record already present is a no-op.
    """

    def __init__(self, path: Union[str, Path], *, spec_echo: Optional[str] = None):
        self.path = Path(path)
        self.spec_echo = spec_echo
        self._records: List[ClassificationRecord] = []
        self._keys: set = set()
        if self.path.exists():
            self._read()
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            header = RECORDS_HEADER + "\n"
            if spec_echo:
                header += f"# spec: {spec_echo}\n"
            self.path.write_text(header)

    @classmethod
    def load(cls, path: Union[str, Path]) -> RecordStore:
        if not Path(path).exists():
            raise DataError(f"record file {path} does not exist")
        return cls(path)

    @staticmethod
    def _key(record: ClassificationRecord) -> Tuple[int, str, int]:
        return (record.code_length, record.kind.value, record.canonical_row.value)

    def _read(self) -> None:
        lines = self.path.read_text().splitlines()
        if not lines or lines[0].strip() != RECORDS_HEADER:
            raise DataError(f"{self.path} is not a dcsd record file", line=1)
        for number, line in enumerate(lines[1:], start=2):
            text = line.strip()
            if text.startswith("# spec:") and self.spec_echo is None:
                self.spec_echo = text[len("# spec:") :].strip()
                continue
            if not text or text.startswith("#"):
                continue
            record = parse_record(text, line=number)
            key = self._key(record)
            if key not in self._keys:
                self._keys.add(key)
                self._records.append(record)

    @property
    def records(self) -> List[ClassificationRecord]:
        return list(self._records)

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, record: ClassificationRecord) -> bool:
        return self._key(record) in self._keys

    def append(self, record: ClassificationRecord) -> bool:
        """Write the record unless its canonical row is already stored."""
        key = self._key(record)
        if key in self._keys:
            return False
        with open(self.path, "a") as f:
            f.write(format_record(record) + "\n")
        self._keys.add(key)
        self._records.append(record)
        return True

    def extend(self, records: Iterable[ClassificationRecord]) -> int:
        return sum(1 for r in records if self.append(r))

    def merge(self, others: Iterable[Union[str, Path, RecordStore]]) -> int:
        """Fold shard outputs into this store; returns the number of new records."""
        added = 0
        for other in others:
            store = other if isinstance(other, RecordStore) else RecordStore.load(other)
            added += self.extend(store.records)
        return added


# Expectations


@dataclass(frozen=True)
class Expectation:
    d: Optional[int] = None
    parity: Optional[str] = None
    enumerator: Optional[EnumeratorParams] = None
    aut_order: Optional[int] = None


def _expected_params(data: Optional[Dict[str, Any]]) -> Optional[EnumeratorParams]:
    if not data:
        return None
    data = dict(data)
    try:
        family = EnumeratorFamily(data.pop("family"))
        values = tuple(int(data[name]) for name in PARAMETER_NAMES[family])
    except (KeyError, ValueError) as e:
        raise DataError(f"bad enumerator expectation {data!r}: {e}") from None
    return EnumeratorParams(family, values)


def load_expectations(path: Union[str, Path]) -> Dict[int, Expectation]:
    """Per-index expected properties; `defaults` apply to every listed code."""
    with open(path) as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise DataError(f"{path}: {e}") from None
    defaults = data.get("defaults") or {}
    expectations = {}
    for index, entry in (data.get("codes") or {}).items():
        merged = {**defaults, **(entry or {})}
        expectations[int(index)] = Expectation(
            d=merged.get("d"),
            parity=merged.get("parity"),
            enumerator=_expected_params(merged.get("enumerator")),
            aut_order=merged.get("aut_order"),
        )
    return expectations


def expectation_diff(
    index: int,
    observed: Dict[str, Any],
    expected: Expectation,
) -> List[Dict[str, Any]]:
    """Mismatched fields as machine-readable entries; observed values of None are skipped."""
    diff = []
    wanted = {
        "d": expected.d,
        "parity": expected.parity,
        "enumerator": expected.enumerator.to_token() if expected.enumerator else None,
        "aut_order": expected.aut_order,
    }
    for name, want in wanted.items():
        got = observed.get(name)
        if want is None or got is None:
            continue
        if got != want:
            diff.append({"index": index, "field": name, "expected": want, "observed": got})
    return diff


# Reports


def _family_of(records: Sequence[ClassificationRecord]) -> Optional[EnumeratorFamily]:
    families = set()
    for r in records:
        if r.enumerator is None:
            raise ContractViolation(f"record {encode_octal(r.canonical_row)} has no fitted enumerator")
        families.add(r.enumerator.family)
    if len(families) > 1:
        raise ContractViolation(f"records mix enumerator families: {sorted(f.value for f in families)}")
    return families.pop() if families else None


def histogram(records: Sequence[ClassificationRecord]) -> Dict[Any, Any]:
    """Parameter histogram in the published layout for the records' family."""
    family = _family_of(records)
    if family is None:
        return {}
    if family is EnumeratorFamily.LEN90:
        counts = Counter((r.enumerator["a"], r.enumerator["b"]) for r in records)
        return dict(sorted(counts.items()))
    if family is EnumeratorFamily.LEN92:
        groups: Dict[int, List[int]] = defaultdict(list)
        for r in records:
            groups[r.enumerator["beta"]].append(r.index if r.index is not None else 0)
        return {beta: sorted(members) for beta, members in sorted(groups.items())}
    if family is EnumeratorFamily.LEN96_DOUBLY_EVEN:
        counts = Counter(r.enumerator["a"] for r in records)
        return dict(sorted(counts.items()))
    rows = sorted(records, key=lambda r: (r.enumerator.values, r.index or 0))
    return {r.index if r.index is not None else i: r.enumerator.values for i, r in enumerate(rows, 1)}


def _table_text(records: Sequence[ClassificationRecord], found: EnumeratorFamily) -> str:
    table = histogram(records)
    if found is EnumeratorFamily.LEN90:
        rows = [[f"({a}, {b})", n] for (a, b), n in table.items()]
        return tabulate(rows, headers=["(a, b)", "N"], tablefmt="simple")
    if found is EnumeratorFamily.LEN92:
        rows = [[beta, ", ".join(str(i) for i in members)] for beta, members in table.items()]
        return tabulate(rows, headers=["beta", "i"], tablefmt="simple")
    if found is EnumeratorFamily.LEN96_DOUBLY_EVEN:
        if all(r.kind is CodeKind.PURE for r in records):
            return tabulate([[a] for a in table], headers=["a"], tablefmt="simple")
        return tabulate([[a, n] for a, n in table.items()], headers=["a", "N"], tablefmt="simple")
    rows = [[i, *values] for i, values in table.items()]
    return tabulate(rows, headers=["i", "a", "b", "c", "d"], tablefmt="simple")


def emit_report(
    records: Sequence[ClassificationRecord],
    family: Optional[Union[EnumeratorFamily, str]] = None,
) -> str:
    """
    Plain-text table; identical for any ordering of the same records.

    Records whose equivalence was left undecided are counted in the table and
    listed below it, since some of them may duplicate another class.
    """
    if not records:
        return ""
    found = _family_of(records)
    if family is not None and EnumeratorFamily(family) is not found:
        raise ContractViolation(f"records are {found.value}, not {EnumeratorFamily(family).value}")
    text = _table_text(records, found)
    undecided = sorted(encode_octal(r.canonical_row) for r in records if r.undecided)
    if undecided:
        text += f"\n\nundecided ({len(undecided)}): {' '.join(undecided)}"
    return text


def published_histogram(family: Union[EnumeratorFamily, str], kind: CodeKind = CodeKind.PURE) -> Dict[Any, Any]:
    """The bundled published table for a family, keyed like `histogram`."""
    family = EnumeratorFamily(family)
    tables = load_published_tables()
    if family is EnumeratorFamily.LEN90:
        return {(a, b): n for a, b, n in sorted(tables["len90_histogram"])}
    if family is EnumeratorFamily.LEN92:
        return {int(beta): sorted(members) for beta, members in sorted(tables["len92_beta_groups"].items())}
    if family is EnumeratorFamily.LEN96_DOUBLY_EVEN:
        if kind is CodeKind.PURE:
            return {a: 1 for a in sorted(tables["len96_pure_doubly_even_a"])}
        return {a: n for a, n in sorted(tables["len96_bordered_doubly_even_histogram"])}
    raise ContractViolation(f"no published histogram bundled for {family.value}")


def compare_histograms(observed: Dict[Any, Any], expected: Dict[Any, Any]) -> List[Tuple[Any, Any, Any]]:
    """(key, expected, observed) for every key where the two disagree."""
    keys = sorted(set(observed) | set(expected))
    return [(k, expected.get(k), observed.get(k)) for k in keys if observed.get(k) != expected.get(k)]


class ListCheckpoint(BaseModel):
    """Resume point for a job over a row list: every position before `position` is done."""

    model_config = ConfigDict(frozen=True)

    job: str = Field(..., description="Command that wrote the checkpoint")
    source: str = Field(..., description="Row list the job reads")
    kind: CodeKind
    half_size: int = Field(..., ge=1)
    shard_index: int = Field(default=0, ge=0)
    shard_total: int = Field(default=1, ge=1)
    position: int = Field(default=0, ge=0)

    def same_job(self, other: ListCheckpoint) -> bool:
        return self.model_dump(exclude={"position"}) == other.model_dump(exclude={"position"})

    def save(self, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "w") as f:
            f.write(LIST_CHECKPOINT_HEADER + "\n")
            json.dump(self.model_dump(mode="json"), f, sort_keys=True)
            f.write("\n")
        tmp.replace(path)

    @classmethod
    def load(cls, path: Union[str, Path]) -> ListCheckpoint:
        lines = Path(path).read_text().splitlines()
        if len(lines) < 2 or lines[0].strip() != LIST_CHECKPOINT_HEADER:
            raise DataError(f"{path} is not a dcsd list checkpoint", line=1)
        try:
            return cls.model_validate(json.loads(lines[1]))
        except (ValueError, ValidationError) as e:
            raise DataError(f"{path}: {e}", line=2) from None


def shard_positions(
    total: int, checkpoint: ListCheckpoint, budget: Optional[int] = None
) -> Tuple[List[int], Optional[int]]:
    """
    Positions this run processes, and where the next run starts
    (None once the shard is exhausted).
    """
    todo = [
        p for p in range(checkpoint.position, total)
        if p % checkpoint.shard_total == checkpoint.shard_index
    ]
    if budget is None or len(todo) <= budget:
        return todo, None
    return todo[:budget], todo[budget]
