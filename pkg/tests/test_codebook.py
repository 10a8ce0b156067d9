"""Tests for the row codec, row lists, record files, expectations and reports."""

import random
from dataclasses import replace

import pytest

from dcsd.core.codebook import (
    ListCheckpoint,
    OctalRow,
    RECORDS_HEADER,
    RecordStore,
    bundled_path,
    compare_histograms,
    decode_octal,
    emit_report,
    encode_octal,
    expectation_diff,
    format_record,
    histogram,
    ingest_row_list,
    load_expectations,
    parse_record,
    parse_row_token,
    published_histogram,
    read_row_list,
    shard_positions,
)
from dcsd.core.codes import CodeKind, Parity, is_self_dual, parity_class
from dcsd.core.enumerators import EnumeratorFamily, EnumeratorParams
from dcsd.core.errors import ContractViolation, DataError, RowParseError
from dcsd.core.gf2 import BitVector
from dcsd.core.search import ClassificationRecord


def _len90_record(seed, a, b, index=None):
    rng = random.Random(seed)
    row = BitVector(45, rng.getrandbits(45))
    params = EnumeratorParams(EnumeratorFamily.LEN90, (a, b, 0, 0, 0))
    return ClassificationRecord(canonical_row=row, kind=CodeKind.PURE, d=14, enumerator=params, index=index)


def test_decode_pads_at_the_end():
    assert str(decode_octal("17", 6)) == "001111"
    assert decode_octal("5532465545470000", 48).weight == 21
    assert decode_octal("045722771307000", 45).weight == 20


def test_decode_errors_carry_positions():
    with pytest.raises(RowParseError) as excinfo:
        decode_octal("888", 9, line=1)
    assert excinfo.value.line == 1
    assert excinfo.value.position == 1

    with pytest.raises(RowParseError):
        decode_octal("7", 1)
    with pytest.raises(RowParseError):
        decode_octal("17", 3)


def test_octal_round_trip_for_published_lengths():
    rng = random.Random(45)
    for length in (45, 47, 48):
        for _ in range(200):
            v = BitVector(length, rng.getrandbits(length))
            assert decode_octal(encode_octal(v), length) == v
            assert OctalRow.from_vector(v).decode() == v


def test_row_tokens_may_be_binary():
    assert str(parse_row_token("1110", 4)) == "1110"
    assert str(parse_row_token("(1110)", 4)) == "1110"
    assert parse_row_token("04", 4) == BitVector.from_string("0001")


def test_bundled_lists_build_self_dual_codes():
    b92 = ingest_row_list(bundled_path("b92_extremal.txt"), CodeKind.BORDERED, 45)
    assert len(b92) == 158
    assert all(spec.length == 92 for spec in b92)

    c96 = read_row_list(bundled_path("c96_singly_even.txt"), CodeKind.PURE, 48)
    assert len(c96) == 49
    assert [e.index for e in c96] == list(range(1, 50))
    for entry in c96:
        assert entry.spec.first_row.weight % 4 == 1
        code = entry.spec.build()
        assert is_self_dual(code)
        assert parity_class(code) is Parity.SINGLY_EVEN


def test_row_list_layout(tmp_path):
    path = tmp_path / "rows.txt"
    path.write_text("# comment\n\n7 1110\n 0111 & \n[9] 1011  # trailing\n")
    entries = read_row_list(path, "pure", 4)
    assert [(e.line, e.index) for e in entries] == [(3, 7), (4, 2), (5, 9)]


def test_row_list_errors_name_the_line(tmp_path):
    bad_digit = tmp_path / "bad.txt"
    bad_digit.write_text("888\n")
    with pytest.raises(RowParseError) as excinfo:
        read_row_list(bad_digit, CodeKind.BORDERED, 9)
    assert excinfo.value.line == 1

    not_self_dual = tmp_path / "even.txt"
    not_self_dual.write_text("1110\n1100\n")
    with pytest.raises(DataError) as excinfo:
        read_row_list(not_self_dual, CodeKind.PURE, 4)
    assert excinfo.value.line == 2

    even_bordered = tmp_path / "bordered.txt"
    even_bordered.write_text("1100\n")
    with pytest.raises(DataError):
        read_row_list(even_bordered, CodeKind.BORDERED, 4)


def test_record_format_round_trip():
    record = _len90_record(1, -12555, 0, index=4)
    text = format_record(record)
    fields = text.split()
    assert fields[0] == "90" and fields[1] == "pure"
    assert fields[4] == "len90:-12555,0,0,0,0"
    assert fields[5] == "-"
    parsed = parse_record(text)
    assert parsed == record
    assert parsed.index == 4


def test_partial_orders_and_undecided_classes_survive_the_record_file(tmp_path):
    record = replace(_len90_record(2, -12555, 90), aut_order=45, aut_partial=True, undecided=True)
    text = format_record(record)
    assert text.split()[5] == ">=45"
    assert text.endswith(" ?")
    assert parse_record(text) == record

    indexed = replace(record, index=7)
    assert parse_record(format_record(indexed)).index == 7

    path = tmp_path / "records.txt"
    RecordStore(path).append(indexed)
    [loaded] = RecordStore.load(path).records
    assert (loaded.aut_order, loaded.aut_partial, loaded.undecided) == (45, True, True)


def test_record_store_appends_once(tmp_path):
    path = tmp_path / "records.txt"
    store = RecordStore(path, spec_echo='{"half_size": 45}')
    records = [_len90_record(i, -12555, 0) for i in range(3)]
    assert store.extend(records) == 3
    before = path.read_text()
    assert store.extend(records) == 0
    assert path.read_text() == before
    assert before.splitlines()[0] == RECORDS_HEADER

    reloaded = RecordStore.load(path)
    assert reloaded.records == store.records
    assert reloaded.spec_echo == '{"half_size": 45}'
    assert records[0] in reloaded


def test_record_store_merge(tmp_path):
    first = RecordStore(tmp_path / "a.txt")
    second = RecordStore(tmp_path / "b.txt")
    first.extend([_len90_record(1, -12555, 0), _len90_record(2, -12555, 90)])
    second.extend([_len90_record(2, -12555, 90), _len90_record(3, -12555, 0)])
    merged = RecordStore(tmp_path / "all.txt")
    assert merged.merge([first.path, second]) == 3
    assert len(merged) == 3


def test_loading_a_foreign_file_fails(tmp_path):
    path = tmp_path / "other.txt"
    path.write_text("hello\n")
    with pytest.raises(DataError):
        RecordStore.load(path)
    with pytest.raises(DataError):
        RecordStore.load(tmp_path / "missing.txt")


def test_bundled_expectations():
    c96 = load_expectations(bundled_path("c96_singly_even.yml"))
    assert len(c96) == 49
    assert c96[1].d == 16
    assert c96[1].aut_order == 96
    assert c96[1].enumerator.to_token() == "len96_singly_even:9798,0,0,0"

    b92 = load_expectations(bundled_path("b92_extremal.yml"))
    assert len(b92) == 158
    assert b92[1].enumerator.to_token() == "len92:3,0,1842"


def test_expectation_diff_lists_mismatched_fields():
    c96 = load_expectations(bundled_path("c96_singly_even.yml"))
    observed = {"d": 16, "parity": "singly_even", "enumerator": "len96_singly_even:9798,0,0,0", "aut_order": None}
    assert expectation_diff(1, observed, c96[1]) == []
    observed["d"] = 14
    assert expectation_diff(1, observed, c96[1]) == [
        {"index": 1, "field": "d", "expected": 16, "observed": 14}
    ]


def test_report_is_independent_of_record_order():
    records = [_len90_record(i, -12555, 90 * (i % 3)) for i in range(12)]
    text = emit_report(records)
    shuffled = list(records)
    random.Random(0).shuffle(shuffled)
    assert emit_report(shuffled) == text
    assert "(a, b)" in text
    assert "(-12555, 0)" in text
    assert histogram(records) == {(-12555, 0): 4, (-12555, 90): 4, (-12555, 180): 4}


def test_report_lists_undecided_classes():
    records = [_len90_record(i, -12555, 0) for i in range(3)]
    marked = replace(records[1], undecided=True)
    text = emit_report([records[0], marked, records[2]])
    assert text.startswith(emit_report(records))
    assert text.endswith(f"undecided (1): {encode_octal(marked.canonical_row)}")


def test_len92_report_groups_indices_by_beta():
    rows = [BitVector(45, v) for v in (0b111, 0b1011, 0b10011)]
    records = [
        ClassificationRecord(
            canonical_row=r,
            kind=CodeKind.BORDERED,
            enumerator=EnumeratorParams(EnumeratorFamily.LEN92, (3, 0, beta)),
            index=i,
        )
        for i, (r, beta) in enumerate(zip(rows, (1842, 1527, 1842)), start=1)
    ]
    assert histogram(records) == {1527: [2], 1842: [1, 3]}


def test_empty_and_mixed_reports():
    assert emit_report([]) == ""
    mixed = [
        _len90_record(1, -12555, 0),
        ClassificationRecord(
            canonical_row=BitVector(48, 1),
            kind=CodeKind.PURE,
            enumerator=EnumeratorParams(EnumeratorFamily.LEN96_DOUBLY_EVEN, (9588,)),
        ),
    ]
    with pytest.raises(ContractViolation):
        emit_report(mixed)
    with pytest.raises(ContractViolation):
        emit_report(mixed[:1], EnumeratorFamily.LEN92)


def test_published_tables():
    len90 = published_histogram(EnumeratorFamily.LEN90)
    assert sum(len90.values()) == 716
    assert len90[(-12555, 0)] == 1

    bordered = published_histogram(EnumeratorFamily.LEN96_DOUBLY_EVEN, CodeKind.BORDERED)
    assert sum(bordered.values()) == 1532
    assert bordered[6204] == 1 and bordered[9588] == 197

    pure = published_histogram(EnumeratorFamily.LEN96_DOUBLY_EVEN, CodeKind.PURE)
    assert len(pure) == 614

    len92 = published_histogram(EnumeratorFamily.LEN92)
    assert sorted(i for members in len92.values() for i in members) == list(range(1, 159))
    assert 1 in len92[1842]


def test_compare_histograms():
    assert compare_histograms({1: 2}, {1: 2}) == []
    assert compare_histograms({1: 2, 3: 1}, {1: 1}) == [(1, 1, 2), (3, None, 1)]


def test_list_checkpoint_round_trip(tmp_path):
    state = ListCheckpoint(job="verify", source="rows.txt", kind=CodeKind.PURE, half_size=48, position=5)
    path = tmp_path / "verify.ckpt"
    state.save(path)
    loaded = ListCheckpoint.load(path)
    assert loaded == state
    assert loaded.same_job(state.model_copy(update={"position": 0}))
    assert not loaded.same_job(state.model_copy(update={"job": "neighbors"}))


def test_corrupt_list_checkpoint(tmp_path):
    path = tmp_path / "bad.ckpt"
    path.write_text("# dcsd-list-checkpoint v1\n{not json}\n")
    with pytest.raises(DataError):
        ListCheckpoint.load(path)


def test_shard_positions():
    state = ListCheckpoint(job="verify", source="x", kind="pure", half_size=4, shard_index=1, shard_total=3)
    assert shard_positions(10, state) == ([1, 4, 7], None)
    assert shard_positions(10, state, budget=2) == ([1, 4], 7)
    resumed = state.model_copy(update={"position": 7})
    assert shard_positions(10, resumed) == ([7], None)
