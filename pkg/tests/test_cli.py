"""End-to-end tests of the dcsd command line."""

import json

import pytest

from dcsd.core.codebook import RecordStore
from dcsd.core.codes import CodeKind
from dcsd.core.enumerators import EnumeratorFamily, EnumeratorParams
from dcsd.core.gf2 import BitVector
from dcsd.core.search import ClassificationRecord
from dcsd.main import app


def _lines(result):
    return [line.strip() for line in result.output.splitlines()]


def test_version(runner):
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert "dcsd v0.1.0" in result.output


def test_decode_row_with_code_check(runner):
    result = runner.invoke(
        app, ["decode-row", "--octal", "045722771307000", "--bits", "45", "--kind", "bordered"]
    )
    assert result.exit_code == 0
    lines = _lines(result)
    assert "weight: 20" in lines
    assert "length: 45" in lines
    assert "code: [92,46] bordered" in lines
    assert "self-dual: yes (singly_even)" in lines


def test_encode_binary_row(runner):
    result = runner.invoke(app, ["decode-row", "--binary", "1110", "--kind", "pure"])
    assert result.exit_code == 0
    assert "octal: 70" in _lines(result)
    assert "self-dual: yes (doubly_even)" in _lines(result)


def test_decode_row_usage_and_data_errors(runner):
    assert runner.invoke(app, ["decode-row"]).exit_code == 2
    assert runner.invoke(app, ["decode-row", "--octal", "888"]).exit_code == 1


def test_fit_from_counts(runner):
    result = runner.invoke(app, ["fit", "--family", "len92", "--counts", "16:12060,18:106560"])
    assert result.exit_code == 0
    assert "params: len92:3,0,1842" in _lines(result)
    assert "admissible: yes" in _lines(result)


def test_fit_reports_ambiguous_forms(runner):
    result = runner.invoke(app, ["fit", "--family", "len92", "--counts", "16:4692,18:175056"])
    assert result.exit_code == 1
    assert "candidate: len92:1,1,0" in _lines(result)
    assert "candidate: len92:2,1,0" in _lines(result)


def test_fit_prediction_and_mode_errors(runner):
    result = runner.invoke(app, ["fit", "--params", "len90:-12555,0,0,0,0"])
    assert result.exit_code == 0
    assert "admissible: yes" in _lines(result)

    both = runner.invoke(app, ["fit", "--params", "len92:3,0,0", "--counts", "16:1"])
    assert both.exit_code == 2
    assert runner.invoke(app, ["fit", "--counts", "16:1"]).exit_code == 2


def test_search_writes_octal_rows(runner):
    result = runner.invoke(app, ["search", "--kind", "pure", "--half", "4", "--dmin", "2"])
    assert result.exit_code == 0
    assert "04" in _lines(result)


def test_search_rejects_inconsistent_specs(runner):
    result = runner.invoke(app, ["search", "--kind", "bordered", "--half", "4", "--dmin", "2"])
    assert result.exit_code == 2
    assert runner.invoke(app, ["search", "--kind", "pure", "--half", "4", "--dmin", "3"]).exit_code == 2
    assert runner.invoke(app, ["search", "--kind", "pure", "--half", "4", "--dmin", "2", "--shard", "2/2"]).exit_code == 2


def test_search_budget_and_resume(runner, tmp_path):
    full = tmp_path / "full.txt"
    base = ["search", "--kind", "pure", "--half", "12", "--dmin", "2"]
    assert runner.invoke(app, base + ["--out", str(full)]).exit_code == 0

    parts = tmp_path / "parts.txt"
    ckpt = tmp_path / "search.ckpt"
    args = base + ["--budget", "5", "--out", str(parts), "--checkpoint", str(ckpt)]
    result = runner.invoke(app, args)
    for _ in range(100):
        assert result.exit_code == 0
        if "Search complete" in result.output:
            break
        result = runner.invoke(app, args + ["--resume", str(ckpt)])
    assert parts.read_text() == full.read_text()


def test_unbudgeted_search_checkpoints_periodically(runner, tmp_path):
    base = ["search", "--kind", "pure", "--half", "12", "--dmin", "2"]
    full = tmp_path / "full.txt"
    assert runner.invoke(app, base + ["--out", str(full)]).exit_code == 0

    assert runner.invoke(app, ["config", "set", "search.checkpoint_every", "5"]).exit_code == 0
    chunked = tmp_path / "chunked.txt"
    ckpt = tmp_path / "search.ckpt"
    result = runner.invoke(app, base + ["--out", str(chunked), "--checkpoint", str(ckpt)])
    assert result.exit_code == 0
    assert "Search complete" in result.output
    assert chunked.read_text() == full.read_text()
    assert not ckpt.exists()


def test_resume_from_another_search_is_a_usage_error(runner, tmp_path):
    ckpt = tmp_path / "search.ckpt"
    runner.invoke(
        app,
        ["search", "--kind", "pure", "--half", "12", "--dmin", "2", "--budget", "1", "--checkpoint", str(ckpt)],
    )
    assert ckpt.exists()
    result = runner.invoke(
        app, ["search", "--kind", "pure", "--half", "10", "--dmin", "2", "--resume", str(ckpt)]
    )
    assert result.exit_code == 2


def test_classify_appends_records_once(runner, tmp_path):
    out = tmp_path / "records.txt"
    args = ["classify", "--kind", "pure", "--half", "6", "--dmin", "4", "--out", str(out)]
    assert runner.invoke(app, args).exit_code == 0
    first = out.read_text()
    records = RecordStore.load(out).records
    assert len(records) == 1
    assert records[0].d == 4
    assert runner.invoke(app, args).exit_code == 0
    assert out.read_text() == first


def test_classify_row_list_keeps_first_index(runner, tmp_path):
    rows = tmp_path / "rows.txt"
    rows.write_text("3 111110\n5 011111\n")
    out = tmp_path / "records.txt"
    result = runner.invoke(
        app,
        ["classify", "--kind", "pure", "--half", "6", "--dmin", "4", "--rows", str(rows), "--out", str(out)],
    )
    assert result.exit_code == 0
    records = RecordStore.load(out).records
    assert [r.index for r in records] == [3]


def _classify_rows(runner, rows, out, *extra):
    args = ["classify", "--kind", "pure", "--half", "6", "--dmin", "2", "--rows", str(rows)]
    return runner.invoke(app, [*args, "--out", str(out), *extra])


def test_classify_row_list_shards_cover_the_single_run(runner, tmp_path):
    rows = tmp_path / "rows.txt"
    rows.write_text("1 100000\n2 111110\n3 011111\n")
    whole = tmp_path / "whole.txt"
    assert _classify_rows(runner, rows, whole).exit_code == 0
    expected = {str(r.canonical_row) for r in RecordStore.load(whole).records}
    assert expected == {"000001", "011111"}

    shared = tmp_path / "shards.txt"
    for shard in ("0/2", "1/2"):
        result = _classify_rows(runner, rows, shared, "--shard", shard)
        assert result.exit_code == 0
    union = RecordStore.load(shared).records
    assert {str(r.canonical_row) for r in union} == expected
    assert len(union) == len(expected)


def test_classify_row_list_budget_and_resume(runner, tmp_path):
    rows = tmp_path / "rows.txt"
    rows.write_text("1 100000\n2 111110\n3 011111\n")
    out = tmp_path / "records.txt"
    ckpt = tmp_path / "classify.ckpt"
    result = _classify_rows(runner, rows, out, "--budget", "1", "--checkpoint", str(ckpt))
    assert result.exit_code == 0
    assert "Budget reached" in result.output
    assert [r.index for r in RecordStore.load(out).records] == [1]
    for _ in range(5):
        result = _classify_rows(
            runner, rows, out, "--budget", "1", "--checkpoint", str(ckpt), "--resume", str(ckpt)
        )
        assert result.exit_code == 0
        if "Budget reached" not in result.output:
            break
    records = RecordStore.load(out).records
    assert {str(r.canonical_row) for r in records} == {"000001", "011111"}
    assert sorted(r.index for r in records) == [1, 2]

    other = tmp_path / "other.txt"
    other.write_text(rows.read_text())
    result = _classify_rows(runner, other, out, "--resume", str(ckpt))
    assert result.exit_code == 2


def test_classify_with_a_tight_node_budget_finishes(runner, tmp_path):
    out = tmp_path / "records.txt"
    result = runner.invoke(
        app,
        ["classify", "--kind", "pure", "--half", "10", "--dmin", "2", "--node-budget", "50", "--out", str(out)],
    )
    assert result.exit_code == 0
    assert len(RecordStore.load(out).records) >= 1


def test_verify_row_list(runner, tmp_path):
    rows = tmp_path / "rows.txt"
    rows.write_text("3 111110\n5 011111\n")
    base = ["verify", "--file", str(rows), "--kind", "pure", "--half", "6"]

    ok = runner.invoke(app, base + ["--dmin", "4"])
    assert ok.exit_code == 0
    assert "All 2 codes verified" in ok.output

    bad = runner.invoke(app, base + ["--dmin", "6"])
    assert bad.exit_code == 1
    diff = json.loads(next(line for line in _lines(bad) if line.startswith("{")))
    assert diff == {"index": 3, "field": "d", "expected": 6, "observed": 4}


def test_verify_against_an_expectation_file(runner, tmp_path):
    rows = tmp_path / "rows.txt"
    rows.write_text("3 111110\n")
    expect = tmp_path / "expect.yml"
    expect.write_text("defaults:\n  d: 4\ncodes:\n  3:\n    aut_order: 100\n")
    result = runner.invoke(
        app,
        ["verify", "--file", str(rows), "--kind", "pure", "--half", "6", "--expect", str(expect), "--aut"],
    )
    assert result.exit_code == 1
    diff = json.loads(next(line for line in _lines(result) if line.startswith("{")))
    assert diff["field"] == "aut_order"
    assert diff["expected"] == 100


def test_verify_budget_and_resume(runner, tmp_path):
    rows = tmp_path / "rows.txt"
    rows.write_text("1 111110\n2 011111\n3 101111\n")
    ckpt = tmp_path / "verify.ckpt"
    base = ["verify", "--file", str(rows), "--kind", "pure", "--half", "6", "--dmin", "4", "--checkpoint", str(ckpt)]

    first = runner.invoke(app, base + ["--budget", "1"])
    assert first.exit_code == 0
    assert ckpt.exists()

    rest = runner.invoke(app, base + ["--resume", str(ckpt)])
    assert rest.exit_code == 0
    assert "All 2 codes verified" in rest.output


def test_verify_needs_exactly_one_source(runner):
    assert runner.invoke(app, ["verify"]).exit_code == 2
    assert runner.invoke(app, ["verify", "--dataset", "x96"]).exit_code == 2


def test_neighbors_json(runner):
    result = runner.invoke(app, ["neighbors", "--row", "1000", "--json"])
    assert result.exit_code == 0
    report = json.loads(next(line for line in _lines(result) if line.startswith("{")))
    assert report["rank_m"] == 4
    assert report["rank_m_aug"] == 4
    assert report["neighbor_bound"] == 2
    assert report["best_neighbor_min_weight"] == 4


def test_aut_order(runner):
    result = runner.invoke(app, ["aut", "--row", "10"])
    assert result.exit_code == 0
    assert "aut_order: 8" in _lines(result)


def _write_len90_records(path):
    store = RecordStore(path)
    for seed, b in ((1, 0), (2, 0), (3, 90)):
        params = EnumeratorParams(EnumeratorFamily.LEN90, (-12555, b, 0, 0, 0))
        row = BitVector(45, (seed * 0x1F3D5B79) % (1 << 45))
        store.append(ClassificationRecord(canonical_row=row, kind=CodeKind.PURE, d=14, enumerator=params))
    return path


def test_report_prints_the_histogram(runner, tmp_path):
    records = _write_len90_records(tmp_path / "records.txt")
    result = runner.invoke(app, ["report", str(records)])
    assert result.exit_code == 0
    assert "(-12555, 0)" in result.output
    assert "(-12555, 90)" in result.output


def test_report_compare_flags_differences(runner, tmp_path):
    records = _write_len90_records(tmp_path / "records.txt")
    result = runner.invoke(app, ["report", str(records), "--compare"])
    assert result.exit_code == 1
    assert any(line.startswith("differs at") for line in _lines(result))


def test_report_family_mismatch(runner, tmp_path):
    records = _write_len90_records(tmp_path / "records.txt")
    assert runner.invoke(app, ["report", str(records), "--family", "len92"]).exit_code == 1
    assert runner.invoke(app, ["report", str(records), "--family", "len91"]).exit_code == 2


def test_config_commands(runner):
    assert runner.invoke(app, ["config", "set", "engine.workers", "4"]).exit_code == 0
    shown = runner.invoke(app, ["config", "show", "--section", "engine"])
    assert shown.exit_code == 0
    assert "workers: 4" in _lines(shown)

    assert runner.invoke(app, ["config", "set", "engine.bogus", "1"]).exit_code == 1
    assert runner.invoke(app, ["config", "unset", "engine.workers"]).exit_code == 0
    assert runner.invoke(app, ["config", "reset", "--yes"]).exit_code == 0

    path = runner.invoke(app, ["config", "path"])
    assert path.output.strip().endswith("config.yml")


def test_global_options_override_the_config(runner):
    result = runner.invoke(app, ["--workers", "2", "config", "show", "--section", "engine"])
    assert result.exit_code == 0
    assert "workers: 2" in _lines(result)


@pytest.mark.slow
@pytest.mark.integration
@pytest.mark.parametrize("dataset", ["b92", "c96"])
def test_published_datasets_verify(runner, dataset):
    result = runner.invoke(app, ["--workers", "4", "verify", "--dataset", dataset, "--aut"])
    assert result.exit_code == 0, result.output
