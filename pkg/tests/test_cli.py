from __future__ import annotations

import json

import pytest

from pterkit import cli, cli_io
from pterkit.alignment import InvariantViolation


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def pair(tmp_path):
    ref = tmp_path / "ref.txt"
    hyp = tmp_path / "hyp.txt"
    ref.write_text("u1\ttʃʼa\nu2\tpa˥˥\n", encoding="utf-8")
    hyp.write_text("u1\ttʃa\nu2\tpa\n", encoding="utf-8")
    return ref, hyp


def test_tokenize(capsys, pair):
    code, out, _ = run(capsys, "tokenize", str(pair[0]))
    assert code == 0
    assert out.splitlines() == ["u1\tt ʃ ʼ a", "u2\tp a ˥˥"]


def test_score(capsys, pair):
    code, out, _ = run(capsys, "score", "--ref", str(pair[0]), "--hyp", str(pair[1]), "--per-phone")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "PTER 28.6%  N=7 C=5 S=0 D=2 I=0"
    assert "˥˥\t1\t0\t0\t1\t0\t0\t100.0" in lines


def test_score_alignments(capsys, pair):
    code, out, _ = run(capsys, "score", "--ref", str(pair[0]), "--hyp", str(pair[1]), "--alignments")
    assert code == 0 and "id: u2" in out and "REF: p a ˥˥" in out


def test_inventory(capsys, synthetic_manifest):
    code, out, _ = run(capsys, "inventory", str(synthetic_manifest))
    assert code == 0
    rows = {line.split("\t")[0]: line.split("\t") for line in out.splitlines()[1:]}
    assert set(rows) == {"alpha", "beta", "gamma"}
    assert "ǁ" in rows["gamma"][4].split()


def test_analyze_builtin_alias(capsys):
    code, out, _ = run(capsys, "analyze", "@table2")
    assert code == 0
    doc = json.loads(out)
    rel = {r["language"]: r["relative_pct"] for r in doc["corpus_improvements"] if r["condition"] == "multi"}
    assert rel["Zulu"] == pytest.approx(14.1, abs=0.1)
    assert rel["Lao"] == pytest.approx(41.8, abs=0.1)


def test_report_csv_and_flags(capsys, synthetic_manifest, tmp_path):
    out_dir = tmp_path / "rep"
    code, _, _ = run(capsys, "report", str(synthetic_manifest), "--out", str(out_dir),
                     "--clip-floor", "-50", "--stability-threshold", "10", "--min-languages", "3")
    assert code == 0
    report = cli_io.read_csv_report(out_dir)
    meta = {(r["condition"], r["key"]): r["value"] for r in report["meta"]}
    assert meta[("*", "clip_floor_pp")] == "-50.0"
    assert meta[("*", "min_languages")] == "3"
    assert all(r["whisker_low"] >= -50 for r in report["fig1_bins"])
    assert all(r["threshold_pp"] == 10 for r in report["stability"])


def test_report_json(capsys, tmp_path):
    code, _, _ = run(capsys, "report", "@table2", "--out", str(tmp_path), "--format", "json")
    assert code == 0
    assert json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))["summary"]


def test_input_error_exit_code(capsys, pair, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("no tab here\n", encoding="utf-8")
    code, _, err = run(capsys, "score", "--ref", str(pair[0]), "--hyp", str(bad))
    assert code == 1 and "bad.txt:1" in err
    code, _, _ = run(capsys, "tokenize", str(tmp_path / "missing.txt"))
    assert code == 1


def test_configuration_error_exit_code(capsys, tmp_path):
    m = tmp_path / "m.yaml"
    m.write_text("schema_version: 7\n", encoding="utf-8")
    code, _, err = run(capsys, "analyze", str(m))
    assert code == 2 and "schema_version" in err


def test_invariant_violation_exit_code(capsys, pair, monkeypatch):
    def broken(*_args, **_kw):
        raise InvariantViolation("forced")

    monkeypatch.setattr(cli, "score_corpus", broken)
    code, _, err = run(capsys, "score", "--ref", str(pair[0]), "--hyp", str(pair[1]))
    assert code == 3 and "forced" in err


def test_pretokenized_flag(capsys, tmp_path):
    ref = tmp_path / "r.txt"
    ref.write_text("u\tt ʃ | a\n", encoding="utf-8")
    code, out, _ = run(capsys, "tokenize", str(ref), "--pre-tokenized")
    assert code == 0 and out == "u\tt ʃ | a\n"
