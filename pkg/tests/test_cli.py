import json

from notedta.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_synth_preset_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "synth", str(a), "--preset", "figS1-hbv", "--seed", "1")[0] == 0
    assert run(capsys, "synth", str(b), "--preset", "figS1-hbv", "--seed", "1")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 1 + 241


def test_synth_then_evaluate_pipeline(tmp_path, capsys):
    cohort = tmp_path / "cohort.csv"
    outdir = tmp_path / "out"
    assert run(capsys, "synth", str(cohort), "--preset", "figS1-hbv", "--seed", "1")[0] == 0
    code, out, _ = run(
        capsys, "evaluate", str(cohort), "--condition", "hbv", "--outdir", str(outdir)
    )
    assert code == 0
    assert "n=179" in out
    md = (outdir / "report.md").read_text()
    assert "Sn 90 (80.6-95.4)" in md
    payload = json.loads((outdir / "report.json").read_text())
    assert payload["primary"]["counts"] == {"tp": 69, "fp": 45, "fn": 8, "tn": 57}
    for name in (
        "report.csv",
        "plotdata_sensitivity.csv",
        "plotdata_specificity.csv",
        "demographics.csv",
    ):
        assert (outdir / name).exists()


def test_classify_streams_labels(tmp_path, capsys):
    notes = tmp_path / "notes.txt"
    notes.write_text("?Hep C\nKnown Hep B\n\n", encoding="utf-8")
    code, out, _ = run(capsys, "classify", str(notes))
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split("\t")[:3] == ["2", "negative", "negative"]
    assert lines[1].split("\t")[:3] == ["1", "positive", "negative"]
    assert lines[2].split("\t")[0] == "45"


def test_validate_writes_report(tmp_path, capsys):
    cohort = tmp_path / "c.csv"
    cohort.write_text(
        "record_id,age,sex,note_text,hbsag_iu,anti_hcv_iu,collection_year\n"
        "r1,38,M,Hep B,2.4,,\n"
        "r2,bad,F,x,,,\n",
        encoding="utf-8",
    )
    report = tmp_path / "report.json"
    code, out, _ = run(capsys, "validate", str(cohort), "--report", str(report))
    assert code == 0
    assert "1 records parsed, 1 skipped" in out
    assert json.loads(report.read_text())["n_skipped"] == 1


def test_validate_strict_fails_on_bad_row(tmp_path, capsys):
    cohort = tmp_path / "c.csv"
    cohort.write_text(
        "record_id,age,sex,note_text,hbsag_iu,anti_hcv_iu,collection_year\nr1,bad,M,x,,,\n",
        encoding="utf-8",
    )
    code, _, err = run(capsys, "validate", str(cohort), "--strict")
    assert code == 1
    assert "row 2" in err


def test_missing_input_is_exit_1(capsys):
    code, _, err = run(capsys, "evaluate", "/nonexistent.csv", "--condition", "hbv")
    assert code == 1
    assert "error" in err


def test_report_rerender(tmp_path, capsys):
    cohort = tmp_path / "cohort.csv"
    outdir = tmp_path / "out"
    run(capsys, "synth", str(cohort), "--preset", "figS1-hcv", "--seed", "1")
    run(capsys, "evaluate", str(cohort), "--condition", "hcv", "--outdir", str(outdir))
    code, out, _ = run(capsys, "report", str(outdir / "report.json"), "--format", "csv")
    assert code == 0
    assert out.splitlines()[1].split(",")[2:6] == ["101", "38", "17", "10"]
    code, out, _ = run(capsys, "report", str(outdir / "report.json"))
    assert code == 0 and "0.8559" in out


def test_synth_random_mode(tmp_path, capsys):
    out_path = tmp_path / "r.csv"
    code, out, _ = run(
        capsys, "synth", str(out_path), "--n", "50", "--prevalence", "0.2",
        "--condition", "hcv", "--seed", "3",
    )
    assert code == 0
    assert len(out_path.read_text().splitlines()) == 51


def test_synth_requires_preset_or_n(tmp_path, capsys):
    code, _, err = run(capsys, "synth", str(tmp_path / "x.csv"))
    assert code == 1


def test_cutoff_flags(tmp_path, capsys):
    cohort = tmp_path / "c.csv"
    cohort.write_text(
        "record_id,age,sex,note_text,hbsag_iu,anti_hcv_iu,collection_year\n"
        "r1,38,M,Known Hep B,2.0,,\n",
        encoding="utf-8",
    )
    outdir = tmp_path / "o"
    run(capsys, "evaluate", str(cohort), "--condition", "hbv", "--outdir", str(outdir),
        "--hbsag-cutoff", "5.0")
    payload = json.loads((outdir / "report.json").read_text())
    # 2.0 < 5.0, so the known-positive note becomes a false positive
    assert payload["primary"]["counts"] == {"tp": 0, "fp": 1, "fn": 0, "tn": 0}


def test_inputs_not_mutated(tmp_path, capsys):
    cohort = tmp_path / "cohort.csv"
    run(capsys, "synth", str(cohort), "--preset", "figS1-hbv", "--seed", "1")
    before = cohort.read_bytes()
    run(capsys, "evaluate", str(cohort), "--condition", "hbv", "--outdir", str(tmp_path / "o"))
    assert cohort.read_bytes() == before
