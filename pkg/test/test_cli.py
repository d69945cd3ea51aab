import orjson
import pandas as pd
import pytest
from typer.testing import CliRunner

from pysptags.cli.main import app
from pysptags.corpus import read_jsonl


@pytest.fixture
def runner() -> CliRunner:
    """Get a runner for invoking the command line app."""
    return CliRunner()


def _report(path) -> dict:
    return orjson.loads(path.read_bytes())


def _ok(result):
    assert result.exit_code == 0, result.output


def test_relabel(runner, tmp_path, sample_relabel):
    """Test relabeling the worked examples from the command line."""
    out, report = tmp_path / "tagged.jsonl", tmp_path / "relabel.json"
    result = runner.invoke(
        app,
        ["relabel", str(sample_relabel), "-o", str(out), "--report", str(report)],
    )
    _ok(result)

    lines = list(read_jsonl(out))
    assert [line["status"] for line in lines] == [
        "tagged",
        "fallback_ambiguous",
        "tagged",
    ]
    assert lines[0]["transcript"] == (
        "Play music on <end-primary> but we need to leave <end-others> "
        "no cancel <end-primary>"
    )
    assert lines[1]["transcript"] == "How tall is Barack Obama?"
    assert lines[1]["match_count"] == 2
    assert lines[2]["edits"] == 1
    # Input fields pass through
    assert lines[2]["domain"] == "dictation"

    body = _report(report)
    assert body["records"] == 3
    assert body["tagged"] == 2
    assert body["fallback_ambiguous"] == 1
    assert body["skipped"] == 0


def test_relabel_settings_file(runner, tmp_path, sample_relabel, sample_settings):
    """Test that a settings file with no edit budget makes the extra word fall back."""
    out = tmp_path / "tagged.jsonl"
    result = runner.invoke(
        app,
        ["--settings", str(sample_settings), "relabel", str(sample_relabel)]
        + ["-o", str(out)],
    )
    _ok(result)

    statuses = [line["status"] for line in read_jsonl(out)]
    assert statuses == ["tagged", "fallback_ambiguous", "fallback_no_match"]

    # Command line flags win over the file
    result = runner.invoke(
        app,
        ["--settings", str(sample_settings), "relabel", str(sample_relabel)]
        + ["-o", str(out), "--edit-budget", "1"],
    )
    _ok(result)
    assert [line["status"] for line in read_jsonl(out)][2] == "tagged"


def test_relabel_malformed_input(runner, tmp_path, sample_malformed):
    """Test that malformed lines abort strict runs and are skipped in lenient ones."""
    args = ["relabel", str(sample_malformed), "--format", "summary"]
    result = runner.invoke(app, args)
    assert result.exit_code == 1
    assert "malformed.jsonl:2" in result.output

    report = tmp_path / "relabel.json"
    result = runner.invoke(
        app,
        ["relabel", str(sample_malformed), "--lenient", "--format", "summary"]
        + ["--report", str(report)],
    )
    _ok(result)
    body = _report(report)
    assert body["records"] == 2
    assert body["skipped"] == 1


def test_bad_workers_env(runner, sample_relabel):
    """Test that a bad worker count in the environment is a usage error."""
    result = runner.invoke(
        app,
        ["relabel", str(sample_relabel), "--format", "summary"],
        env={"PYSPTAGS_WORKERS": "zero"},
    )
    assert result.exit_code == 1
    assert "PYSPTAGS_WORKERS" in result.output


def test_synth_oracle_longform(runner, tmp_path):
    """Test that a perfect recognizer's corpus has no long deletions."""
    corpus, report = tmp_path / "eval.jsonl", tmp_path / "longform.json"
    _ok(
        runner.invoke(
            app,
            ["synth", "-o", str(corpus), "--n-utts", "5", "--words-per-utt", "60"],
        )
    )
    assert len(list(read_jsonl(corpus))) == 5

    result = runner.invoke(
        app,
        ["longform", str(corpus), "--report", str(report), "--format", "summary"],
    )
    _ok(result)
    body = _report(report)
    assert body["records"] == 5
    assert body["run_count"] == 0
    assert body["expected_run_count"] == 0
    assert body["wer"]["wer"] == 0.0


def test_synth_stuck_longform(runner, tmp_path):
    """Test that the metric recovers every run a stuck recognizer injects."""
    corpus, report = tmp_path / "eval.jsonl", tmp_path / "longform.json"
    _ok(
        runner.invoke(
            app,
            ["synth", "-o", str(corpus), "--model", "stuck", "--n-utts", "10"]
            + ["--words-per-utt", "80", "--resume-after-words", "30"],
        )
    )
    result = runner.invoke(
        app,
        ["longform", str(corpus), "--report", str(report), "-o", str(tmp_path / "x")],
    )
    _ok(result)

    body = _report(report)
    assert body["run_count"] == 10
    assert body["expected_run_count"] == 10
    assert body["mismatches"] == 0
    lines = list(read_jsonl(tmp_path / "x"))
    assert lines[0]["runs"][0]["length"] == 30


def test_ep(runner, tmp_path, sample_ep):
    """Test EP50 and EP90 on the sample corpus."""
    out, report = tmp_path / "ep.jsonl", tmp_path / "ep.json"
    result = runner.invoke(
        app, ["ep", str(sample_ep), "-o", str(out), "--report", str(report)]
    )
    _ok(result)

    body = _report(report)
    assert (body["ep50_ms"], body["ep90_ms"]) == (500, 900)
    assert body["ignored"] == 1
    assert body["closed"] == 10
    assert len(list(read_jsonl(out))) == 10


def test_relabel_pipeline(runner, tmp_path):
    """Test generating, relabeling, viewing and scoring relabel pairs."""
    pairs = tmp_path / "pairs.jsonl"
    tagged = tmp_path / "tagged.jsonl"
    views = tmp_path / "views.jsonl"
    relabel_report = tmp_path / "relabel.json"
    score_report = tmp_path / "score.json"

    _ok(
        runner.invoke(
            app,
            ["synth", "--kind", "relabel", "--n-utts", "30", "--seed", "4"]
            + ["-o", str(pairs)],
        )
    )
    _ok(
        runner.invoke(
            app,
            ["relabel", str(pairs), "-o", str(tagged), "--report", str(relabel_report)],
        )
    )
    body = _report(relabel_report)
    assert body["tagged"] == 30
    assert body["expected"] == 30
    assert body["mismatches"] == 0
    assert all(line["agrees"] for line in read_jsonl(tagged))

    _ok(runner.invoke(app, ["view", str(tagged), "--view", "all", "-o", str(views)]))
    first = next(iter(read_jsonl(views)))
    assert "<end-" not in first["hyp"]

    _ok(
        runner.invoke(
            app,
            ["score", str(views), "--report", str(score_report), "--format", "summary"],
        )
    )
    body = _report(score_report)
    assert body["kind"] == "score"
    assert body["wer"]["wer"] == 0.0
    assert body["run_count"] == 0


def test_diff(runner, tmp_path):
    """Test comparing a candidate report against a baseline."""
    baseline, candidate = tmp_path / "baseline.json", tmp_path / "tagged.json"
    baseline.write_bytes(
        orjson.dumps({"kind": "longform", "wer": {"wer": 20.0}, "run_count": 62})
    )
    candidate.write_bytes(
        orjson.dumps({"kind": "longform", "wer": {"wer": 18.0}, "run_count": 28})
    )
    csv = tmp_path / "diff.csv"

    result = runner.invoke(
        app, ["diff", str(baseline), str(candidate), "--csv", str(csv)]
    )
    _ok(result)
    frame = pd.read_csv(csv, index_col="setup")
    assert frame.loc["tagged", "run_improvement_pct"] == pytest.approx(54.8, abs=0.1)
    assert frame.loc["tagged", "wer_improvement_pct"] == pytest.approx(10.0)


def test_diff_rejects_other_reports(runner, tmp_path):
    """Test that only long-form and score reports can be compared."""
    ep = tmp_path / "ep.json"
    ep.write_bytes(orjson.dumps({"kind": "ep", "ep50_ms": 500}))

    result = runner.invoke(app, ["diff", str(ep), str(ep)])
    assert result.exit_code == 1
    assert "not a non-empty long-form report" in result.output
