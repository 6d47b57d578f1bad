import csv
import io
from pathlib import Path

import pytest
from click.testing import CliRunner

from lcagraph import cli
from lcagraph.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture()
def runner():
    return CliRunner()


def _ingest_args(store):
    return [
        "--store", str(store), "ingest",
        "--workflow", str(FIXTURES / "workflow.csv"),
        "--metadata", str(FIXTURES / "metadata.csv"),
        "--agent", str(FIXTURES / "agent.csv"),
        "--reference", str(FIXTURES / "reference.csv"),
    ]


@pytest.fixture()
def store(tmp_path, runner):
    path = tmp_path / "graph.lcag"
    result = runner.invoke(main, _ingest_args(path))
    assert result.exit_code == 0, result.output
    return path


def test_ingest_reports_counts(tmp_path, runner):
    path = tmp_path / "g.lcag"
    result = runner.invoke(main, _ingest_args(path))
    assert result.exit_code == 0
    assert "nodes created=25" in result.output
    assert path.is_file()


def test_stats(store, runner):
    result = runner.invoke(main, ["--store", str(store), "stats"])
    assert result.exit_code == 0
    assert result.output.splitlines() == [
        "nodes 25",
        "edges 36",
        "workflows 2",
        "activities 6",
        "flows 6",
        "agents 2",
        "references 2",
    ]


def test_ingest_twice_idempotent(store, runner):
    before = store.read_bytes()
    result = runner.invoke(main, _ingest_args(store))
    assert result.exit_code == 0
    assert "nodes created=0" in result.output and "edges created=0" in result.output
    assert store.read_bytes() == before


def test_missing_store_exits_2_with_hint(tmp_path, runner):
    result = runner.invoke(main, ["--store", str(tmp_path / "nope.lcag"), "stats"])
    assert result.exit_code == 2
    assert "lcagraph ingest" in result.stderr


def test_query_csv_output(store, runner):
    result = runner.invoke(
        main,
        ["--store", str(store), "query", "-e",
         "MATCH (w:Workflow) RETURN w.workflow_id ORDER BY 1"],
    )
    assert result.exit_code == 0
    rows = list(csv.reader(io.StringIO(result.output)))
    assert rows == [["w.workflow_id"], ["W1"], ["W2"]]


def test_query_json_output(store, runner):
    result = runner.invoke(
        main,
        ["--store", str(store), "query", "--format", "json", "-e",
         "MATCH (a:Activity) RETURN COUNT(*) AS n"],
    )
    assert result.exit_code == 0
    assert result.output.strip() == '{"n": 6}'


def test_query_syntax_error_exits_1(store, runner):
    result = runner.invoke(main, ["--store", str(store), "query", "-e", "MATCH ("])
    assert result.exit_code == 1
    assert "query error" in result.stderr


def test_query_requires_exactly_one_source(store, runner):
    result = runner.invoke(main, ["--store", str(store), "query"])
    assert result.exit_code == 2


def test_validate_clean_store(store, runner):
    result = runner.invoke(main, ["--store", str(store), "validate", "--strict"])
    assert result.exit_code == 0
    assert "0 violation(s)" in result.stderr


def test_validate_strict_exits_1_on_violation(store, runner, tmp_path):
    from lcagraph import Graph

    g = Graph.load(store.read_text())
    g.create_node({"Bogus"}, {})
    store.write_text(g.dump())
    result = runner.invoke(main, ["--store", str(store), "validate", "--strict"])
    assert result.exit_code == 1
    assert "unknown_label" in result.output


def test_score_and_fair_text(store, runner):
    result = runner.invoke(main, ["--store", str(store), "score"])
    assert result.exit_code == 0 and "completeness" in result.output
    result = runner.invoke(main, ["--store", str(store), "fair"])
    assert result.exit_code == 0 and "pass" in result.output


def test_score_figure_written(store, runner, tmp_path):
    fig = tmp_path / "quality.png"
    result = runner.invoke(main, ["--store", str(store), "score", "--figure", str(fig)])
    assert result.exit_code == 0
    assert fig.stat().st_size > 0


def test_fair_figure_written(store, runner, tmp_path):
    fig = tmp_path / "fair.png"
    result = runner.invoke(main, ["--store", str(store), "fair", "--figure", str(fig)])
    assert result.exit_code == 0
    assert fig.stat().st_size > 0


def test_read_commands_do_not_modify_store(store, runner):
    before = store.read_bytes()
    for args in (
        ["stats"],
        ["validate"],
        ["score"],
        ["fair"],
        ["query", "-e", "MATCH (a) RETURN COUNT(*)"],
    ):
        result = runner.invoke(main, ["--store", str(store)] + args)
        assert result.exit_code == 0
        assert store.read_bytes() == before


def test_export_triples_deterministic(store, runner, tmp_path):
    out1, out2 = tmp_path / "a.nt", tmp_path / "b.nt"
    for out in (out1, out2):
        result = runner.invoke(main, ["--store", str(store), "export-triples", "-o", str(out)])
        assert result.exit_code == 0
    assert out1.read_bytes() == out2.read_bytes()
    lines = out1.read_text().splitlines()
    assert lines == sorted(lines)


def test_import_triples_roundtrip(store, runner, tmp_path):
    from lcagraph import Graph, normalized_dump

    nt = tmp_path / "dump.nt"
    runner.invoke(main, ["--store", str(store), "export-triples", "-o", str(nt)])
    original = Graph.load(store.read_text())
    result = runner.invoke(main, ["--store", str(store), "import-triples", "-i", str(nt)])
    assert result.exit_code == 0
    assert Path(str(store) + ".bak").is_file()
    rebuilt = Graph.load(store.read_text())
    assert normalized_dump(rebuilt) == normalized_dump(original)


def test_harmonize_keeps_backup(store, runner):
    before = store.read_bytes()
    result = runner.invoke(main, ["--store", str(store), "harmonize"])
    assert result.exit_code == 0
    assert Path(str(store) + ".bak").read_bytes() == before
    # the fixture store is already canonical, so content is unchanged
    assert store.read_bytes() == before


def test_store_precedence(store, runner, tmp_path, monkeypatch):
    config = tmp_path / "config"
    monkeypatch.setattr(cli, "CONFIG_PATH", config)

    # env only
    monkeypatch.setenv("LCAG_STORE", str(store))
    result = runner.invoke(main, ["stats"])
    assert result.exit_code == 0 and "nodes 25" in result.output

    # config overrides env
    missing = tmp_path / "missing.lcag"
    config.write_text(f"store = {missing}\n")
    result = runner.invoke(main, ["stats"])
    assert result.exit_code == 2

    # flag overrides config
    result = runner.invoke(main, ["--store", str(store), "stats"])
    assert result.exit_code == 0


def test_default_store_is_cwd_file(runner, tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "CONFIG_PATH", tmp_path / "no-config")
    monkeypatch.delenv("LCAG_STORE", raising=False)
    with runner.isolated_filesystem(temp_dir=tmp_path):
        result = runner.invoke(
            main, ["ingest", "--workflow", str(FIXTURES / "workflow.csv")]
        )
        assert result.exit_code == 0
        assert Path("graph.lcag").is_file()
