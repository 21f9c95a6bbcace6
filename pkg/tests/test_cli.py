# backend/tests/test_cli.py
# Tests for the command-line front end, result files and the result store

import csv
import json
import os

import pytest

from app.api import cli
from app.exceptions import EigensolverError
from app.utils.constants import Command, OutputFormat
from app.utils.records import ResultStore, content_key, file_digest


def _solve(output_dir, *extra):
    return cli.main(["solve", "--v0", "100", "--nmesh", "300", "--output", str(output_dir), *extra])


def test_parse_config_merges_flags():
    """Test that flags land on the validated config."""
    config = cli.parse_config(["solve", "--v0", "10", "--dim", "2", "--ell", "1", "--nmesh", "200"])
    assert config.command == Command.SOLVE
    assert config.v0 == 10.0
    assert (config.dim, config.ell, config.nmesh) == (2, 1, 200)
    assert config.format == OutputFormat.CSV


def test_solve_writes_records_and_manifest(tmp_path):
    """Test the solve command end to end."""
    assert _solve(tmp_path) == 0
    with open(tmp_path / "solve.csv", newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert float(rows[0]["energy"]) == pytest.approx(-79.738800, abs=1.5e-6)
    assert rows[0]["n"] == "1"

    with open(tmp_path / "manifest.json") as handle:
        manifest = json.load(handle)
    assert manifest["command"] == "solve"
    assert manifest["status"] == "ok"
    assert manifest["outputs"]["solve.csv"] == file_digest(str(tmp_path / "solve.csv"))
    assert manifest["config"]["v0"] == 100.0


def test_solve_output_is_deterministic(tmp_path):
    """Test that identical configs give byte-identical result files."""
    assert _solve(tmp_path / "first") == 0
    assert _solve(tmp_path / "second") == 0
    first = (tmp_path / "first" / "solve.csv").read_bytes()
    second = (tmp_path / "second" / "solve.csv").read_bytes()
    assert first == second


def test_json_format_keeps_column_order(tmp_path):
    """Test JSON output with the fixed column order."""
    assert _solve(tmp_path, "--format", "json") == 0
    with open(tmp_path / "solve.json") as handle:
        records = json.load(handle)
    assert list(records[0]) == cli.SOLVE_COLUMNS
    assert records[0]["family"] == "laguerre"


def test_invalid_config_exits_before_compute(tmp_path, capsys):
    """Test exit status 2 and no result files for a bad value."""
    assert cli.main(["solve", "--v0", "-1", "--output", str(tmp_path)]) == 2
    assert os.listdir(tmp_path) == []
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["exit_status"] == 2


def test_missing_required_value(tmp_path):
    """Test that solve without a depth is rejected."""
    assert cli.main(["solve", "--output", str(tmp_path)]) == 2
    assert os.listdir(tmp_path) == []


def test_config_file_and_flag_override(tmp_path):
    """Test that flags override config file values."""
    config_file = tmp_path / "run.env"
    config_file.write_text("V0=5\nNMESH=120\nH_GRID=1,1.5,2.25\n")
    config = cli.parse_config(["solve", "--config", str(config_file), "--v0", "10"])
    assert config.v0 == 10.0
    assert config.nmesh == 120
    assert config.h_grid == [1.0, 1.5, 2.25]


def test_config_file_rejects_unknown_keys(tmp_path):
    """Test that unknown config keys exit with status 2."""
    config_file = tmp_path / "run.env"
    config_file.write_text("V0=5\nDEPTHH=3\n")
    assert cli.main(["solve", "--config", str(config_file), "--output", str(tmp_path / "out")]) == 2
    assert not (tmp_path / "out").exists()


def test_numerical_failure_exit_status(tmp_path, monkeypatch, capsys):
    """Test that numerical errors exit with status 3 and a JSON record."""

    def failing(config):
        raise EigensolverError("mesh", "did not converge")

    monkeypatch.setitem(cli.HANDLERS, Command.SOLVE, failing)
    assert _solve(tmp_path) == 3
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["error"] == "EigensolverError"


def test_io_failure_exit_status(tmp_path):
    """Test that an unwritable output location exits with status 4."""
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert _solve(blocker / "sub") == 4


def test_result_store_round_trip(tmp_path):
    """Test append-only persistence and reload of the result store."""
    path = str(tmp_path / "store.jsonl")
    store = ResultStore(path)
    inputs = {"d": 3, "n": 2, "ell": 1, "size": 300, "h": 1.0}
    assert store.get("critical", inputs) is None
    store.put("critical", inputs, 6.05)
    store.put("critical", inputs, 7.0)

    reloaded = ResultStore(path)
    assert reloaded.get("critical", dict(reversed(list(inputs.items())))) == 6.05
    with open(path) as handle:
        assert len(handle.readlines()) == 1


def test_content_key_ignores_key_order():
    """Test that the content hash depends on values only."""
    assert content_key("m", {"a": 1, "b": 2.0}) == content_key("m", {"b": 2.0, "a": 1})
    assert content_key("m", {"a": 1}) != content_key("n", {"a": 1})
