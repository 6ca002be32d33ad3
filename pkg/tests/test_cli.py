import dataclasses
import importlib
import json
from pathlib import Path

import pytest

from iotsec import __version__
from iotsec.commands_setup import DemoHandshake, KeysizeTable, Run, parse_command
from iotsec.main import main
from iotsec.registry_store import load_registry

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
run_handler = importlib.import_module("iotsec.handlers.run")


def test_parse_command():
    assert parse_command(["run", "--scenario", "x.json", "--seed", "5"]) == Run("x.json", seed=5)
    assert parse_command(["keysize-table", "--format", "json"]) == KeysizeTable("json")
    assert parse_command(["demo-handshake", "--curve", "P256", "--verbose"]) == DemoHandshake("P256", True)


def test_version(capsys):
    assert main(["version"]) == 0
    assert capsys.readouterr().out == f"iotsec {__version__}\n"


def test_keysize_table_text(capsys):
    assert main(["keysize-table"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 6
    assert lines[0].split()[:2] == ["Security", "(bits)"]
    assert lines[-1].split() == ["256", "521", "15350", "29.46"]


def test_keysize_table_json(capsys):
    assert main(["keysize-table", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert [row["security_bits"] for row in rows] == [80, 112, 128, 192, 256]
    assert rows[2] == {"security_bits": 128, "ecc_bits": 256, "rsa_bits": 3072, "ratio": 12.0}


def test_demo_handshake(capsys):
    assert main(["demo-handshake", "--curve", "T17"]) == 0
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0] == "Loopback handshake on T17: alice -> gw1"
    flights = [line for line in lines if line.startswith("F")]
    assert len(flights) == 6
    assert flights[0].startswith("F1  initiator")
    assert "ClientHello" in flights[0]
    assert "total" in out and "in 6 flights" in out
    assert lines[-1].startswith("established: session ")


def test_demo_handshake_p256_sizes(capsys):
    assert main(["demo-handshake", "--curve", "P256", "--verbose"]) == 0
    out = capsys.readouterr().out
    assert "total 1034 bytes in 6 flights" in out
    # verbose adds one indented line per message
    assert any(line.startswith("      ") for line in out.splitlines())


def test_unknown_command_is_usage_error(capsys):
    assert main(["bogus"]) == 2
    assert "usage" in capsys.readouterr().err


def test_seed_out_of_range(capsys):
    assert main(["run", "--scenario", "x.json", "--seed", str(1 << 64)]) == 2
    assert main(["run", "--scenario", "x.json", "--seed", "-1"]) == 2


def test_missing_scenario_file(tmp_path, capsys):
    assert main(["run", "--scenario", str(tmp_path / "nope.json")]) == 2
    assert capsys.readouterr().err.startswith("error: $: cannot read scenario")


def test_invalid_scenario(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"schema": 1, "name": "x", "topology": {"devices": [{"id": "d", "gateway": "g"}]}}))
    assert main(["run", "--scenario", str(path)]) == 2
    assert "topology.devices[0].gateway" in capsys.readouterr().err


def test_run_writes_report_and_log(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    log_path = tmp_path / "events.jsonl"
    args = ["run", "--scenario", str(SCENARIOS / "honest.json"), "--report", str(report_path), "--log", str(log_path)]
    assert main(args) == 0
    summary = capsys.readouterr().out
    assert summary.startswith("honest-home (seed 7, T17): 3/3 handshakes established")
    assert summary.rstrip().endswith("security_ok=true")

    report = json.loads(report_path.read_text(encoding="utf-8"))
    assert report["security_ok"] is True
    assert report["counts_consistent"] is True
    rows = [json.loads(line) for line in log_path.read_text(encoding="utf-8").splitlines()]
    assert rows[0]["epoch"] == 0
    assert all("event" in row for row in rows)

    first = (report_path.read_bytes(), log_path.read_bytes())
    assert main(args) == 0
    assert (report_path.read_bytes(), log_path.read_bytes()) == first


def test_run_prints_report_without_report_path(capsys):
    assert main(["run", "--scenario", str(SCENARIOS / "direct.json"), "--seed", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["scenario"] == "direct-tunnels"
    assert report["seed"] == 3


def test_run_reports_violation(monkeypatch, capsys):
    real_run = run_handler.run

    def broken_run(sim):
        report = real_run(sim)
        report.verdicts.integrity = False
        return report

    monkeypatch.setattr(run_handler, "run", broken_run)
    assert main(["run", "--scenario", str(SCENARIOS / "direct.json")]) == 1
    assert "security property violated in direct-tunnels: integrity" in capsys.readouterr().err


def test_run_reports_inconsistent_counts(monkeypatch, capsys):
    real_run = run_handler.run

    def leaky_run(sim):
        report = real_run(sim)
        report.frames.sent += 1
        return report

    monkeypatch.setattr(run_handler, "run", leaky_run)
    assert main(["run", "--scenario", str(SCENARIOS / "direct.json")]) == 1
    assert "frame counters do not add up" in capsys.readouterr().err


def test_run_saves_registry(tmp_path, monkeypatch, capsys):
    path = tmp_path / "registry.tsv"
    monkeypatch.setattr(run_handler, "settings", dataclasses.replace(run_handler.settings, registry_path=str(path)))
    assert main(["run", "--scenario", str(SCENARIOS / "direct.json")]) == 0
    registry = load_registry(path)
    assert registry.get_user("alice") is not None
    assert registry.get_device("thermo-1") is not None


@pytest.mark.parametrize("option", ["--report", "--log"])
def test_unwritable_output_is_usage_error(tmp_path, capsys, option):
    target = tmp_path / "missing" / "out.json"
    assert main(["run", "--scenario", str(SCENARIOS / "honest.json"), option, str(target)]) == 2
    captured = capsys.readouterr()
    lines = captured.err.splitlines()
    assert len(lines) == 1
    assert lines[0].startswith(f"error: cannot write {target}: ")
    assert "honest-home" not in captured.out
    assert not target.exists()


def test_unwritable_registry_snapshot_is_usage_error(tmp_path, monkeypatch, capsys):
    target = tmp_path / "missing" / "registry.tsv"
    monkeypatch.setattr(run_handler, "settings", dataclasses.replace(run_handler.settings, registry_path=str(target)))
    assert main(["run", "--scenario", str(SCENARIOS / "direct.json")]) == 2
    assert capsys.readouterr().err.startswith(f"error: cannot write {target}: ")
