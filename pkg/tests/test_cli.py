import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from fibgrowth import mealy
from fibgrowth.cli import EXIT_CAP, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE, main

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "act": ["act", "f", "10"],
    "act_indexed": ["act", "f1 f3 f5", "0110", "--format", "json"],
    "normalize": ["normalize", "fff"],
    "normalize_json": ["normalize", "f4 f3 f3 f4", "--format", "json"],
    "reduce_trace": ["reduce", "f4 f3 f3 f4", "--trace"],
    "reduce_trace_csv": ["reduce", "f7 f1 f7", "--trace", "--format", "csv"],
    "growth_csv": ["growth", "--max-length", "1000", "--format", "csv"],
    "growth_text": ["growth", "--max-length", "100", "--checkpoints", "1", "3", "50", "100"],
    "wn": ["wn", "--level", "1", "--verify"],
    "wn_csv": ["wn", "--level", "4", "--format", "csv"],
    "trace": ["trace", "f5 f4", "--levels", "1..8"],
    "trace_csv": ["trace", "f4", "--levels", "2..6", "--format", "csv"],
    "ideal_witness": ["ideal-witness", "f5 f4"],
    "ideal_witness_json": ["ideal-witness", "f1 f3 f6 f2", "--format", "json"],
    "hausdorff": ["hausdorff", "--max", "12", "--format", "csv"],
    "verify_relations": ["verify", "relations"],
    "verify_lemmas": ["verify", "lemmas"],
    "theta": ["theta-check", "--level", "10"],
}


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    code, text = run(CASES[name])
    assert code == 0
    path = GOLDEN / f"{name}.txt"
    if os.environ.get("FIBGROWTH_UPDATE_GOLDEN"):
        path.write_text(text)
    assert text == path.read_text()


def test_normalize_text():
    assert run(["normalize", "fff"])[1] == "f1 f3\nlength 1\n"


def test_growth_csv_columns():
    code, text = run(["growth", "--max-length", "1000", "--format", "csv"])
    lines = text.splitlines()
    assert lines[0] == "length,gamma,ratio,lower_ok,upper_ok"
    assert lines[-1].startswith("1000,4293898,")


def test_exit_codes(capsys):
    assert run(["normalize", "sfx"])[0] == EXIT_USAGE
    assert run(["trace", "f5", "--levels", "9..3"])[0] == EXIT_USAGE
    assert run(["trace", "f5", "--levels", "1..17"])[0] == EXIT_CAP
    assert run(["wn", "--level", "11"])[0] == EXIT_CAP
    assert run(["ideal-witness", "s"])[0] == EXIT_USAGE
    assert run(["verify", "no-solution", "--level", "1", "--max-len", "4"])[0] == EXIT_INCONCLUSIVE
    with pytest.raises(SystemExit) as exc:
        main(["growth"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE


def test_verify_failure_exit_code(monkeypatch):
    import fibgrowth.verify as v

    def failing(level, max_len):
        r = v.VerificationReport("forced", {"level": 1})
        r.record(False, "s", 1)
        return r

    monkeypatch.setitem(v.SUITES, "relations", failing)
    assert run(["verify", "relations"])[0] == EXIT_FAIL


def test_verify_json():
    code, text = run(["verify", "relations", "--level", "10", "--json"])
    data = json.loads(text)
    assert code == 0 and data["verdict"] == "pass" and data["parameters"]["level"] == 10


def test_level_cap_env(monkeypatch):
    monkeypatch.setenv(mealy.LEVEL_CAP_ENV, "6")
    assert run(["trace", "f5", "--levels", "1..7"])[0] == EXIT_CAP
    assert run(["trace", "f5", "--levels", "1..6"])[0] == 0


def test_custom_machine(tmp_path):
    path = tmp_path / "machine.txt"
    path.write_text(mealy.format_machine(mealy.automaton_I()))
    assert run(["act", "sf", "0110", "--machine", str(path)]) == run(["act", "sf", "0110"])
    path.write_text("alphabet 2\nstates a\n")
    assert run(["act", "a", "01", "--machine", str(path)])[0] == EXIT_USAGE


def test_bundled_machine_round_trip():
    text = mealy.format_machine(mealy.automaton_I())
    again = mealy.parse_machine(text)
    assert mealy.format_machine(again) == text
    assert sorted(again.edges()) == sorted(mealy.automaton_I().edges())


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fibgrowth", "normalize", "sf"], capture_output=True, text=True, check=True
    )
    assert proc.stdout == "f3\nlength 2\n"
