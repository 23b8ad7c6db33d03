import json
import subprocess
import sys

import pytest

from eqtrade.cli import main
from eqtrade.io import assignment_to_dict, dumps, fixture_path, load_fixture, serialize_instance


@pytest.fixture(autouse=True)
def no_env_out(monkeypatch):
    monkeypatch.delenv("EQTRADE_OUTPUT_DIR", raising=False)


@pytest.fixture
def ex1():
    return str(fixture_path("example1"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_matches_table3(capsys, ex1):
    code, out, _ = run(capsys, "run", "--mechanism", "equal-bta", ex1)
    assert code == 0
    assert out == dumps(assignment_to_dict(load_fixture("table3"), "equal-bta"))


def test_run_is_byte_identical_across_calls(capsys, ex1):
    first = run(capsys, "run", "--mechanism", "proportional-bta", "--trace", ex1)[1]
    assert first == run(capsys, "run", "--mechanism", "proportional-bta", "--trace", ex1)[1]
    assert json.loads(first)["kind"] == "run"


def test_run_writes_files_to_env_dir(capsys, ex1, tmp_path, monkeypatch):
    monkeypatch.setenv("EQTRADE_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "run", "--mechanism", "equal-bta", "--trace", "--properties", "default", ex1)
    assert code == 0 and out == ""
    assert sorted(f.name for f in tmp_path.iterdir()) == ["assignment.json", "report.json", "trace.json"]
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["ok"] and set(report["properties"]) == {"ir", "ordinal-efficiency", "bounded-envy"}


def test_trace_replay_round_trip(capsys, ex1, tmp_path):
    assert run(capsys, "trace", "--mechanism", "equal-bta", "--out", str(tmp_path), ex1)[0] == 0
    code, out, _ = run(capsys, "trace", "--replay", str(tmp_path / "trace.json"))
    assert code == 0 and out == dumps(assignment_to_dict(load_fixture("table3"), "equal-bta"))


def test_verify_reports_table1_failure(capsys, ex1):
    code, out, _ = run(capsys, "verify", "--properties", "eene,ir", str(fixture_path("table1")), ex1)
    report = json.loads(out)
    assert code == 1 and not report["properties"]["eene"]["ok"]
    assert report["properties"]["eene"]["witnesses"][0]["pair"] == ["2", "1"]
    assert run(capsys, "verify", "--properties", "eene", str(fixture_path("table3")), ex1)[0] == 0


def test_lambda_file(capsys, ex1, tmp_path):
    f = tmp_path / "lam.json"
    f.write_text(json.dumps({"steps": {"1": {"1": {"a": "1/1"}}}}))
    code, _, err = run(capsys, "run", "--mechanism", "bta", "--lambda", "file", "--lambda-file", str(f), ex1)
    assert code == 4 and "InvalidLambda" in err
    assert run(capsys, "run", "--mechanism", "bta", "--lambda", "file", ex1)[0] == 2


def test_exit_codes(capsys, ex1, tmp_path):
    assert run(capsys, "run", "--mechanism", "eae", ex1)[0] == 3
    assert run(capsys, "run", "--mechanism", "equal-bta", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "bogus")[0] == 2
    doc = json.loads(serialize_instance(load_fixture("example1")))
    doc["endowments"]["1"]["c"] = "1/2"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, "run", "--mechanism", "equal-bta", str(bad))
    assert code == 2 and "InvariantViolation at /endowments/1" in err


def test_oracles_agree_with_mechanisms(capsys, tmp_path):
    from eqtrade.generators import random_house_allocation
    import random
    h = random_house_allocation(random.Random(3))
    path = tmp_path / "h.json"
    path.write_text(serialize_instance(h))
    ps = json.loads(run(capsys, "oracles", "ps", str(path))[1])
    bta = json.loads(run(capsys, "run", "--mechanism", "equal-bta", str(path))[1])
    assert ps["assignment"] == bta["assignment"]


def test_manipulation_csv(capsys):
    code, out, _ = run(capsys, "oracles", "manipulation", "--mechanism", "equal-bta", "--agent", "1",
                       str(fixture_path("replication_base")))
    lines = out.splitlines()
    assert code == 0 and lines[0] == "agent,epsilon,best_report" and lines[1].startswith("1,")


def test_replicate_csv(capsys):
    code, out, _ = run(capsys, "harness", "replicate", "--n", "1,2", "--mechanism", "equal-bta",
                       str(fixture_path("replication_base")))
    lines = out.splitlines()
    assert code == 0 and lines[0] == "n,scope,agent,epsilon"
    assert lines[-1] in ("# series nonincreasing", "# series exception")
    assert sum(1 for ln in lines if ",max," in ln) == 2


def test_suite_csv(capsys):
    code, out, _ = run(capsys, "harness", "suite", "--seed", "1", "--count", "3", "--mechanism", "pta")
    assert code == 0
    assert out.splitlines()[0] == "mechanism,property,instances,failures,errors"


def test_module_entry_point(ex1):
    done = subprocess.run([sys.executable, "-m", "eqtrade", "run", "--mechanism", "equal-bta", ex1],
                          capture_output=True, text=True, check=False)
    assert done.returncode == 0
    assert done.stdout == dumps(assignment_to_dict(load_fixture("table3"), "equal-bta"))
