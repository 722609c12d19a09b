import csv
import io
import json

import pytest

from fogsec import bench
from fogsec.cli import main

SCENARIOS = ["secure-data-aggregation", "secure-data-sharing", "fine-grained-access", "secure-computation"]


@pytest.mark.parametrize("name", SCENARIOS)
def test_scenario_ok(name, capsys):
    assert main(["scenario", name]) == 0
    assert "ok" in capsys.readouterr().out


def test_scenario_list(capsys):
    assert main(["scenario", "--list"]) == 0
    assert capsys.readouterr().out.split() == sorted(SCENARIOS)


def test_scenario_unknown(capsys):
    assert main(["scenario", "nope"]) == 2
    assert "unknown scenario" in capsys.readouterr().err


def test_scenario_missing_name():
    assert main(["scenario"]) == 2


def test_scenario_artifacts(tmp_path):
    out = tmp_path / "run"
    assert main(["scenario", "secure-data-aggregation", "--out", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO((out / "ledger.csv").read_text())))
    assert [int(r["bytes"]) for r in rows if r["kind"] == "frame"] == [796, 796]
    lines = (out / "transcript.jsonl").read_text().splitlines()
    assert all(json.loads(l) for l in lines)
    assert json.loads((out / "counters.json").read_text())["F"]["T_P"] == 16


def test_scenario_artifacts_deterministic(tmp_path):
    for d in ("a", "b"):
        assert main(["scenario", "secure-data-sharing", "--out", str(tmp_path / d)]) == 0
    for f in ("transcript.jsonl", "ledger.csv", "counters.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_scenario_override_breaks_assertion(capsys):
    # the scenario pins 796-byte frames; a different n must fail the ledger check
    assert main(["scenario", "secure-data-aggregation", "--n", "3"]) == 1
    assert "failed" in capsys.readouterr().err


def test_report(capsys):
    assert main(["report", "--tables", "II", "--n", "7"]) == 0
    out = capsys.readouterr().out
    assert "verify-aggregate" in out and "796/796" in out


def test_report_json(capsys):
    assert main(["report", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert {r["status"] for r in data["rows"]} <= {"match", "annotated"}


def test_report_bad_table():
    assert main(["report", "--tables", "IX"]) == 2


def _bench(args, capsys):
    assert main(["bench", "--backend", "mock", "--repeat", "2", *args]) == 0
    return capsys.readouterr().out


def test_bench_agg_csv(capsys):
    rows = list(csv.DictReader(io.StringIO(_bench(["--suite", "agg", "--n", "1..3"], capsys))))
    assert {r["task"] for r in rows} == {"sign-bls", "sign-aggregate", "verify-aggregate", "verify-bls"}
    va = {int(r["n"]): r for r in rows if r["task"] == "verify-aggregate"}
    assert sorted(va) == [1, 2, 3]
    assert all(int(va[n]["T_P"]) == n + 1 for n in va)


def test_bench_json(capsys):
    data = json.loads(_bench(["--suite", "homo", "--format", "json"], capsys))
    assert data["config"]["repeat"] == 2
    assert {r["task"] for r in data["rows"]} >= {"re-encryption", "decryption"}


def test_bench_clpre_reference(capsys):
    rows = list(csv.DictReader(io.StringIO(_bench(["--suite", "clpre"], capsys))))
    ref = {r["task"]: float(r["reference_ms"]) for r in rows}
    assert ref == bench.CLPRE_REFERENCE_MS


def test_bench_mabe(capsys):
    rows = list(csv.DictReader(io.StringIO(_bench(["--suite", "mabe", "--attrs", "1,3"], capsys))))
    assert sorted({int(r["attrs"]) for r in rows}) == [1, 3]


def test_bench_out_file(tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert main(["bench", "--backend", "mock", "--repeat", "1", "--suite", "agg", "--n", "2", "--out", str(out)]) == 0
    assert out.read_text().startswith("suite,task,n")


@pytest.mark.parametrize("args", [["--n", "0"], ["--n", "5..2"], ["--n", "x"], ["--repeat", "0"],
                                  ["--msg-size", "0"], ["--attrs", "0"]])
def test_bench_bad_bounds(args):
    assert main(["bench", "--backend", "mock", "--suite", "agg", *args]) == 2


def test_bench_unknown_suite():
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--suite", "nope"])
    assert exc.value.code == 2


def test_seed_env(monkeypatch, capsys):
    args = ["bench", "--backend", "mock", "--repeat", "1", "--suite", "agg", "--n", "1", "--format", "json"]
    monkeypatch.setenv("FOGSEC_SEED", "42")
    main(args)
    assert json.loads(capsys.readouterr().out)["config"]["seed"] == 42
    main(args + ["--seed", "5"])
    assert json.loads(capsys.readouterr().out)["config"]["seed"] == 5


def test_bad_seed_env(monkeypatch):
    monkeypatch.setenv("FOGSEC_SEED", "abc")
    assert main(["bench", "--backend", "mock", "--suite", "agg", "--n", "1", "--repeat", "1"]) == 2


def test_scenario_seed_env(monkeypatch, capsys):
    monkeypatch.setenv("FOGSEC_SEED", "99")
    assert main(["scenario", "secure-data-aggregation"]) == 0
    assert "seed 99" in capsys.readouterr().out
    monkeypatch.delenv("FOGSEC_SEED")
    assert main(["scenario", "secure-data-aggregation"]) == 0
    assert "seed 7" in capsys.readouterr().out


def test_parse_range():
    assert bench.parse_range("7") == [7]
    assert bench.parse_range("1..3") == [1, 2, 3]
    assert bench.parse_range("2-4") == [2, 3, 4]
    assert bench.parse_range("2,4") == [2, 4]


def test_scenario_bad_n():
    assert main(["scenario", "secure-data-aggregation", "--n", "1..4"]) == 2
    assert main(["scenario", "secure-data-aggregation", "--n", "0"]) == 2


def test_scenario_msg_size_kept_unless_given(tmp_path):
    assert main(["scenario", "secure-data-aggregation", "--out", str(tmp_path)]) == 0
    assert main(["scenario", "secure-data-aggregation", "--msg-size", "50"]) == 1
