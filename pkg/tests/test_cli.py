import csv

import pytest

from rccpsim.cli import main
from rccpsim.conformance import validate_dump

from conftest import MINIMAL


@pytest.fixture
def scen(tmp_path):
    p = tmp_path / "s.yaml"
    p.write_text(MINIMAL + "workload: {num_cloudlets: 20}\n")
    return p


def test_validate(scen, capsys):
    assert main(["validate", "--scenario", str(scen)]) == 0
    assert "ok" in capsys.readouterr().out


def test_validate_bad(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text(MINIMAL + "vmm: {low_watermark: 5}\n")
    assert main(["validate", "--scenario", str(p)]) != 0
    assert "low_watermark" in capsys.readouterr().err
    assert main(["validate", "--scenario", str(tmp_path / "missing.yaml")]) != 0


def test_unknown_policy(scen, tmp_path, capsys):
    rc = main(["run", "--scenario", str(scen), "--policy", "fancy", "--seed", "1",
               "--out", str(tmp_path / "m.csv")])
    err = capsys.readouterr().err
    assert rc != 0 and "era, first-fit, random, min-cost" in err


def test_run_appends_and_traces(scen, tmp_path):
    out, tr = tmp_path / "m.csv", tmp_path / "t.jsonl"
    for seed in ("1", "2"):
        assert main(["run", "--scenario", str(scen), "--policy", "era", "--seed", seed,
                     "--out", str(out), "--trace", str(tr)]) == 0
    rows = list(csv.reader(out.open()))
    assert len(rows) == 3 and rows[0][0] == "run_id"
    assert validate_dump(tr.read_text())["violations"] == []


def test_compare_row_count_and_determinism(tmp_path, capsys):
    from importlib.resources import files
    ref = files("rccpsim").joinpath("data/reference.yaml")
    outs = []
    for name, jobs in (("a.csv", "1"), ("b.csv", "2")):
        out = tmp_path / name
        assert main(["compare", "--scenario", str(ref), "--policies", "era,random", "--runs", "20",
                     "--seed", "100", "--out", str(out), "--jobs", jobs]) == 0
        outs.append(out.read_bytes())
    stdout = capsys.readouterr().out
    assert len(outs[0].decode().splitlines()) == 1 + 40
    assert outs[0] == outs[1]
    assert stdout.count("era: runs=20 mean_total_cost=") == 2
    assert stdout.count("random: runs=20") == 2


def test_run_identical_bytes(scen, tmp_path):
    paths = []
    for k in range(2):
        out, tr = tmp_path / f"m{k}.csv", tmp_path / f"t{k}.jsonl"
        main(["run", "--scenario", str(scen), "--policy", "random", "--seed", "9",
              "--out", str(out), "--trace", str(tr)])
        paths.append((out.read_bytes(), tr.read_bytes()))
    assert paths[0] == paths[1]
