import csv
import json
import os

import numpy as np
import pytest

from presynth.bench.generators import pathological_circuit
from presynth.circuit import Circuit, Gate, t_count
from presynth.cli import main
from presynth.pipeline import (
    StrategyConfig, read_reports, run_pipeline, run_suite, verify_circuit,
)
from presynth.synth.memo import MemoCache
from presynth.synthesize import merge_and_synthesize
from presynth.synth.backend import SynthBackend


def test_strategy_none_is_plain_pipeline():
    r = run_pipeline("random:n=3,depth=3", strategy="none", seed=4)
    c = Circuit.from_json(r.circuits["input"])
    out, tc = merge_and_synthesize(c, SynthBackend(), ())
    assert r.results["none"]["t_count"] == tc
    assert Circuit.from_json(r.circuits["none"]) == out


def test_pathological_greedy_removes_all_t():
    r = run_pipeline(pathological_circuit(), strategy="greedy")
    assert r.results["none"]["t_count"] > 0
    assert r.results["greedy"]["t_count"] == 0
    assert r.reduction == 1.0


def test_refine_dominates_search_and_greedy():
    r = run_pipeline("random:n=4,depth=4", strategy="refine", seed=3, cfg=StrategyConfig(budget=30))
    t = {k: v["t_count"] for k, v in r.results.items()}
    assert t["refine"] <= min(t["greedy"], t["search"])


def test_report_integrity():
    r = run_pipeline("random:n=4,depth=4", strategy="greedy", seed=1)
    for name, res in r.results.items():
        assert t_count(Circuit.from_json(r.circuits[name])) == res["t_count"]
    assert r.purity_ok and r.errors["bound_ok"]
    assert r.schema_version == 1
    again = run_pipeline("random:n=4,depth=4", strategy="greedy", seed=1)
    assert again.circuits == r.circuits and again.config_hash == r.config_hash


def test_verify_circuit():
    c = Circuit(1, [Gate("H", (0,))])
    assert verify_circuit(c, c, 0.01, 0)["distance"] < 1e-12
    from presynth.synth.backend import synth_rz_enum

    res = synth_rz_enum(0.3, 0.01)
    v = verify_circuit(Circuit(1, [Gate("Rz", (0,), (0.3,))]), res.word, 0.01, 1)
    assert v["bound_ok"] and v["distance"] <= 0.01


def test_merged_k_not_larger(patho):
    r = run_pipeline(patho, strategy="greedy")
    assert r.results["greedy"]["K"] <= r.results["none"]["K"]


def test_matchgate_backend_report():
    r = run_pipeline("matchgate:n=4", backend="matchgate", strategy="greedy", seed=2)
    assert r.purity_ok and r.errors["bound_ok"]


def test_layerwise_mode():
    r = run_pipeline("linear:n=4,blocks=2,kind=rxx_brick", strategy="greedy", layerwise=True)
    assert isinstance(r.results["greedy"]["plan"][0], list)
    assert r.errors["bound_ok"]


def test_suite_outputs_and_memo(tmp_path):
    conf = {"suite": {"tasks": ["random:n=3,depth=3"], "strategies": ["none", "greedy"], "seeds": [0, 1]}}
    memo = MemoCache()
    first = run_suite(conf, str(tmp_path), memo=memo)
    assert len(first) == 4
    rows = list(csv.DictReader(open(tmp_path / "summary.csv")))
    assert {r["strategy"] for r in rows} == {"none", "greedy"}
    reps = read_reports(str(tmp_path / "reports.jsonl"))
    k = next(i for i, r in enumerate(reps) if r["strategy"] == "greedy")
    t0, tp = reps[k]["results"]["none"]["t_count"], reps[k]["results"]["greedy"]["t_count"]
    assert first[k].reduction == pytest.approx((t0 - tp) / t0 if t0 else 0.0)
    second = run_suite(conf, memo=memo)
    assert sum(r.backend_calls for r in second) * 5 <= sum(r.backend_calls for r in first)
    assert [r.circuits for r in second] == [r.circuits for r in first]


def test_suite_isolates_failures():
    conf = {"suite": {"tasks": ["random:n=3,depth=2", "nosuch:n=2"], "strategies": ["none"]}}
    reps = run_suite(conf)
    assert not reps[0].partial and reps[1].partial


def test_suite_threads_match_serial():
    conf = {"suite": {"tasks": ["random:n=3,depth=3"], "strategies": ["greedy"], "seeds": [0, 1, 2]}}
    a = run_suite(conf, workers=1)
    b = run_suite(conf, workers=3)
    assert [r.circuits for r in a] == [r.circuits for r in b]


# --- CLI -----------------------------------------------------------------

def test_cli_roundtrip(tmp_path, capsys):
    src = str(tmp_path / "c.qasm")
    out = str(tmp_path / "s.qasm")
    assert main(["gen", "random:n=3,depth=3,seed=5", "-o", src]) == 0
    assert main(["synth", src, "-o", out]) == 0
    assert main(["tcount", out]) == 0
    assert main(["verify", src, out, "--epsilon", "0.01", "-k", "50"]) == 0
    capsys.readouterr()
    assert main(["presyn", "pathological:seed=1", "--strategy", "greedy"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["results"]["greedy"]["t_count"] == 0


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.qasm"
    bad.write_text("qreg q[1];\nh q[0]\n")
    assert main(["tcount", str(bad)]) == 2
    assert main(["presyn", "random:n=5,depth=5", "--strategy", "brute", "--max-len", "40"]) == 2
    a = tmp_path / "a.qasm"
    b = tmp_path / "b.qasm"
    a.write_text("qreg q[1]; h q[0];")
    b.write_text("qreg q[1]; x q[0];")
    assert main(["verify", str(a), str(b), "-k", "1"]) == 4


def test_cli_bench_and_plot(tmp_path):
    cfg = tmp_path / "suite.toml"
    cfg.write_text('[suite]\ntasks = ["random:n=3,depth=2"]\nstrategies = ["none", "greedy"]\nseeds = [0]\n')
    out = tmp_path / "out"
    assert main(["bench", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "reports.jsonl").exists()
    pytest.importorskip("matplotlib")
    assert main(["plot", str(out / "summary.csv"), "-o", str(tmp_path / "p.png")]) == 0
    assert os.path.getsize(tmp_path / "p.png") > 0
    bad = tmp_path / "bad.toml"
    bad.write_text("[suite\n")
    assert main(["bench", "--config", str(bad), "--out", str(out)]) == 2
