"""Experiment harness: strategies, run reports and suites."""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
import time
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bench.generators import generate, parse_task, slice_layers
from .bench.matchgate import MatchgatePipeline, is_native
from .circuit import Circuit, compute_unitary, distance, t_count
from .errors import ConfigError, PresynthError, WidthExceeded
from .search.brute import brute_force_search
from .search.evaluator import PlanEvaluator, as_pipeline, outcome
from .search.greedy import greedy_refine, greedy_search
from .search.learners import policy_search
from .synth.backend import SynthBackend
from .synth.memo import MemoCache

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
STRATEGIES = ("none", "greedy", "search", "refine", "brute")
BACKENDS = ("kak+enum", "kak+sk", "matchgate")
DEFAULT_SIM_LIMIT = 10


def make_pipeline(backend: str = "kak+enum", epsilon: float = 0.01, memo: MemoCache | None = None,
                  merge_1q: bool = True, **kw):
    if backend == "matchgate":
        return MatchgatePipeline(epsilon, merge_1q=merge_1q, memo=memo, **kw)
    if backend not in BACKENDS:
        raise ConfigError(f"unknown backend {backend!r}")
    return as_pipeline(SynthBackend(backend, epsilon, memo=memo, **kw), merge_1q)


def backend_calls(pipe) -> int:
    """Backend synthesis invocations so far (cache misses only)."""
    calls = getattr(pipe, "calls", None)
    if calls is None:
        calls = pipe.backend.calls
    return int(sum(calls.values()))


def in_target(pipe, g) -> bool:
    if pipe.matchgate:
        return is_native(g)
    return pipe.backend.in_target(g)


def verify_circuit(original: Circuit, synthesized: Circuit, epsilon: float, k: int,
                   limit: int = DEFAULT_SIM_LIMIT) -> dict:
    if max(original.n_qubits, synthesized.n_qubits) > limit:
        raise WidthExceeded(f"{original.n_qubits} qubits exceeds the simulation limit {limit}")
    d = distance(compute_unitary(original, limit), compute_unitary(synthesized, limit))
    # slack for floating-point noise on exact syntheses
    return {"distance": d, "bound": k * epsilon, "K": k, "bound_ok": bool(d <= k * epsilon + 1e-9)}


@dataclass
class StrategyConfig:
    learner: str = "random"
    budget: int = 200
    batch: int = 10
    patience: int = 10
    horizon: int | None = None
    max_len: int = 3
    ceiling: float = 1e6
    symmetry: bool = False


def run_strategy(c: Circuit, pipe, strategy: str, seed: int = 0, cfg: StrategyConfig | None = None,
                 evaluator: PlanEvaluator | None = None) -> dict:
    """Returns {strategy name: outcome} including intermediate strategies."""
    cfg = cfg or StrategyConfig()
    ev = evaluator or PlanEvaluator(c, pipe)
    out = {}

    def timed(name, fn):
        t = time.perf_counter()
        e0 = ev.evaluations
        o = fn()
        o.evaluations = ev.evaluations - e0
        out[name] = (o, time.perf_counter() - t)
        return o

    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}")
    timed("none", lambda: outcome(ev, ()))
    if strategy in ("greedy", "refine", "brute"):
        timed("greedy", lambda: greedy_search(c, pipe, evaluator=ev))
    if strategy in ("search", "refine"):
        s = timed("search", lambda: policy_search(c, pipe, cfg.learner, cfg.budget, seed, cfg.batch,
                                                  cfg.patience, cfg.horizon, evaluator=ev))
    if strategy == "refine":
        timed("refine", lambda: greedy_refine(c, pipe, s.plan, evaluator=ev))
    if strategy == "brute":
        timed("brute", lambda: brute_force_search(c, pipe, cfg.max_len, symmetry=cfg.symmetry,
                                                  ceiling=cfg.ceiling, evaluator=ev))
    return out


@dataclass
class RunReport:
    task: str
    backend: str
    epsilon: float
    strategy: str
    seed: int
    results: dict
    errors: dict = field(default_factory=dict)
    circuits: dict = field(default_factory=dict)
    backend_calls: int = 0
    purity_ok: bool = True
    layerwise: bool = False
    config_hash: str = ""
    partial: bool = False
    failure: str | None = None
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> dict:
        return asdict(self)

    @property
    def t_count(self) -> int:
        return self.results[self.strategy]["t_count"]

    @property
    def reduction(self) -> float:
        t0 = self.results["none"]["t_count"]
        return (t0 - self.t_count) / t0 if t0 else 0.0


def config_hash(*parts) -> str:
    return hashlib.sha256(json.dumps(parts, sort_keys=True, default=str).encode()).hexdigest()[:16]


def _with_seed(task: str, seed: int) -> str:
    family, kw = parse_task(task)
    if "seed" in kw or family in ("qasm",):
        return task
    return f"{task}{',' if ':' in task else ':'}seed={seed}"


def run_pipeline(task, backend: str = "kak+enum", strategy: str = "greedy", epsilon: float = 0.01,
                 seed: int = 0, cfg: StrategyConfig | None = None, memo: MemoCache | None = None,
                 layerwise: bool = False, sim_limit: int = DEFAULT_SIM_LIMIT, pipe=None) -> RunReport:
    """Generate (or take) a circuit, run a strategy, synthesize, verify and report."""
    cfg = cfg or StrategyConfig()
    if isinstance(task, Circuit):
        c, task_id = task, f"circuit:{task.fingerprint()[:12]}"
    else:
        task_id = _with_seed(task, seed)
        c = generate(task_id)
    pipe = pipe or make_pipeline(backend, epsilon, memo)
    calls0 = backend_calls(pipe)
    pieces = slice_layers(c) if layerwise else [c]
    per_piece = [run_strategy(p, pipe, strategy, seed, cfg) for p in pieces]

    results, synthesized, ks = {}, {}, {}
    for name in per_piece[0]:
        outs = [pp[name][0] for pp in per_piece]
        circ = Circuit(c.n_qubits, [g for o in outs for g in o.circuit.gates])
        synthesized[name] = circ
        ks[name] = sum(o.k_blocks for o in outs)
        results[name] = {
            "t_count": t_count(circ, pipe.matchgate),
            "plan": [[list(p) for p in o.plan] for o in outs] if layerwise else [list(p) for p in outs[0].plan],
            "plan_length": sum(len(o.plan) for o in outs),
            "wall_time": sum(pp[name][1] for pp in per_piece),
            "evaluations": sum(o.evaluations for o in outs),
            "K": ks[name],
        }
    errors = {}
    if c.n_qubits <= sim_limit:
        base = verify_circuit(c, synthesized["none"], epsilon, ks["none"], sim_limit)
        pres = verify_circuit(c, synthesized[strategy], epsilon, ks[strategy], sim_limit)
        errors = {
            "distance_no_presyn": base["distance"],
            "distance_presyn": pres["distance"],
            "bound_no_presyn": base["bound"],
            "bound": pres["bound"],
            "bound_ok": base["bound_ok"] and pres["bound_ok"],
            "error_ratio": base["distance"] / pres["distance"] if pres["distance"] > 0 else None,
        }
    purity = all(in_target(pipe, g) for circ in synthesized.values() for g in circ.gates)
    return RunReport(
        task=task_id, backend=backend, epsilon=epsilon, strategy=strategy, seed=seed,
        results=results, errors=errors,
        circuits={"input": c.to_json(), **{k: v.to_json() for k, v in synthesized.items()}},
        backend_calls=backend_calls(pipe) - calls0, purity_ok=purity, layerwise=layerwise,
        config_hash=config_hash(task_id, backend, epsilon, strategy, seed, asdict(cfg), layerwise),
    )


def load_suite(path: str) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    with open(path, "rb") as fh:
        try:
            return tomllib.load(fh)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"{path}: {e}") from None


def suite_cells(conf: dict) -> list[dict]:
    s = conf.get("suite", conf)
    try:
        tasks = list(s["tasks"])
    except KeyError:
        raise ConfigError("suite needs a 'tasks' list") from None
    cells = []
    for task in tasks:
        for backend in s.get("backends", ["kak+enum"]):
            for strategy in s.get("strategies", ["none", "greedy"]):
                for seed in s.get("seeds", [0]):
                    cells.append({"task": task, "backend": backend, "strategy": strategy, "seed": seed})
    return cells


def run_suite(conf, out_dir: str | None = None, workers: int | None = None,
              memo: MemoCache | None = None) -> list[RunReport]:
    """Cross product of tasks x backends x strategies x seeds; failures stay in their cell."""
    if isinstance(conf, str):
        conf = load_suite(conf)
    s = conf.get("suite", conf)
    eps = float(s.get("epsilon", 0.01))
    layerwise = bool(s.get("layerwise", False))
    cfg = StrategyConfig(**conf.get("search", {}))
    cells = suite_cells(conf)
    memo = memo if memo is not None else MemoCache()
    workers = workers or int(s.get("workers", 1))

    def run_cell(cell):
        try:
            return run_pipeline(cell["task"], cell["backend"], cell["strategy"], eps, cell["seed"], cfg,
                                memo, layerwise)
        except (PresynthError, ValueError) as e:
            log.warning("cell %s failed: %s", cell, e)
            return RunReport(cell["task"], cell["backend"], eps, cell["strategy"], cell["seed"], {},
                             partial=True, failure=f"{type(e).__name__}: {e}")

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            reports = list(pool.map(run_cell, cells))
    else:
        reports = [run_cell(cell) for cell in cells]
    if out_dir:
        write_reports(reports, out_dir)
    return reports


def _group(task: str) -> str:
    family, kw = parse_task(task)
    kw.pop("seed", None)
    return family + (":" + ",".join(f"{k}={v}" for k, v in kw.items()) if kw else "")


def summarize(reports: list[RunReport]) -> list[dict]:
    groups = defaultdict(list)
    for r in reports:
        if not r.partial:
            groups[(_group(r.task), r.backend, r.strategy)].append(r)
    rows = []
    for (task, backend, strategy), rs in sorted(groups.items()):
        ratios = [r.errors["error_ratio"] for r in rs if r.errors.get("error_ratio") is not None]
        rows.append({
            "task": task, "backend": backend, "strategy": strategy, "runs": len(rs),
            "mean_t_count_initial": float(np.mean([r.results["none"]["t_count"] for r in rs])),
            "mean_t_count": float(np.mean([r.t_count for r in rs])),
            "mean_reduction_pct": 100 * float(np.mean([r.reduction for r in rs])),
            "mean_plan_length": float(np.mean([r.results[strategy]["plan_length"] for r in rs])),
            "mean_error_ratio": float(np.mean(ratios)) if ratios else "",
        })
    return rows


def write_reports(reports: list[RunReport], out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "reports.jsonl"), "w") as fh:
        for r in reports:
            fh.write(json.dumps(r.to_json()) + "\n")
    rows = summarize(reports)
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as fh:
        if rows:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)


def read_reports(path: str) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
