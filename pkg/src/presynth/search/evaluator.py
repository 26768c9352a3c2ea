from __future__ import annotations

import threading
from dataclasses import dataclass, field

from ..circuit import Circuit
from ..merge import Plan, normalize_plan
from ..synthesize import PipelineResult, StandardPipeline


def as_pipeline(obj, merge_1q: bool = True):
    """Accept either a pipeline or a bare SynthBackend."""
    if hasattr(obj, "run") and hasattr(obj, "apply"):
        return obj
    return StandardPipeline(obj, merge_1q)


class PlanEvaluator:
    """Plan -> synthesized result, memoized at plan level in the backend cache."""

    def __init__(self, circuit: Circuit, pipeline, merge_1q: bool = True):
        self.circuit = circuit
        self.pipeline = as_pipeline(pipeline, merge_1q)
        self.evaluations = 0
        self._merged: dict[Plan, Circuit] = {}
        self._lock = threading.Lock()

    def _key(self, plan: Plan):
        return (self.pipeline.config_id, self.circuit.fingerprint(), plan)

    def evaluate(self, plan) -> PipelineResult:
        plan = normalize_plan(plan)
        memo = self.pipeline.memo
        key = self._key(plan)
        hit = memo.get("plan", key)
        if hit is not None:
            return hit
        res = self.pipeline.run(self.circuit, plan)
        with self._lock:
            self.evaluations += 1
        memo.put("plan", key, res)
        return res

    def t_count(self, plan) -> int:
        return self.evaluate(plan).t_count

    def merged(self, plan) -> Circuit:
        plan = normalize_plan(plan)
        with self._lock:
            if plan in self._merged:
                return self._merged[plan]
        if plan:
            c = self.pipeline.apply(self.merged(plan[:-1]), plan[-1:])
        else:
            c = self.pipeline.apply(self.circuit, ())
        with self._lock:
            self._merged[plan] = c
        return c

    def candidate_pairs(self, plan=()) -> list[tuple[int, int]]:
        return self.pipeline.pairs(self.merged(plan))


@dataclass
class SearchOutcome:
    plan: Plan
    t_count: int
    t_count_initial: int
    trajectory: list = field(default_factory=list)
    evaluations: int = 0
    circuit: Circuit | None = None
    k_blocks: int = 0
    visited: int = 0

    @property
    def best_plan(self) -> Plan:
        return self.plan

    @property
    def best_t_count(self) -> int:
        return self.t_count

    def to_json(self) -> dict:
        return {
            "plan": [list(p) for p in self.plan],
            "t_count_initial": self.t_count_initial,
            "t_count_final": self.t_count,
            "evaluations": self.evaluations,
            "trajectory": [
                {"action": list(a) if a is not None else None, "reward": r, "t_count": t}
                for a, r, t in self.trajectory
            ],
        }


def outcome(ev: PlanEvaluator, plan, trajectory=(), visited: int = 0) -> SearchOutcome:
    plan = normalize_plan(plan)
    res = ev.evaluate(plan)
    return SearchOutcome(
        plan, res.t_count, ev.t_count(()), list(trajectory), ev.evaluations,
        res.circuit, res.k_blocks, visited,
    )
