"""Sequential-decision view of plan construction."""
from __future__ import annotations

import numpy as np

from ..circuit import Circuit, t_count_per_qubit
from ..merge import normalize_plan
from .evaluator import PlanEvaluator


def plan_history(n: int, plan) -> np.ndarray:
    """Boolean product of M_ij = I + E_ij over the plan, in plan order."""
    h = np.eye(n, dtype=bool)
    for i, j in normalize_plan(plan):
        m = np.eye(n, dtype=bool)
        m[i, j] = True
        h = (h.astype(int) @ m.astype(int)) > 0
    return h


class MergeEnv:
    """Actions are all pairs i < j plus a trailing no-op.

    Pairs that share no two-qubit gate in the input circuit are invalid:
    they give reward 0, are flagged in info and are not appended.
    """

    def __init__(self, circuit: Circuit, backend, horizon: int | None = None,
                 merge_1q: bool = True, evaluator: PlanEvaluator | None = None):
        self.circuit = circuit
        self.ev = evaluator or PlanEvaluator(circuit, backend, merge_1q)
        n = circuit.n_qubits
        self.n = n
        self.actions = [(i, j) for i in range(n) for j in range(i + 1, n)]
        self.noop = len(self.actions)
        self.valid = set(self.ev.candidate_pairs(()))
        self.horizon = len(self.valid) if horizon is None else horizon
        self.mask = np.array([a in self.valid for a in self.actions] + [True])
        self.reset()

    @property
    def n_actions(self) -> int:
        return len(self.actions) + 1

    def reset(self) -> np.ndarray:
        self.plan = ()
        self.steps = 0
        self.t = self.ev.t_count(())
        self.t0 = self.t
        return self.observation()

    def observation(self, plan=None) -> np.ndarray:
        plan = self.plan if plan is None else normalize_plan(plan)
        n = self.n
        obs = np.zeros((n, n, 3))
        res = self.ev.evaluate(plan)
        tq = t_count_per_qubit(res.circuit, getattr(self.ev.pipeline, "matchgate", False))
        obs[:, :, 0] = tq[:, None] + tq[None, :]
        obs[np.arange(n), np.arange(n), 0] = tq
        merged = self.ev.merged(plan)
        for i, j in self.valid:
            obs[i, j, 1] = obs[j, i, 1] = self.ev.pipeline.mergeable(merged, i, j)
        obs[:, :, 2] = plan_history(n, plan)
        return obs

    def step(self, action):
        if isinstance(action, (int, np.integer)):
            pair = None if action == self.noop else self.actions[int(action)]
        else:
            pair = None if action is None else normalize_plan([action])[0]
        info = {"invalid": False, "noop": pair is None}
        reward = 0
        if pair is not None and pair not in self.valid:
            info["invalid"] = True
        elif pair is not None:
            self.plan = self.plan + (pair,)
            t = self.ev.t_count(self.plan)
            reward = self.t - t
            self.t = t
        self.steps += 1
        done = self.steps >= self.horizon
        info["t_count"] = self.t
        return self.observation(), reward, done, info


def env_reset(env: MergeEnv) -> np.ndarray:
    return env.reset()


def env_step(env: MergeEnv, action):
    return env.step(action)
