"""Policy optimizers driving the merge environment, and the search loop around them."""
from __future__ import annotations

import numpy as np

from ..circuit import Circuit
from .env import MergeEnv
from .evaluator import PlanEvaluator, SearchOutcome, outcome


def _masked(p: np.ndarray, mask: np.ndarray) -> np.ndarray:
    p = np.where(mask, p, 0.0)
    s = p.sum()
    return p / s if s > 0 else mask / mask.sum()


class RandomLearner:
    """Uniform over valid actions; never learns."""

    def __init__(self, n_actions: int, horizon: int, rng: np.random.Generator):
        self.n_actions = n_actions

    def propose(self, obs, step: int, mask) -> np.ndarray:
        return _masked(np.ones(self.n_actions), mask)

    def update(self, episodes) -> None:
        pass


class CrossEntropyLearner:
    """Independent per-step categorical distributions refit to the elite episodes."""

    def __init__(self, n_actions: int, horizon: int, rng: np.random.Generator,
                 elite: float = 0.2, smoothing: float = 0.7):
        self.probs = np.full((max(horizon, 1), n_actions), 1.0 / n_actions)
        self.elite = elite
        self.smoothing = smoothing

    def propose(self, obs, step: int, mask) -> np.ndarray:
        return _masked(self.probs[min(step, len(self.probs) - 1)], mask)

    def update(self, episodes) -> None:
        if not episodes:
            return
        returns = np.array([sum(r for _, _, r in ep) for ep in episodes])
        k = max(1, int(np.ceil(self.elite * len(episodes))))
        # stable sort keeps the choice of elites deterministic under ties
        top = np.argsort(-returns, kind="stable")[:k]
        counts = np.full_like(self.probs, 1e-3)
        for i in top:
            for t, (_, a, _) in enumerate(episodes[i]):
                counts[t, a] += 1
        fit = counts / counts.sum(axis=1, keepdims=True)
        self.probs = self.smoothing * fit + (1 - self.smoothing) * self.probs


class PolicyGradientLearner:
    """Linear softmax policy on flattened observations, REINFORCE with an entropy bonus."""

    def __init__(self, n_actions: int, horizon: int, rng: np.random.Generator,
                 obs_size: int | None = None, lr: float = 0.05, entropy: float = 0.05):
        self.n_actions = n_actions
        self.rng = rng
        self.lr = lr
        self.entropy = entropy
        self.w = None if obs_size is None else np.zeros((obs_size + 1, n_actions))
        self.baseline = 0.0

    def _features(self, obs) -> np.ndarray:
        x = np.asarray(obs, dtype=float).ravel()
        scale = max(1.0, np.abs(x).max())
        return np.append(x / scale, 1.0)

    def _probs(self, x, mask) -> np.ndarray:
        if self.w is None:
            self.w = np.zeros((len(x), self.n_actions))
        z = x @ self.w
        z = np.where(mask, z, -np.inf)
        z = z - z[mask].max()
        p = np.exp(z)
        return p / p.sum()

    def propose(self, obs, step: int, mask) -> np.ndarray:
        return self._probs(self._features(obs), np.asarray(mask, dtype=bool))

    def update(self, episodes) -> None:
        grad = None
        rets = [sum(r for _, _, r in ep) for ep in episodes]
        if not rets:
            return
        base = self.baseline
        for ep, ret in zip(episodes, rets):
            togo = np.cumsum([r for _, _, r in ep][::-1])[::-1]
            for (obs, a, _), g in zip(ep, togo):
                mask = obs[1]
                x = self._features(obs[0])
                p = self._probs(x, mask)
                dlogp = -p
                dlogp[a] += 1
                logp = np.log(np.where(p > 0, p, 1.0))
                ent = -(p * logp).sum()
                # gradient of H(p) with respect to the logits
                dent = -p * (logp + ent)
                step = np.outer(x, (g - base) * dlogp + self.entropy * dent)
                grad = step if grad is None else grad + step
        self.baseline = 0.9 * base + 0.1 * float(np.mean(rets))
        if grad is not None:
            self.w += self.lr * grad / len(episodes)


LEARNERS = {"random": RandomLearner, "cem": CrossEntropyLearner, "pg": PolicyGradientLearner}


def policy_search(
    c: Circuit,
    backend,
    learner="random",
    budget: int = 200,
    seed: int = 0,
    batch: int = 10,
    patience: int = 10,
    horizon: int | None = None,
    merge_1q: bool = True,
    evaluator: PlanEvaluator | None = None,
) -> SearchOutcome:
    """Roll out episodes up to budget and return the best plan ever visited.

    The learner is re-evaluated after every batch; the loop stops early once
    `patience` consecutive batches fail to improve the best T-count.
    """
    ev = evaluator or PlanEvaluator(c, backend, merge_1q)
    env = MergeEnv(c, backend, horizon, merge_1q, ev)
    rng = np.random.default_rng(seed)
    if isinstance(learner, str):
        learner = LEARNERS[learner](env.n_actions, env.horizon, rng)
    best = (env.t0, 0, (), [])
    stale = 0
    done_eps = 0
    visited = 0
    while done_eps < budget and env.horizon > 0:
        episodes = []
        improved = False
        for _ in range(min(batch, budget - done_eps)):
            obs = env.reset()
            ep, traj = [], []
            for t in range(env.horizon):
                p = learner.propose(obs, t, env.mask)
                a = int(rng.choice(env.n_actions, p=p))
                nobs, r, done, info = env.step(a)
                ep.append(((obs, env.mask), a, r))
                pair = None if a == env.noop else env.actions[a]
                traj.append((pair, r, info["t_count"]))
                visited += 1
                cand = (env.t, len(env.plan), env.plan, list(traj))
                if cand[:2] < best[:2]:
                    best = cand
                    improved = True
                obs = nobs
                if done:
                    break
            episodes.append(ep)
            done_eps += 1
        learner.update(episodes)
        stale = 0 if improved else stale + 1
        if stale >= patience:
            break
    return outcome(ev, best[2], best[3], visited)
