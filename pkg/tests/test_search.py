import itertools

import numpy as np
import pytest

from presynth.bench.generators import gen_random_circuit
from presynth.circuit import Circuit, Gate, u2q
from presynth.errors import CeilingExceeded
from presynth.search.brute import brute_force_search, circuit_symmetries
from presynth.search.env import MergeEnv, plan_history
from presynth.search.evaluator import PlanEvaluator
from presynth.search.greedy import greedy_refine, greedy_search
from presynth.search.learners import policy_search
from presynth.synth.backend import SynthBackend
from presynth.synthesize import merge_and_synthesize

from conftest import haar


def all_plans(pairs, max_len):
    for k in range(max_len + 1):
        yield from itertools.product(pairs, repeat=k)


def test_greedy_clifford_circuit(backend):
    o = greedy_search(Circuit(2, [Gate("CX", (0, 1))]), backend)
    assert o.plan == () and o.t_count == 0


def test_greedy_pathological_matches_exhaustive(patho, backend):
    o = greedy_search(patho, backend)
    assert o.plan == ((0, 1),) and o.t_count == 0
    best = min(merge_and_synthesize(patho, backend, p)[1] for p in all_plans([(0, 1), (1, 2)], 2))
    assert o.t_count == best


def test_greedy_disjoint_rz_layers(backend):
    c = Circuit(2, [Gate("Rz", (0,), (0.3,)), Gate("Rz", (1,), (0.5,)),
                    Gate("Rz", (0,), (0.7,)), Gate("Rz", (1,), (1.1,))])
    assert greedy_search(c, backend).plan == ()


def test_greedy_trajectory_strictly_decreasing(backend):
    for seed in range(3):
        c = gen_random_circuit(5, 5, seed)
        o = greedy_search(c, backend)
        ts = [o.t_count_initial] + [t for _, _, t in o.trajectory]
        assert all(a > b for a, b in zip(ts, ts[1:]))
        assert ts[-1] == o.t_count
        assert o.t_count == merge_and_synthesize(c, backend, o.plan)[1]


def test_greedy_tie_breaks_on_lowest_pair(backend):
    u = haar(4, np.random.default_rng(2))
    half = [Gate("Rz", (1,), (0.37,)), u2q(u, 0, 1), u2q(u.conj().T, 0, 1), Gate("Rz", (1,), (-0.37,))]
    other = [g.on(*[q + 2 for q in g.qubits]) for g in half]
    c = Circuit(4, half + other + [Gate("CX", (1, 2))])
    o = greedy_search(c, backend)
    assert o.trajectory[0][0] == (0, 1)


def test_refine_examples(patho, backend):
    g = greedy_search(patho, backend)
    assert greedy_refine(patho, backend, ()).plan == g.plan
    assert greedy_refine(patho, backend, [(0, 1)]).plan == ((0, 1),)
    bad = merge_and_synthesize(patho, backend, [(1, 2)])[1]
    r = greedy_refine(patho, backend, [(1, 2)])
    assert r.plan == ((0, 1),) and r.t_count < bad


def test_refine_dominance_random(backend):
    rng = np.random.default_rng(0)
    for seed in range(3):
        c = gen_random_circuit(4, 5, seed)
        pairs = PlanEvaluator(c, backend).candidate_pairs()
        plan = [pairs[i] for i in rng.integers(len(pairs), size=2)]
        r = greedy_refine(c, backend, plan)
        assert r.t_count <= min(merge_and_synthesize(c, backend, plan)[1], greedy_search(c, backend).t_count)


def test_env_rewards(patho, backend):
    env = MergeEnv(patho, backend)
    obs = env.reset()
    assert obs.shape == (3, 3, 3)
    t0 = env.t
    _, r, done, info = env.step((0, 1))
    assert r == t0 - 0 and not info["invalid"]
    _, r, done, info = env.step((0, 1))
    assert r == 0 and done


def test_env_invalid_and_noop(patho, backend):
    env = MergeEnv(patho, backend, horizon=5)
    env.reset()
    _, r, _, info = env.step((0, 2))
    assert r == 0 and info["invalid"] and env.plan == ()
    _, r, _, info = env.step(env.noop)
    assert r == 0 and info["noop"]
    assert env.n_actions == 4


def test_env_cumulative_reward(backend):
    c = gen_random_circuit(4, 4, 1)
    env = MergeEnv(c, backend)
    rng = np.random.default_rng(3)
    env.reset()
    total, done = 0, False
    while not done:
        a = int(rng.choice(np.flatnonzero(env.mask)))
        _, r, done, _ = env.step(a)
        total += r
    assert total == env.t0 - env.t


def test_observation_channels(patho, backend):
    env = MergeEnv(patho, backend)
    obs = env.observation([(0, 1)])
    assert set(np.unique(obs[:, :, 2])) <= {0.0, 1.0}
    assert obs[0, 0, 2] == obs[1, 1, 2] == obs[0, 1, 2] == 1
    assert obs[:, :, 0].sum() == 0


def test_plan_history_order_invariance_for_commuting_actions():
    a = plan_history(4, [(0, 1), (2, 3)])
    b = plan_history(4, [(2, 3), (0, 1)])
    assert (a == b).all()
    # overlapping actions do not commute under the boolean product
    assert not (plan_history(3, [(0, 1), (1, 2)]) == plan_history(3, [(1, 2), (0, 1)])).all()


def test_policy_search_random_finds_optimum(patho):
    o = policy_search(patho, SynthBackend(), "random", budget=500, seed=0)
    assert o.plan == ((0, 1),) and o.t_count == 0


def test_policy_search_budget_zero(patho, backend):
    o = policy_search(patho, backend, "random", budget=0)
    assert o.plan == () and o.t_count == o.t_count_initial


@pytest.mark.parametrize("learner", ["random", "cem", "pg"])
def test_policy_search_deterministic(learner):
    c = gen_random_circuit(4, 4, 2)
    a = policy_search(c, SynthBackend(), learner, budget=40, seed=5)
    b = policy_search(c, SynthBackend(), learner, budget=40, seed=5)
    assert a.to_json() == b.to_json()
    assert a.t_count <= a.t_count_initial


def test_brute_examples(patho, backend):
    o = brute_force_search(patho, backend, 2)
    assert o.plan == ((0, 1),) and o.t_count == 0
    assert brute_force_search(patho, backend, 0).plan == ()
    with pytest.raises(CeilingExceeded):
        brute_force_search(patho, backend, 30)


def test_brute_never_worse_than_greedy(backend):
    for seed in range(2):
        c = gen_random_circuit(4, 4, seed)
        assert brute_force_search(c, backend, 2).t_count <= greedy_search(c, backend).t_count


def _brick(n=4, blocks=2):
    gates = []
    for _ in range(blocks):
        for q in range(n):
            gates += [Gate("Rx", (q,), (0.41,)), Gate("Rz", (q,), (1.3,))]
        gates += [Gate("Rxx", (i, i + 1), (0.77,)) for i in range(0, n - 1, 2)]
        gates += [Gate("Rxx", (i, i + 1), (0.77,)) for i in range(1, n - 1, 2)]
    return Circuit(n, gates)


def test_symmetry_reduced_brute_force(backend):
    c = _brick()
    assert (3, 2, 1, 0) in circuit_symmetries(c)
    full = brute_force_search(c, backend, 3)
    red = brute_force_search(c, backend, 3, symmetry=True)
    assert red.visited < full.visited
    assert red.t_count == full.t_count
