import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from presynth import gates as G
from presynth.bench.generators import (
    IsingSpec, gen_linear_circuit, gen_matchgate_circuit, gen_random_circuit, gen_trotter_ising,
    generate, parse_task, slice_layers,
)
from presynth.bench.matchgate import (
    MatchgatePipeline, is_native, matchgate_merge, phi_inverse, phi_map, synth_matchgate,
)
from presynth.circuit import Circuit, Gate, compute_unitary, distance, interacting_pairs, remove_identities
from presynth.errors import ConfigError, MixedEndpoints


def test_random_circuit_determinism_and_depth():
    a, b = gen_random_circuit(4, 4, 7), gen_random_circuit(4, 4, 7)
    assert a.dumps() == b.dumps()
    assert len(gen_random_circuit(4, 0, 7)) == 0
    u = compute_unitary(a)
    assert np.allclose(u.conj().T @ u, np.eye(16), atol=1e-10)
    assert gen_random_circuit(4, 4, 8) != a


def test_linear_constructions():
    c = gen_linear_circuit(3, 1, "crx_ladder", 0)
    assert [g.kind for g in c.gates] == ["Rx", "Rz"] * 3 + ["CRx", "CRx"]
    c = gen_linear_circuit(4, 1, "rxx_brick", 0)
    assert [g.qubits for g in c.gates if g.arity == 2] == [(0, 1), (2, 3), (1, 2)]
    c = gen_linear_circuit(10, 3, "rxx_brick", 0)
    assert interacting_pairs(c) == [(i, i + 1) for i in range(9)]
    with pytest.raises(ConfigError):
        gen_linear_circuit(3, 1, "ring", 0)


def test_trotter_zero_time_is_identity():
    spec = IsingSpec.random(3, seed=0, t=0.0, steps=2)
    assert len(remove_identities(gen_trotter_ising(spec))) == 0


def test_trotter_two_qubit_zz_only():
    spec = IsingSpec(2, J=1.0, t=0.6, steps=1)
    c = remove_identities(gen_trotter_ising(spec))
    assert [g.kind for g in c.gates] == ["Rzz"]
    exact = expm(-1j * 0.6 * np.kron(G.Z, G.Z))
    assert distance(compute_unitary(c), exact) < 1e-12
    assert distance(spec.exact(), exact) < 1e-12


def test_trotter_second_order():
    spec = IsingSpec.random(4, seed=2, t=1.0, steps=4)
    exact = spec.exact()
    errs = []
    for s in (4, 8):
        spec.steps = s
        errs.append(distance(compute_unitary(gen_trotter_ising(spec)), exact))
    assert 3.2 <= errs[0] / errs[1] <= 4.8


def test_ising_hamiltonian_convention():
    spec = IsingSpec(2, J=0.0, h_x=[0.5, 0.0], t=1.0)
    # field on qubit 0 only: little-endian kron(I, X)
    assert np.allclose(spec.hamiltonian(), 0.5 * np.kron(G.I2, G.X))


def _parity_block_ok(u):
    n = int(np.log2(u.shape[0]))
    par = np.array([bin(k).count("1") % 2 for k in range(2 ** n)])
    return np.allclose(u[np.ix_(par == 0, par == 1)], 0, atol=1e-10)


def test_matchgate_circuit_properties():
    c = gen_matchgate_circuit(5, seed=3)
    assert len(c) == 25
    for g in c.gates:
        assert g.kind in ("Rz", "Rxx")
        if g.kind == "Rxx":
            assert g.qubits[1] - g.qubits[0] == 1
    assert gen_matchgate_circuit(5, seed=3) == c
    assert _parity_block_ok(compute_unitary(gen_matchgate_circuit(4, seed=1)))


def test_phi_examples():
    assert distance(phi_map([Gate("Rxx", (0, 1), (0.8,))]), G.rx(0.8)) < 1e-12
    run = [Gate("Rz", (0,), (0.5,)), Gate("Rz", (0,), (-0.5,))]
    assert distance(phi_map(run, (0, 1)), np.eye(2)) < 1e-12
    with pytest.raises(MixedEndpoints):
        phi_map([Gate("Rz", (0,), (0.1,)), Gate("Rxx", (0, 1), (0.2,)), Gate("Rz", (1,), (0.3,))])


def _random_run(rng, length, pair=(1, 2), endpoint=2):
    out = []
    for _ in range(length):
        th = float(rng.uniform(0, 2 * np.pi))
        out.append(Gate("Rz", (endpoint,), (th,)) if rng.random() < 0.5 else Gate("Rxx", pair, (th,)))
    return out


def _local_unitary(run, pair, n=3):
    return compute_unitary(Circuit(n, run))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31))
def test_phi_homomorphism(seed):
    rng = np.random.default_rng(seed)
    r1, r2 = _random_run(rng, 3), _random_run(rng, 3)
    lhs = phi_map(r1 + r2, (1, 2), 2)
    rhs = phi_map(r2, (1, 2), 2) @ phi_map(r1, (1, 2), 2)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_phi_roundtrip_dense_oracle():
    rng = np.random.default_rng(4)
    from presynth.synth.backend import exact_clifford_t
    from presynth.synth.gateset import matchgate_image

    gs = matchgate_image()
    for _ in range(5):
        run = _random_run(rng, 6)
        # snap angles to multiples of pi/4 so the image is exactly representable
        run = [Gate(g.kind, g.qubits, (np.round(g.params[0] / (np.pi / 4)) * np.pi / 4,)) for g in run]
        v = phi_map(run, (1, 2), 2)
        res = exact_clifford_t(v, gs)
        word = [gs.generators.index(h) for h in res.word.gates]
        back = phi_inverse(word, (1, 2), 2, 3)
        assert distance(compute_unitary(back), _local_unitary(run, (1, 2))) < 1e-10


def test_matchgate_merge_respects_endpoints():
    c = Circuit(2, [Gate("Rz", (0,), (0.3,)), Gate("Rxx", (0, 1), (0.4,)), Gate("Rz", (1,), (0.5,)),
                    Gate("Rxx", (0, 1), (0.6,))])
    m = matchgate_merge(c, 0, 1)
    assert [g.kind for g in m.gates] == ["U2Q", "U2Q"]
    assert distance(compute_unitary(m), compute_unitary(c)) < 1e-10


def test_synth_matchgate_examples():
    out, tc = synth_matchgate(Circuit(2, [Gate("Rz", (0,), (np.pi / 4,))]))
    assert tc == 1 and [g.kind for g in out.gates] == ["T"]
    rxx = Circuit(2, [Gate("Rxx", (0, 1), (np.pi / 2,))])
    assert synth_matchgate(rxx) == (rxx, 0)


def test_synth_matchgate_random_bound():
    c = gen_matchgate_circuit(4, seed=0)
    p = MatchgatePipeline(0.01)
    for plan in ((), ((0, 1), (2, 3))):
        r = p.run(c, plan)
        assert all(is_native(g) for g in r.circuit.gates)
        assert distance(compute_unitary(c), compute_unitary(r.circuit)) <= r.k_blocks * 0.01 + 1e-9


def test_slice_layers_roundtrip():
    c = gen_random_circuit(5, 6, 1)
    parts = slice_layers(c)
    assert len(parts) > 1
    joined = Circuit(5, [g for p in parts for g in p.gates])
    assert distance(compute_unitary(joined), compute_unitary(c)) < 1e-10


def test_task_specs():
    assert parse_task("random:n=6,depth=6,seed=1") == ("random", {"n": 6, "depth": 6, "seed": 1})
    assert generate("linear:n=10,blocks=3,kind=rxx_brick").n_qubits == 10
    assert len(generate("matchgate:n=5,seed=3")) == 25
    assert generate("ising:n=3,J=1,t=1,steps=2").n_qubits == 3
    with pytest.raises(ConfigError):
        generate("random:depth=3")
    with pytest.raises(ConfigError):
        generate("unknown:n=2")
