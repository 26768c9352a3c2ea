import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from presynth import gates as G
from presynth.circuit import Circuit, Gate, compute_unitary, distance, t_count
from presynth.errors import BudgetExhausted, NetTooCoarse
from presynth.synth import quat as Q
from presynth.synth.backend import (
    SynthBackend, exact_clifford_t, synth_1q_sk, synth_rz_enum, synth_u3_clifford_t,
)
from presynth.synth.enum import get_tables
from presynth.synth.euler import euler_zyz
from presynth.synth.gateset import GateSet, matchgate_image, sk_default
from presynth.synth.kak import canonical_gate, cnot_count, kak_decompose, weyl_coordinates
from presynth.synth.memo import MemoCache, memo_get, memo_put
from presynth.synth.result import UnitaryKey
from presynth.synth.sk import SKNet, get_net

from conftest import haar


# --- Euler -------------------------------------------------------------

def test_euler_identity_and_gimbal():
    assert euler_zyz(np.eye(2)) == (0, 0, 0, 0)
    th, ph, lam, _ = euler_zyz(G.rz(0.4))
    assert th == 0 and lam == 0 and ph == pytest.approx(0.4)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31))
def test_euler_reconstructs(seed):
    u = haar(2, np.random.default_rng(seed))
    th, ph, lam, phase = euler_zyz(u)
    assert np.max(np.abs(np.exp(1j * phase) * G.rz(ph) @ G.ry(th) @ G.rz(lam) - u)) < 1e-12


# --- gate sets ---------------------------------------------------------

def test_gateset_inverses():
    gs = sk_default()
    for i, w in enumerate(gs.inverses):
        m = compute_unitary(gs.circuit(w)) @ gs.generators[i].matrix
        assert distance(m, np.eye(2)) < 1e-12
    with pytest.raises(Exception):
        GateSet("not closed", (Gate("Rz", (0,), (1.0,)),), (0,))


# --- enumeration -------------------------------------------------------

def test_rz_enum_trivial_cases():
    assert len(synth_rz_enum(0.0, 0.01).word) == 0
    r = synth_rz_enum(np.pi / 4, 0.01)
    assert r.t_count == 1 and r.error < 1e-12
    r = synth_rz_enum(np.pi / 2, 0.01)
    assert r.t_count == 0 and r.error < 1e-12
    assert len(synth_u3_clifford_t(np.eye(2), 0.01).word) == 0
    assert synth_u3_clifford_t(G.rz(np.pi / 4), 0.01).t_count == 1


def _oracle_levels(max_t: int):
    """All Clifford+T elements by exact T-count, built from matrices independently."""
    def key(m):
        k = np.argmax(np.abs(m.ravel()) > 1e-6)
        m = m / (m.ravel()[k] / abs(m.ravel()[k]))
        return tuple(np.round(m.ravel(), 7))

    cliff, frontier = {key(np.eye(2)): np.eye(2)}, [np.eye(2)]
    while frontier:
        nxt = []
        for m in frontier:
            for g in (G.H, G.S):
                p = g @ m
                if key(p) not in cliff:
                    cliff[key(p)] = p
                    nxt.append(p)
        frontier = nxt
    assert len(cliff) == 24
    seen = dict(cliff)
    levels = [list(cliff.values())]
    for _ in range(max_t):
        new = {}
        for m in levels[-1]:
            for c in cliff.values():
                p = c @ G.T @ m
                k = key(p)
                if k not in seen:
                    new[k] = p
        seen.update(new)
        levels.append(list(new.values()))
    return levels


def test_rz_enum_minimal_against_independent_oracle():
    levels = _oracle_levels(7)
    assert [len(x) for x in levels[:4]] == [24, 72, 144, 288]
    rng = np.random.default_rng(9)
    checked = 0
    for theta in rng.uniform(0, 2 * np.pi, 25):
        r = synth_rz_enum(theta, 0.1)
        assert r.error <= 0.1
        if r.t_count > 7:
            continue
        for lvl in levels[: r.t_count]:
            assert min(distance(m, G.rz(theta)) for m in lvl) > 0.1
        checked += 1
    assert checked >= 20


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 2 * np.pi))
def test_rz_enum_monotone_in_eps(theta):
    ts = [synth_rz_enum(theta, e).t_count for e in (0.1, 0.03, 0.01)]
    assert ts[0] <= ts[1] <= ts[2]


def test_rz_enum_errors_bounded_and_deterministic():
    rng = np.random.default_rng(2)
    for theta in rng.uniform(0, 2 * np.pi, 30):
        a = synth_rz_enum(theta, 0.01)
        b = synth_rz_enum(theta, 0.01)
        assert a.word == b.word
        assert a.error <= 0.01
        assert a.t_count == t_count(a.word)
        assert distance(compute_unitary(a.word), G.rz(theta)) == pytest.approx(a.error, abs=1e-12)


def test_rz_enum_budget_and_floor():
    with pytest.raises(BudgetExhausted):
        synth_rz_enum(0.123, 0.001, budget=6)
    with pytest.raises(ValueError):
        synth_rz_enum(0.1, 1e-5)


def test_exact_lookup():
    c = Circuit(1, [Gate("H", (0,)), Gate("T", (0,)), Gate("H", (0,)), Gate("T", (0,)), Gate("S", (0,))])
    r = exact_clifford_t(compute_unitary(c))
    assert r.t_count == 2 and r.error < 1e-12
    assert exact_clifford_t(G.rz(0.1)) is None


def test_split_mode_meets_eps():
    rng = np.random.default_rng(4)
    for _ in range(15):
        u = haar(2, rng)
        r = synth_u3_clifford_t(u, 0.03, mode="split")
        assert r.error <= 0.03
        p = synth_u3_clifford_t(u, 0.03, mode="per_rotation")
        assert p.error <= p.n_approx * 0.03


def test_speller_over_other_gateset():
    gs = matchgate_image()
    r = synth_rz_enum(1.1, 0.01, gs)
    assert {g.kind for g in r.word.gates} <= {"Rx", "Rz"}
    assert r.error <= 0.01
    assert r.t_count == synth_rz_enum(1.1, 0.01).t_count


# --- KAK ---------------------------------------------------------------

def _magic_spectrum(u):
    b = np.array([[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]]) / np.sqrt(2)
    su = u / np.linalg.det(u) ** 0.25
    m = b.conj().T @ su @ b
    ev = np.linalg.eigvals(m.T @ m)
    return ev


def _same_spectrum_up_to_sign(u, v):
    a, b = _magic_spectrum(u), _magic_spectrum(v)
    for s in (1, -1):
        if all(np.min(np.abs(b * s - x)) < 1e-7 for x in a):
            return True
    return False


def test_weyl_coordinates_of_named_gates():
    assert np.allclose(weyl_coordinates(G.CX), (np.pi / 4, 0, 0), atol=1e-9)
    assert np.allclose(weyl_coordinates(G.SWAP), (np.pi / 4,) * 3, atol=1e-9)
    assert _same_spectrum_up_to_sign(G.CX, canonical_gate(np.pi / 4, 0, 0))
    assert _same_spectrum_up_to_sign(G.SWAP, canonical_gate(np.pi / 4, np.pi / 4, np.pi / 4))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_weyl_chamber_and_invariants(seed):
    u = haar(4, np.random.default_rng(seed))
    a, b, c = weyl_coordinates(u)
    assert np.pi / 4 + 1e-9 >= a >= b - 1e-9 and b >= abs(c) - 1e-9
    assert _same_spectrum_up_to_sign(u, canonical_gate(a, b, c))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_kak_random(seed):
    u = haar(4, np.random.default_rng(seed))
    out = kak_decompose(u)
    assert distance(u, compute_unitary(out)) <= 1e-8
    assert cnot_count(out) <= 3
    assert sum(1 for g in out.gates if g.arity == 1) <= 15
    assert {g.kind for g in out.gates} <= {"CX", "U3"}


def test_kak_cnot_classes(rng):
    a, b = haar(2, rng), haar(2, rng)
    assert cnot_count(kak_decompose(np.kron(a, b))) == 0
    out = kak_decompose(G.CX)
    assert out.gates == (Gate("CX", (0, 1)),)
    assert cnot_count(kak_decompose(G.SWAP)) == 3
    assert cnot_count(kak_decompose(G.rxx(0.7))) == 2
    assert cnot_count(kak_decompose(G.crx(1.3))) == 2
    # CX reversed with locals around it stays a one-CNOT gate
    m = np.kron(a, b) @ G.SWAP @ G.CX @ G.SWAP @ np.kron(b, a)
    assert cnot_count(kak_decompose(m)) == 1


# --- Solovay-Kitaev -----------------------------------------------------

def test_sk_net_hits():
    r = synth_1q_sk(G.H, 0)
    assert r.error < 1e-12 and len(r.word) == 1
    assert len(synth_1q_sk(np.eye(2), 2).word) == 0


def test_sk_improves_with_depth():
    rng = np.random.default_rng(8)
    us = [haar(2, rng) for _ in range(20)]
    means = [np.mean([synth_1q_sk(u, d).error for u in us]) for d in (0, 1, 2)]
    assert means[0] > means[1] > means[2]
    for u in us:
        assert synth_1q_sk(u, 2).error <= synth_1q_sk(u, 0).error + 1e-12


def test_sk_deterministic():
    u = haar(2, np.random.default_rng(1))
    assert synth_1q_sk(u, 2).word == synth_1q_sk(u, 2).word


def test_sk_net_too_coarse():
    net = SKNet(sk_default(), base_length=2, base_tol=0.01)
    from presynth.synth.sk import sk_word

    with pytest.raises(NetTooCoarse):
        sk_word(haar(2, np.random.default_rng(0)), 1, net)


# --- memo & keys ---------------------------------------------------------

def test_unitary_key_phase_and_grid():
    u = haar(2, np.random.default_rng(0))
    assert UnitaryKey.of(u) == UnitaryKey.of(np.exp(0.3j) * u)
    assert UnitaryKey.of(G.rz(0.5)) == UnitaryKey.of(G.rz(0.5 + 1e-10))
    assert UnitaryKey.of(G.rz(0.5)) != UnitaryKey.of(G.rz(0.5 + 1e-6))


def test_memo_namespaces():
    m = MemoCache()
    k = UnitaryKey.of(G.H)
    assert m.get("1q", k) is None
    m.put("1q", k, "r")
    assert m.get("1q", k) == "r"
    assert m.get("2q", k) is None
    memo_put(k, "x", "plan", cache=m)
    assert memo_get(k, "plan", cache=m) == "x"


def test_backend_memoizes_close_angles():
    b = SynthBackend()
    b.synth_1q(G.rz(0.7))
    b.synth_1q(G.rz(0.7 + 1e-10))
    assert b.calls["1q"] == 1


def test_backend_2q_orientation_shared():
    b = SynthBackend()
    u = haar(4, np.random.default_rng(3))
    x = b.synth_2q(u)
    y = b.synth_2q(G.SWAP @ u @ G.SWAP)
    assert b.calls["2q"] == 1
    assert distance(compute_unitary(x), u) < 1e-8
    assert distance(compute_unitary(y), G.SWAP @ u @ G.SWAP) < 1e-8


def test_memoized_equals_unmemoized():
    rng = np.random.default_rng(6)
    us = [haar(2, rng) for _ in range(5)]
    b = SynthBackend()
    first = [b.synth_1q(u).word for u in us]
    again = [b.synth_1q(u).word for u in us]
    fresh = [SynthBackend().synth_1q(u).word for u in us]
    assert first == again == fresh


def test_sk_backend_target_set():
    b = SynthBackend("kak+sk")
    r = b.synth_1q(haar(2, np.random.default_rng(2)))
    assert {g.kind for g in r.word.gates} <= {"H", "T", "Tdg"}
