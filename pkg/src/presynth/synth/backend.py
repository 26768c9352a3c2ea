"""Synthesis backends: KAK for two-qubit blocks, enum or SK for one-qubit gates."""
from __future__ import annotations

import hashlib
import itertools
import threading
from collections import Counter
from dataclasses import replace
from functools import lru_cache

import numpy as np

from .. import gates as G
from ..circuit import Circuit, Gate, compute_unitary, distance
from ..errors import BudgetExhausted, ConfigError
from . import quat as Q
from .enum import STEP, Speller, get_tables
from .euler import euler_zyz
from .gateset import GateSet, clifford_t, sk_default
from .kak import kak_decompose
from .memo import MemoCache
from .result import SynthesisResult, UnitaryKey
from .sk import get_net, sk_word

U3_MODES = ("per_rotation", "split")
EXACT_TOL = 1e-12


@lru_cache(maxsize=None)
def _speller(gs: GateSet) -> Speller:
    return Speller(gs, get_tables())


def _rot_is_trivial(theta: float) -> bool:
    return abs(np.sin(theta / 2)) < 1e-12


def _rz_tokens(theta: float, eps: float, budget: int) -> tuple[list[int], float]:
    if _rot_is_trivial(theta):
        return [], 0.0
    return get_tables().search_rz(theta, eps, budget)


def _result(word: tuple[int, ...], gs: GateSet, u: np.ndarray, backend_id: str, n_approx: int):
    circ = gs.circuit(word)
    err = distance(u, compute_unitary(circ)) if len(circ) else distance(u, np.eye(2))
    return SynthesisResult(circ, gs.t_count(word), err, backend_id, UnitaryKey.of(u), n_approx)


def synth_rz_enum(theta: float, eps: float, gs: GateSet | None = None, budget: int = 24) -> SynthesisResult:
    """Minimum-T-count word within eps of Rz(theta)."""
    if eps < 1e-4:
        raise ValueError("eps below the enumeration ceiling 1e-4")
    gs = gs or clifford_t()
    sp = _speller(gs)
    toks, d = _rz_tokens(theta, eps, budget)
    return _result(sp.spell(toks), gs, G.rz(theta), "enum", int(d > EXACT_TOL))


# per-rotation tolerances tried in split mode, as fractions of the total eps
SPLIT_LADDER = (1.0, 1.1, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0)


def _euler_parts(u: np.ndarray):
    tables = get_tables()
    theta, phi, lam, _ = euler_zyz(u)
    pre = tables.cliff_keys[bytes(Q.keys(Q.to_quat(G.H @ G.SDG)))]
    post = tables.cliff_keys[bytes(Q.keys(Q.to_quat(G.S @ G.H)))]
    # Ry = (S H) Rz (H Sdg), so the middle rotation is wrapped in two Cliffords
    return ((lam, [], []), (theta, [pre], [post]), (phi, [], []))


def _u3_tokens(u: np.ndarray, eps: float, mode: str, budget: int) -> tuple[list[int], int]:
    if mode == "split":
        return _u3_tokens_split(u, eps, budget)
    toks: list[int] = []
    n = 0
    for ang, pre, post in _euler_parts(u):
        part, d = _rz_tokens(ang, eps, budget)
        # exactly representable rotations add no error, so they do not count toward K
        n += int(d > EXACT_TOL)
        toks += pre + part + post
    return get_tables().simplify(toks), n


def _ladder(ang: float, eps: float, budget: int) -> list[tuple[int, list[int]]]:
    out, seen = [], set()
    for f in SPLIT_LADDER:
        try:
            toks, d = _rz_tokens(ang, eps / f, budget)
        except BudgetExhausted:
            break
        if tuple(toks) not in seen:
            seen.add(tuple(toks))
            out.append((sum(1 for t in toks if t == STEP), toks))
        if d <= EXACT_TOL:
            break
    return out


def _u3_tokens_split(u: np.ndarray, eps: float, budget: int) -> tuple[list[int], int]:
    """Cheapest combination of per-rotation candidates whose composite error is <= eps.

    Looser per-rotation tolerances usually suffice because rotation errors
    rarely align.  If no combination works, u is rewritten as C v C^dag for
    the other Cliffords C, which changes the Euler angles to be synthesized.
    """
    tables = get_tables()
    target = Q.to_quat(u)
    for c in range(len(tables.cliff)):
        cq = tables.cliff[c]
        v = Q.to_matrix(Q.mul(Q.inv(cq), Q.mul(target, cq)))
        ci = tables.cliff_keys[bytes(Q.keys(Q.canon(Q.inv(cq))))]
        parts = _euler_parts(v)
        ladders = [_ladder(ang, eps, budget) for ang, _, _ in parts]
        combos = sorted(itertools.product(*[range(len(lad)) for lad in ladders]),
                        key=lambda ix: (sum(ladders[k][i][0] for k, i in enumerate(ix)), ix))
        for ix in combos:
            # time order: C^dag, then v, then C
            toks: list[int] = [ci]
            for (_, pre, post), lad, i in zip(parts, ladders, ix):
                toks += pre + lad[i][1] + post
            toks = tables.simplify(toks + [c])
            d = float(Q.dist(tables.tokens_quat(toks), target))
            if d <= eps:
                return toks, int(d > EXACT_TOL)
    raise BudgetExhausted(f"no Euler split reaches {eps} within T-count {budget} per rotation")


def synth_u3_clifford_t(
    u: np.ndarray,
    eps: float,
    backend: str = "enum",
    mode: str = "split",
    gs: GateSet | None = None,
    sk_depth: int = 2,
    budget: int = 24,
) -> SynthesisResult:
    """Euler angles, then one synthesis per rotation (Ry via Clifford conjugation)."""
    if mode not in U3_MODES:
        raise ConfigError(f"u3 mode {mode!r}")
    u = np.asarray(u, dtype=complex)
    if backend == "sk":
        return synth_1q_sk(u, sk_depth, gs or sk_default())
    if backend != "enum":
        raise ConfigError(f"unknown single-qubit backend {backend!r}")
    gs = gs or clifford_t()
    toks, n = _u3_tokens(u, eps, mode, budget)
    return _result(_speller(gs).spell(toks), gs, u, "enum", n)


def synth_1q_sk(u: np.ndarray, depth: int = 2, gs: GateSet | None = None, base_length: int = 14) -> SynthesisResult:
    gs = gs or sk_default()
    word = sk_word(np.asarray(u, dtype=complex), depth, get_net(gs, base_length))
    res = _result(word, gs, u, f"sk{depth}", 1)
    return res if res.error > EXACT_TOL else replace(res, n_approx=0)


def exact_clifford_t(u: np.ndarray, gs: GateSet | None = None, max_level: int = 12) -> SynthesisResult | None:
    """Minimal-T exact word when u is a Clifford+T unitary with T-count <= max_level."""
    gs = gs or clifford_t()
    toks = get_tables().exact_lookup(Q.canon(Q.to_quat(u)), max_level)
    if toks is None:
        return None
    return _result(_speller(gs).spell(toks), gs, u, "exact", 0)


class SynthBackend:
    """A = (two-qubit KAK, one-qubit synthesizer) with instrumented memoization."""

    def __init__(
        self,
        name: str = "kak+enum",
        epsilon: float = 0.01,
        u3_mode: str = "per_rotation",
        sk_depth: int = 2,
        exact_lookup: bool = True,
        gateset: GateSet | None = None,
        memo: MemoCache | None = None,
        budget: int = 24,
    ):
        if name not in ("kak+enum", "kak+sk"):
            raise ConfigError(f"unknown backend {name!r}")
        if u3_mode not in U3_MODES:
            raise ConfigError(f"u3 mode {u3_mode!r}")
        self.name = name
        self.epsilon = float(epsilon)
        self.u3_mode = u3_mode
        self.sk_depth = sk_depth
        self.exact_lookup = exact_lookup
        self.budget = budget
        if gateset is None:
            gateset = clifford_t() if name == "kak+enum" else sk_default()
        self.gateset = gateset
        self.memo = memo if memo is not None else MemoCache()
        self.calls: Counter = Counter()
        self._lock = threading.Lock()

    @property
    def config_id(self) -> str:
        s = repr((self.name, self.epsilon, self.u3_mode, self.sk_depth, self.exact_lookup,
                  self.gateset.name, self.budget))
        return hashlib.sha256(s.encode()).hexdigest()[:12]

    @property
    def target_kinds(self) -> frozenset:
        return frozenset(g.kind for g in self.gateset.generators) | {"CX"}

    def in_target(self, g: Gate) -> bool:
        if g.kind == "CX":
            return True
        return g.arity == 1 and self.gateset.contains(g)

    def _count(self, what: str):
        with self._lock:
            self.calls[what] += 1

    def synth_1q(self, m: np.ndarray) -> SynthesisResult:
        m = np.asarray(m, dtype=complex)
        key = (self.config_id, UnitaryKey.of(m))
        hit = self.memo.get("1q", key)
        if hit is not None:
            return hit
        self._count("1q")
        res = None
        if self.exact_lookup and self.name == "kak+enum":
            res = exact_clifford_t(m, self.gateset)
        if res is None:
            if self.name == "kak+enum":
                res = synth_u3_clifford_t(m, self.epsilon, "enum", self.u3_mode, self.gateset,
                                          budget=self.budget)
            else:
                res = synth_1q_sk(m, self.sk_depth, self.gateset)
        self.memo.put("1q", key, res)
        return res

    def synth_2q(self, m: np.ndarray) -> Circuit:
        """CX + U3 circuit on local qubits (0, 1); orientation canonicalized under SWAP."""
        m = np.asarray(m, dtype=complex)
        k_direct = UnitaryKey.of(m)
        swapped = G.SWAP @ m @ G.SWAP
        k_swap = UnitaryKey.of(swapped)
        flip = k_swap.data < k_direct.data
        key = (self.config_id, k_swap if flip else k_direct)
        out = self.memo.get("2q", key)
        if out is None:
            self._count("2q")
            out = kak_decompose(swapped if flip else m)
            self.memo.put("2q", key, out)
        if flip:
            out = Circuit(2, [g.on(*[1 - q for q in g.qubits]) for g in out.gates])
        return out

    def bound(self, k: int) -> float:
        return k * self.epsilon

    def describe(self) -> dict:
        return {"name": self.name, "epsilon": self.epsilon, "u3_mode": self.u3_mode,
                "sk_depth": self.sk_depth, "exact_lookup": self.exact_lookup,
                "gateset": self.gateset.name}


def make_backend(name: str = "kak+enum", epsilon: float = 0.01, **kw) -> SynthBackend:
    return SynthBackend(name, epsilon, **kw)
