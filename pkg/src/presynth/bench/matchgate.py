"""Matchgate compilation through the su(2) generated by X_e X_o and Z_e.

On a pair (e, o) every product of Rxx(θ) and Rz(θ) on e has the form
U = V (x) |+><+|_o + Z V Z (x) |-><-|_o, so V = <+|_o U |+>_o is a faithful
SU(2) image.  Rxx(θ) maps to Rx(θ) and Rz(θ) on e to Rz(θ).
"""
from __future__ import annotations

import hashlib
from collections import Counter

import numpy as np

from .. import gates as G
from ..circuit import Circuit, Gate, interacting_pairs, is_identity_up_to_phase, remove_identities, t_count
from ..errors import IndexOutOfRange, MixedEndpoints, PresynthError
from ..merge import normalize_plan
from ..synth.backend import exact_clifford_t, synth_u3_clifford_t
from ..synth.gateset import matchgate_image
from ..synth.memo import MemoCache
from ..synth.result import UnitaryKey
from ..synthesize import PipelineResult

_PLUS = np.array([1.0, 1.0]) / np.sqrt(2)
# image generator index -> (kind, param) of the matchgate it lifts to
_LIFT = (("Rxx", np.pi / 2), ("Rxx", -np.pi / 2), ("S", None), ("Sdg", None), ("T", None), ("Tdg", None))


def is_matchgate_gate(g: Gate) -> bool:
    if g.kind == "Rz" or g.kind in ("S", "Sdg", "T", "Tdg"):
        return True
    if g.kind in ("Rxx", "U2Q"):
        return abs(g.qubits[0] - g.qubits[1]) == 1
    return False


def is_native(g: Gate) -> bool:
    """Gate already in {Rxx(pi/2), S-hat, T-hat} and inverses."""
    if g.kind in ("S", "Sdg", "T", "Tdg"):
        return True
    return g.kind == "Rxx" and abs(abs(g.params[0]) - np.pi / 2) < 1e-12


def _plus_iso(o: int) -> np.ndarray:
    col = _PLUS[:, None]
    return np.kron(col, G.I2) if o == 1 else np.kron(G.I2, col)


def phi_of_matrix(m: np.ndarray, e: int) -> np.ndarray:
    """<+|_o m |+>_o with e, o the local bit positions (0 or 1) of the pair."""
    v = _plus_iso(1 - e)
    return v.conj().T @ m @ v


def lift(v: np.ndarray, e: int) -> np.ndarray:
    """Inverse of phi_of_matrix on the image: V (x) P+ + Z V Z (x) P- in local order."""
    plus = np.outer(_PLUS, _PLUS)
    minus = G.I2 - plus
    zvz = G.Z @ v @ G.Z
    if e == 0:
        return np.kron(plus, v) + np.kron(minus, zvz)
    return np.kron(v, plus) + np.kron(zvz, minus)


def endpoints_of(m: np.ndarray, tol: float = 1e-9) -> list[int]:
    """Local endpoints e for which m lies in the su(2) image."""
    return [e for e in (0, 1) if np.allclose(lift(phi_of_matrix(m, e), e), m, atol=tol)]


def _local(g: Gate, e_q: int, o_q: int) -> np.ndarray:
    """4x4 of g in the (e_q, o_q) local basis, e_q being bit 0."""
    if g.arity == 1:
        return G.on_first(g.matrix) if g.qubits[0] == e_q else G.on_second(g.matrix)
    if g.qubits == (e_q, o_q):
        return np.asarray(g.matrix)
    return G.SWAP @ g.matrix @ G.SWAP


def _endpoint_req(g: Gate) -> set[int] | None:
    """Global qubits that may serve as endpoint; None means unconstrained."""
    if g.arity == 1:
        return {g.qubits[0]}
    if g.kind == "Rxx":
        return None
    if g.kind == "U2Q":
        es = endpoints_of(g.matrix)
        if len(es) == 2:
            return None
        if not es:
            raise PresynthError(f"{g} is not in a single su(2) block")
        return {g.qubits[es[0]]}
    raise PresynthError(f"{g.kind} is not a matchgate")


def phi_map(run, pair=None, endpoint: int | None = None) -> np.ndarray:
    """SU(2) image of a run of matchgates on one pair."""
    run = list(run)
    if pair is None:
        two = [g for g in run if g.arity == 2]
        if not two:
            raise PresynthError("cannot infer the pair of a run without two-qubit gates")
        pair = tuple(sorted(two[0].qubits))
    ends: set[int] = set()
    for g in run:
        if not set(g.qubits) <= set(pair):
            raise PresynthError(f"{g} is off the pair {pair}")
        r = _endpoint_req(g)
        if r is not None:
            ends = ends | r if not ends else (ends & r or ends | r)
    if len(ends) > 1:
        raise MixedEndpoints(f"run uses Z on both {pair}")
    if endpoint is None:
        endpoint = next(iter(ends)) if ends else pair[0]
    elif ends and endpoint not in ends:
        raise MixedEndpoints(f"run is not confined to endpoint {endpoint}")
    other = pair[1] if endpoint == pair[0] else pair[0]
    m = np.eye(4, dtype=complex)
    for g in run:
        m = _local(g, endpoint, other) @ m
    return phi_of_matrix(m, 0)


def phi_inverse(word, pair, endpoint: int, n_qubits: int | None = None) -> Circuit:
    """Lift a word over the image gate set back to matchgates on pair."""
    if endpoint not in pair:
        raise IndexOutOfRange(f"endpoint {endpoint} not in {pair}")
    other = pair[1] if endpoint == pair[0] else pair[0]
    n = n_qubits if n_qubits is not None else max(pair) + 1
    out = []
    for k in word:
        kind, p = _LIFT[k]
        if kind == "Rxx":
            out.append(Gate("Rxx", tuple(sorted((endpoint, other))), (p,)))
        else:
            out.append(Gate(kind, (endpoint,)))
    return Circuit(n, out)


def matchgate_merge(c: Circuit, i: int, j: int) -> Circuit:
    """Positional merge on a neighbouring pair, keeping each run's Z rotations on one endpoint."""
    i, j = min(i, j), max(i, j)
    if j - i != 1:
        raise IndexOutOfRange(f"matchgate merge needs adjacent qubits, got ({i}, {j})")
    pair = {i, j}
    out: list[Gate] = []
    buf: list[Gate] = []
    ends: set[int] = set()

    def flush():
        if len(buf) > 1 and any(g.arity == 2 for g in buf):
            e = next(iter(ends)) if ends else i
            o = j if e == i else i
            m = np.eye(4, dtype=complex)
            for g in buf:
                m = _local(g, e, o) @ m
            if not is_identity_up_to_phase(m):
                out.append(Gate("U2Q", (e, o), (), m))
        else:
            out.extend(buf)
        buf.clear()
        ends.clear()

    for g in c.gates:
        qs = set(g.qubits)
        if qs <= pair:
            r = _endpoint_req(g)
            if r is not None and ends and not (ends & r):
                flush()
            if r is not None:
                ends.update(r if not ends else ends & r)
            buf.append(g)
        elif qs & pair:
            flush()
            out.append(g)
        else:
            out.append(g)
    flush()
    return c.with_gates(out)


def merge_z_runs(c: Circuit, q: int) -> Circuit:
    """Sum consecutive Z rotations on q; flushes on any multi-qubit gate."""
    out: list[Gate] = []
    acc: list[Gate] = []

    def flush():
        if len(acc) == 1:
            out.append(acc[0])
        elif acc:
            th = sum(g.params[0] for g in acc)
            g = Gate("Rz", (q,), (float(np.mod(th + np.pi, 4 * np.pi) - np.pi),))
            if not is_identity_up_to_phase(g.matrix):
                out.append(g)
        acc.clear()

    for g in c.gates:
        if g.kind == "Rz" and g.qubits[0] == q:
            acc.append(g)
        else:
            if q in g.qubits or g.arity > 1:
                flush()
            out.append(g)
    flush()
    return c.with_gates(out)


def _neighbour(q: int, n: int) -> int:
    return q + 1 if q + 1 < n else q - 1


class MatchgatePipeline:
    """Plan actions are matchgate merges; synthesis goes through the SU(2) image."""

    matchgate = True

    def __init__(self, epsilon: float = 0.01, u3_mode: str = "per_rotation", merge_1q: bool = True,
                 exact_lookup: bool = True, memo: MemoCache | None = None):
        self.epsilon = float(epsilon)
        self.u3_mode = u3_mode
        self.merge_1q = merge_1q
        self.exact_lookup = exact_lookup
        self.gateset = matchgate_image()
        self.memo = memo if memo is not None else MemoCache()
        self.calls: Counter = Counter()

    @property
    def config_id(self) -> str:
        s = repr(("matchgate", self.epsilon, self.u3_mode, self.merge_1q, self.exact_lookup))
        return "mg:" + hashlib.sha256(s.encode()).hexdigest()[:12]

    def synth_su2(self, v: np.ndarray):
        key = (self.config_id, UnitaryKey.of(v))
        res = self.memo.get("1q", key)
        if res is None:
            self.calls["1q"] += 1
            res = exact_clifford_t(v, self.gateset) if self.exact_lookup else None
            if res is None:
                res = synth_u3_clifford_t(v, self.epsilon, "enum", self.u3_mode, self.gateset)
            self.memo.put("1q", key, res)
        return res

    def apply(self, c: Circuit, plan) -> Circuit:
        c = remove_identities(c)
        for i, j in normalize_plan(plan):
            c = matchgate_merge(c, i, j)
        return c

    def run(self, c: Circuit, plan=()) -> PipelineResult:
        merged = self.apply(c, plan)
        cur = merged
        if self.merge_1q:
            for q in range(cur.n_qubits):
                cur = merge_z_runs(cur, q)
        n = cur.n_qubits
        out: list[Gate] = []
        k = 0
        for g in cur.gates:
            if is_native(g):
                out.append(g)
                continue
            if g.arity == 1:
                if g.kind != "Rz":
                    raise PresynthError(f"{g.kind} is not a matchgate")
                e, pair = g.qubits[0], tuple(sorted((g.qubits[0], _neighbour(g.qubits[0], n))))
                v = g.matrix
            else:
                req = _endpoint_req(g)
                e = min(g.qubits) if req is None else next(iter(req))
                pair = tuple(sorted(g.qubits))
                v = phi_map([g], pair, e)
            res = self.synth_su2(v)
            k += res.n_approx
            word = [self.gateset.generators.index(h) for h in res.word.gates]
            out.extend(phi_inverse(word, pair, e, n).gates)
        final = cur.with_gates(out)
        return PipelineResult(final, t_count(final), k, merged)

    def pairs(self, c: Circuit) -> list[tuple[int, int]]:
        return interacting_pairs(c)

    def mergeable(self, c: Circuit, i: int, j: int) -> int:
        """Two-qubit gates on (i, j) that the merge would fold into a larger block."""
        mine = [g for g in c.gates if g.arity == 2 and set(g.qubits) == {i, j}]
        kept = {id(g) for g in matchgate_merge(c, i, j).gates}
        return sum(1 for g in mine if id(g) not in kept)


def synth_matchgate(c: Circuit, epsilon: float = 0.01, plan=(), pipeline: MatchgatePipeline | None = None):
    """(synthesized circuit over {Rxx(pi/2), S-hat, T-hat}, T-count)."""
    for g in c.gates:
        if not is_matchgate_gate(g):
            raise PresynthError(f"{g} is not a matchgate")
    p = pipeline or MatchgatePipeline(epsilon)
    r = p.run(c, plan)
    return r.circuit, r.t_count
