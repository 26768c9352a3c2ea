"""Exhaustive plan enumeration, optionally reduced by qubit-relabeling symmetries."""
from __future__ import annotations

from ..circuit import Circuit, Gate
from ..errors import CeilingExceeded
from ..gates import SYMMETRIC_2Q
from ..merge import normalize_plan
from .evaluator import PlanEvaluator, SearchOutcome, outcome


def _gate_key(g: Gate, perm) -> tuple:
    qs = tuple(perm[q] for q in g.qubits)
    if g.kind in SYMMETRIC_2Q:
        qs = tuple(sorted(qs))
    raw = None if g.raw is None else bytes(g.raw.round(12).tobytes())
    return (qs, g.kind, tuple(round(p, 12) for p in g.params), raw)


def layered_form(c: Circuit, perm=None) -> tuple:
    """ASAP layers with gates sorted inside each layer, after relabeling by perm."""
    perm = perm or list(range(c.n_qubits))
    depth = [0] * c.n_qubits
    layers: list[list] = []
    for g in c.gates:
        d = max(depth[q] for q in g.qubits)
        for q in g.qubits:
            depth[q] = d + 1
        while len(layers) <= d:
            layers.append([])
        layers[d].append(_gate_key(g, perm))
    return tuple(tuple(sorted(layer, key=repr)) for layer in layers)


def circuit_symmetries(c: Circuit) -> list[tuple[int, ...]]:
    """Non-trivial cyclic shifts and reflections of the qubit line that fix c."""
    n = c.n_qubits
    ref = layered_form(c)
    out = []
    for s in range(n):
        for flip in (False, True):
            perm = tuple((((n - 1 - q) if flip else q) + s) % n for q in range(n))
            if perm == tuple(range(n)):
                continue
            if layered_form(c, perm) == ref:
                out.append(perm)
    return out


def _image(plan, perm):
    return tuple(tuple(sorted((perm[i], perm[j]))) for i, j in plan)


def brute_force_search(
    c: Circuit,
    backend,
    max_len: int,
    pairs=None,
    symmetry: bool = False,
    ceiling: float = 1e6,
    merge_1q: bool = True,
    evaluator: PlanEvaluator | None = None,
) -> SearchOutcome:
    """Global optimum over all plans of length <= max_len.

    Immediate repeats are skipped because merging the same pair twice in a
    row is idempotent.  With symmetry on, only plans that are lexicographically
    minimal within their orbit under the detected symmetries are evaluated.
    """
    ev = evaluator or PlanEvaluator(c, backend, merge_1q)
    pairs = sorted(normalize_plan(pairs)) if pairs is not None else ev.candidate_pairs(())
    if len(pairs) ** max_len > ceiling:
        raise CeilingExceeded(f"{len(pairs)}^{max_len} plans exceed the ceiling {ceiling:g}")
    syms = circuit_symmetries(c) if symmetry else []
    best = [(ev.t_count(()), 0, ())]
    visited = [1]

    def canonical(plan) -> bool:
        return all(_image(plan, p) >= plan for p in syms)

    def dfs(plan):
        if len(plan) == max_len:
            return
        for p in pairs:
            if plan and plan[-1] == p:
                continue
            nxt = plan + (p,)
            if syms and not canonical(nxt):
                continue
            visited[0] += 1
            cand = (ev.t_count(nxt), len(nxt), nxt)
            if cand < best[0]:
                best[0] = cand
            dfs(nxt)

    dfs(())
    return outcome(ev, best[0][2], (), visited[0])
