"""Unitary-preserving merge actions and plan application.

Runs are positional: a run on qubit i (or pair i, j) is defined over the
linear gate list exactly as the buffer/flush procedure scans it.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from . import gates as G
from .circuit import Circuit, Gate, is_identity_up_to_phase, u2q
from .errors import EqualIndices, IndexOutOfRange

Pair = tuple[int, int]
Plan = tuple[Pair, ...]


def normalize_plan(plan: Iterable[Sequence[int]]) -> Plan:
    out = []
    for p in plan:
        i, j = int(p[0]), int(p[1])
        if i == j:
            raise EqualIndices(f"merge pair ({i}, {j})")
        out.append((min(i, j), max(i, j)))
    return tuple(out)


def euler_u3_params(m: np.ndarray) -> tuple[float, float, float]:
    # local import keeps merge usable without the synth package loaded
    from .synth.euler import euler_zyz

    theta, phi, lam, _ = euler_zyz(m)
    return theta, phi, lam


def one_qubit_merge(c: Circuit, i: int) -> Circuit:
    if not 0 <= i < c.n_qubits:
        raise IndexOutOfRange(f"qubit {i}")
    out: list[Gate] = []
    buf: list[Gate] = []

    def flush():
        if not buf:
            return
        if len(buf) == 1:
            if not is_identity_up_to_phase(buf[0].matrix):
                out.append(buf[0])
        else:
            u = np.eye(2, dtype=complex)
            for g in buf:
                u = g.matrix @ u
            if not is_identity_up_to_phase(u):
                out.append(Gate("U3", (i,), euler_u3_params(u)))
        buf.clear()

    for g in c.gates:
        if g.arity == 1 and g.qubits[0] == i:
            buf.append(g)
        elif i in g.qubits or g.arity > 1:
            flush()
            out.append(g)
        else:
            out.append(g)
    flush()
    return c.with_gates(out)


def embed_in_pair(g: Gate, i: int, j: int) -> np.ndarray:
    """4x4 matrix of g in the local basis of (i, j), i being local bit 0."""
    if g.arity == 1:
        return G.on_first(g.matrix) if g.qubits[0] == i else G.on_second(g.matrix)
    if g.qubits == (i, j):
        return np.asarray(g.matrix)
    return G.SWAP @ g.matrix @ G.SWAP


def _is_pair_block(g: Gate, pair: set) -> bool:
    return g.arity == 2 and set(g.qubits) == pair


def _absorb(gates: list[Gate], i: int, j: int) -> list[Gate]:
    pair = {i, j}
    gates = list(gates)
    for q in (i, j):
        dead = [False] * len(gates)
        # forward: attach to the next gate on wire q if it is a pair block
        nxt = None
        for k in range(len(gates) - 1, -1, -1):
            g = gates[k]
            if q not in g.qubits:
                continue
            if g.arity == 1 and nxt is not None:
                b = gates[nxt]
                gates[nxt] = u2q(embed_in_pair(b, i, j) @ embed_in_pair(g, i, j), i, j)
                dead[k] = True
            else:
                nxt = k if _is_pair_block(g, pair) else None
        # backward: leftovers attach to the previous pair block on wire q
        prv = None
        for k in range(len(gates)):
            g = gates[k]
            if dead[k] or q not in g.qubits:
                continue
            if g.arity == 1 and prv is not None:
                b = gates[prv]
                gates[prv] = u2q(embed_in_pair(g, i, j) @ embed_in_pair(b, i, j), i, j)
                dead[k] = True
            else:
                prv = k if _is_pair_block(g, pair) else None
        gates = [g for g, d in zip(gates, dead) if not d]
    return [g for g in gates if not (g.kind == "U2Q" and is_identity_up_to_phase(g.matrix))]


def two_qubit_merge(c: Circuit, i: int, j: int) -> Circuit:
    if i == j:
        raise EqualIndices(f"merge pair ({i}, {j})")
    for q in (i, j):
        if not 0 <= q < c.n_qubits:
            raise IndexOutOfRange(f"qubit {q}")
    i, j = min(i, j), max(i, j)
    pair = {i, j}
    out: list[Gate] = []
    buf: list[Gate] = []

    def flush():
        if not buf:
            return
        if len(buf) == 1 or all(g.arity == 1 for g in buf):
            out.extend(buf)
        else:
            u = np.eye(4, dtype=complex)
            for g in buf:
                u = embed_in_pair(g, i, j) @ u
            if not is_identity_up_to_phase(u):
                out.append(u2q(u, i, j))
        buf.clear()

    for g in c.gates:
        touched = set(g.qubits)
        if touched <= pair:
            buf.append(g)
        elif touched & pair:
            flush()
            out.append(g)
        else:
            out.append(g)
    flush()
    return c.with_gates(_absorb(out, i, j))


def apply_plan(c: Circuit, plan: Iterable[Sequence[int]]) -> Circuit:
    for i, j in normalize_plan(plan):
        c = two_qubit_merge(c, i, j)
    return c


def mergeable_count(c: Circuit, i: int, j: int) -> int:
    """Two-qubit gates on (i, j) that a merge(i, j) would fold together.

    Counts the two-qubit gates inside buffer runs holding more than one gate.
    """
    i, j = min(i, j), max(i, j)
    pair = {i, j}
    total = 0
    run: list[Gate] = []

    def close():
        nonlocal total
        if len(run) > 1:
            total += sum(1 for g in run if g.arity == 2)
        run.clear()

    for g in c.gates:
        touched = set(g.qubits)
        if touched <= pair:
            run.append(g)
        elif touched & pair:
            close()
    close()
    return total
