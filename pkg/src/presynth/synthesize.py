"""The merge-and-synthesize pipeline: remove identities, apply a plan, synthesize."""
from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, Gate, interacting_pairs, remove_identities, t_count
from .merge import apply_plan, mergeable_count, normalize_plan, one_qubit_merge


@dataclass(frozen=True)
class PipelineResult:
    circuit: Circuit
    t_count: int
    # synthesized local blocks: one per ε-bounded approximation plus one per KAK block
    k_blocks: int
    merged: Circuit


def relabel(sub: Circuit, qubits) -> list[Gate]:
    return [g.on(*[qubits[q] for q in g.qubits]) for g in sub.gates]


def synthesize_detail(c: Circuit, backend, plan=(), merge_1q: bool = True) -> PipelineResult:
    merged = apply_plan(remove_identities(c), normalize_plan(plan))
    k = 0
    stage: list[Gate] = []
    for g in merged.gates:
        if g.arity == 2 and g.kind != "CX":
            stage.extend(relabel(backend.synth_2q(g.matrix), g.qubits))
            k += 1
        else:
            stage.append(g)
    cur = merged.with_gates(stage)
    if merge_1q:
        for q in range(cur.n_qubits):
            cur = one_qubit_merge(cur, q)
    out: list[Gate] = []
    for g in cur.gates:
        if g.arity == 1 and not backend.in_target(g):
            res = backend.synth_1q(g.matrix)
            out.extend(relabel(res.word, g.qubits))
            k += res.n_approx
        else:
            out.append(g)
    final = cur.with_gates(out)
    return PipelineResult(final, t_count(final), k, merged)


def merge_and_synthesize(c: Circuit, backend, plan=(), merge_1q: bool = True) -> tuple[Circuit, int]:
    r = synthesize_detail(c, backend, plan, merge_1q)
    return r.circuit, r.t_count


class StandardPipeline:
    """Clifford+T pipeline bound to one backend; the unit plan search works against."""

    matchgate = False

    def __init__(self, backend, merge_1q: bool = True):
        self.backend = backend
        self.merge_1q = merge_1q

    @property
    def config_id(self) -> str:
        return f"std:{self.backend.config_id}:{int(self.merge_1q)}"

    @property
    def memo(self):
        return self.backend.memo

    def apply(self, c: Circuit, plan) -> Circuit:
        return apply_plan(remove_identities(c), plan)

    def run(self, c: Circuit, plan) -> PipelineResult:
        return synthesize_detail(c, self.backend, plan, self.merge_1q)

    def pairs(self, c: Circuit) -> list[tuple[int, int]]:
        return interacting_pairs(c)

    def mergeable(self, c: Circuit, i: int, j: int) -> int:
        return mergeable_count(c, i, j)
