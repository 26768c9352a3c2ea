"""Finite single-qubit gate sets used as synthesis targets."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..circuit import Circuit, Gate
from ..errors import PresynthError
from . import quat as Q


@dataclass(frozen=True)
class GateSet:
    name: str
    generators: tuple[Gate, ...]
    t_weights: tuple[int, ...]
    inverses: tuple[tuple[int, ...], ...] = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.t_weights) != len(self.generators):
            raise PresynthError("one weight per generator")
        if not self.inverses:
            object.__setattr__(self, "inverses", self._find_inverses())

    @property
    def quats(self) -> np.ndarray:
        return Q.to_quat(np.array([g.matrix for g in self.generators]))

    def _find_inverses(self, max_len: int = 8) -> tuple[tuple[int, ...], ...]:
        """Shortest word for each generator's inverse, found breadth-first."""
        gq = self.quats
        targets = {bytes(Q.keys(Q.inv(gq[i]))): i for i in range(len(gq))}
        found: dict[int, tuple[int, ...]] = {}
        frontier = [((), np.array([1.0, 0, 0, 0]))]
        seen = {bytes(Q.keys(frontier[0][1]))}
        for _ in range(max_len):
            nxt = []
            for word, q in frontier:
                for g in range(len(gq)):
                    w = word + (g,)
                    p = Q.mul(gq[g], q)
                    k = bytes(Q.keys(p))
                    for t, i in targets.items():
                        if t == k and i not in found:
                            found[i] = w
                    if k not in seen:
                        seen.add(k)
                        nxt.append((w, p))
            frontier = nxt
            if len(found) == len(gq):
                break
        if len(found) != len(gq):
            raise PresynthError(f"gate set {self.name} is not closed under inverse")
        return tuple(found[i] for i in range(len(gq)))

    def inverse_word(self, word: tuple[int, ...]) -> tuple[int, ...]:
        out: list[int] = []
        for g in reversed(word):
            out.extend(self.inverses[g])
        return tuple(out)

    def circuit(self, word, qubit: int = 0, n_qubits: int = 1) -> Circuit:
        return Circuit(n_qubits, [self.generators[g].on(qubit) for g in word])

    def t_count(self, word) -> int:
        return sum(self.t_weights[g] for g in word)

    def contains(self, g: Gate) -> bool:
        return any(g.kind == h.kind and np.allclose(g.params, h.params) for h in self.generators)


def clifford_t() -> GateSet:
    names = ["H", "S", "Sdg", "X", "Y", "Z", "T", "Tdg"]
    return GateSet(
        "clifford+t",
        tuple(Gate(k, (0,)) for k in names),
        tuple(1 if k in ("T", "Tdg") else 0 for k in names),
    )


def sk_default() -> GateSet:
    return GateSet("h,t,tdg", (Gate("H", (0,)), Gate("T", (0,)), Gate("Tdg", (0,))), (0, 1, 1))


def matchgate_image() -> GateSet:
    """Images of {Rxx(pi/2), S-hat, T-hat} and inverses under the su(2) map."""
    q = np.pi / 4
    gens = (
        Gate("Rx", (0,), (2 * q,)),
        Gate("Rx", (0,), (-2 * q,)),
        Gate("Rz", (0,), (2 * q,)),
        Gate("Rz", (0,), (-2 * q,)),
        Gate("Rz", (0,), (q,)),
        Gate("Rz", (0,), (-q,)),
    )
    return GateSet("matchgate-image", gens, (0, 0, 0, 0, 1, 1))


CLIFFORD_T_KINDS = frozenset({"H", "S", "Sdg", "X", "Y", "Z", "T", "Tdg", "CX"})
