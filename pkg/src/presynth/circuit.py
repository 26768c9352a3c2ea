"""Gate and circuit types, dense simulation and the phase-invariant distance."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import gates as G
from .errors import (
    DimMismatch,
    EqualIndices,
    IndexOutOfRange,
    PresynthError,
    WidthExceeded,
)

SIM_LIMIT = 12
UNITARY_TOL = 1e-10


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    d = m.shape[0]
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(d))) <= tol)


@dataclass(frozen=True, eq=False)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    raw: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in G.ARITY:
            raise PresynthError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        arity, n_params = G.ARITY[self.kind]
        if len(self.qubits) != arity:
            raise DimMismatch(f"{self.kind} acts on {arity} qubits, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise EqualIndices(f"repeated qubit in {self.qubits}")
        if min(self.qubits) < 0:
            raise IndexOutOfRange(f"negative qubit index in {self.qubits}")
        if n_params is None:
            if self.raw is None:
                raise DimMismatch(f"{self.kind} needs a matrix")
            m = np.array(self.raw, dtype=complex)
            if m.shape != (2**arity, 2**arity):
                raise DimMismatch(f"{self.kind} matrix has shape {m.shape}")
            if not is_unitary(m):
                raise PresynthError(f"{self.kind} matrix is not unitary")
            m.setflags(write=False)
            object.__setattr__(self, "raw", m)
        elif len(self.params) != n_params:
            raise DimMismatch(f"{self.kind} takes {n_params} params")

    @cached_property
    def matrix(self) -> np.ndarray:
        if self.raw is not None:
            return self.raw
        if self.kind in G.FIXED:
            m = G.FIXED[self.kind].copy()
        else:
            m = G.PARAMETRIC[self.kind](*self.params)
        m.setflags(write=False)
        return m

    @property
    def arity(self) -> int:
        return len(self.qubits)

    def on(self, *qubits: int) -> "Gate":
        """Same gate relabeled onto other qubits."""
        return Gate(self.kind, tuple(qubits), self.params, self.raw)

    def _key(self):
        m = None if self.raw is None else self.raw.tobytes()
        return (self.kind, self.qubits, self.params, m)

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        q = ",".join(map(str, self.qubits))
        if self.params:
            p = ",".join(f"{x:.6g}" for x in self.params)
            return f"{self.kind}({p})@{q}"
        return f"{self.kind}@{q}"

    def to_json(self) -> dict:
        d = {"kind": self.kind, "qubits": list(self.qubits), "params": list(self.params)}
        if self.raw is not None:
            d["matrix"] = [[[float(z.real), float(z.imag)] for z in row] for row in self.raw]
        return d

    @staticmethod
    def from_json(d: dict) -> "Gate":
        raw = None
        if "matrix" in d and d["matrix"] is not None:
            raw = np.array([[complex(a, b) for a, b in row] for row in d["matrix"]])
        return Gate(d["kind"], tuple(d["qubits"]), tuple(d.get("params", ())), raw)


def u1q(m: np.ndarray, q: int) -> Gate:
    return Gate("U1Q", (q,), (), m)


def u2q(m: np.ndarray, a: int, b: int) -> Gate:
    return Gate("U2Q", (a, b), (), m)


class Circuit:
    """Immutable ordered gate list on n qubits."""

    __slots__ = ("n_qubits", "gates", "_fp")

    def __init__(self, n_qubits: int, gates: Iterable[Gate] = ()):
        gates = tuple(gates)
        for g in gates:
            if max(g.qubits) >= n_qubits:
                raise IndexOutOfRange(f"{g!r} outside {n_qubits} qubits")
        object.__setattr__(self, "n_qubits", int(n_qubits))
        object.__setattr__(self, "gates", gates)
        object.__setattr__(self, "_fp", None)

    def __setattr__(self, name, value):
        raise AttributeError("Circuit is immutable")

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __getitem__(self, i):
        return self.gates[i]

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self.gates == other.gates

    def __hash__(self):
        return hash((self.n_qubits, self.gates))

    def __repr__(self):
        return f"Circuit({self.n_qubits}, {list(self.gates)!r})"

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise DimMismatch("concatenating circuits of different width")
        return Circuit(self.n_qubits, self.gates + other.gates)

    def with_gates(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.n_qubits, gates)

    def to_json(self) -> dict:
        return {"n_qubits": self.n_qubits, "gates": [g.to_json() for g in self.gates]}

    @staticmethod
    def from_json(d: dict) -> "Circuit":
        return Circuit(d["n_qubits"], [Gate.from_json(g) for g in d["gates"]])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @staticmethod
    def loads(text: str) -> "Circuit":
        return Circuit.from_json(json.loads(text))

    def fingerprint(self) -> str:
        if self._fp is None:
            h = hashlib.sha256(self.dumps().encode()).hexdigest()
            object.__setattr__(self, "_fp", h)
        return self._fp


def apply_matrix(state: np.ndarray, m: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Left-multiply a (2**n, cols) array by gate m acting on `qubits`."""
    cols = state.shape[1]
    k = len(qubits)
    t = state.reshape([2] * n + [cols])
    # local index bit_0 + 2 bit_1 -> tensor axes ordered (bit_{k-1}, ..., bit_0)
    axes = [n - 1 - q for q in reversed(qubits)]
    g = m.reshape([2] * (2 * k))
    t = np.tensordot(g, t, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the gate's output axes first; move them back
    t = np.moveaxis(t, list(range(k)), axes)
    return t.reshape(2**n, cols)


def compute_unitary(c: Circuit, limit: int = SIM_LIMIT) -> np.ndarray:
    n = c.n_qubits
    if n > limit:
        raise WidthExceeded(f"{n} qubits exceeds simulation limit {limit}")
    u = np.eye(2**n, dtype=complex)
    for g in c.gates:
        u = apply_matrix(u, g.matrix, g.qubits, n)
    return u


def distance(u: np.ndarray, v: np.ndarray, metric: str = "spectral") -> float:
    """min over phase of ||u - e^{i phi} v||.

    For unitaries the eigenvalues of v^dag u lie on the circle; the optimal
    phase sits at the midpoint of the shortest arc covering them all.
    """
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise DimMismatch(f"shapes {u.shape} and {v.shape}")
    w = v.conj().T @ u
    if metric == "trace":
        d = u.shape[0]
        return float(np.sqrt(max(0.0, 1.0 - abs(np.trace(w)) / d)))
    if metric != "spectral":
        raise ValueError(metric)
    ang = np.sort(np.angle(np.linalg.eigvals(w)))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    arc = 2 * np.pi - gaps.max()
    return float(2 * np.sin(max(arc, 0.0) / 4))


def is_identity_up_to_phase(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    tr = np.trace(m)
    if abs(tr) < 0.5 * m.shape[0]:
        return False
    ph = tr / abs(tr)
    return bool(np.max(np.abs(m - ph * np.eye(m.shape[0]))) <= tol)


def remove_identities(c: Circuit, tol: float = UNITARY_TOL) -> Circuit:
    return c.with_gates(g for g in c.gates if not is_identity_up_to_phase(g.matrix, tol))


def is_t_like(g: Gate, matchgate: bool = False) -> bool:
    if g.kind in ("T", "Tdg"):
        return True
    if matchgate and g.kind == "Rz":
        a = np.mod(g.params[0], 2 * np.pi)
        return bool(min(abs(a - np.pi / 4), abs(a - 7 * np.pi / 4)) < 1e-9)
    return False


def t_count(c: Circuit, matchgate: bool = False) -> int:
    return sum(1 for g in c.gates if is_t_like(g, matchgate))


def t_count_per_qubit(c: Circuit, matchgate: bool = False) -> np.ndarray:
    out = np.zeros(c.n_qubits, dtype=int)
    for g in c.gates:
        if is_t_like(g, matchgate):
            out[g.qubits[0]] += 1
    return out


def interacting_pairs(c: Circuit) -> list[tuple[int, int]]:
    """Sorted pairs sharing at least one two-qubit gate."""
    return sorted({tuple(sorted(g.qubits)) for g in c.gates if g.arity == 2})
