"""Two-qubit KAK decomposition into CX + U3 with a minimal CNOT count.

u = g * K1 . Can(a, b, c) . K2 with Can(a, b, c) = exp(i(a XX + b YY + c ZZ))
and K1, K2 local.  Coordinates are moved into the Weyl chamber
pi/4 >= a >= b >= |c| by local moves so the CNOT class can be read off.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import gates as G
from ..circuit import Circuit, Gate, compute_unitary, distance, is_identity_up_to_phase
from ..errors import DimMismatch, NumericalInstability
from .euler import euler_zyz

_B = np.array(
    [[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]], dtype=complex
) / np.sqrt(2)
_PAULI = [np.kron(G.X, G.X), np.kron(G.Y, G.Y), np.kron(G.Z, G.Z)]
# diagonal of XX, YY, ZZ in the magic basis
_DIAG = np.real(np.array([np.diag(_B.conj().T @ p @ _B) for p in _PAULI])).T
_I2 = np.eye(2)
# Pauli on one qubit flipping the signs of the two listed coordinates
_FLIP = {(0, 1): G.Z, (1, 2): G.X, (0, 2): G.Y}
# V with V P_k V^dag = +-P_l and V P_l V^dag = +-P_k
_SWAPPER = {(0, 1): G.S, (1, 2): G.rx(np.pi / 2), (0, 2): G.H}
CLASS_TOL = 1e-9
KAK_TOL = 1e-8


def canonical_gate(a: float, b: float, c: float) -> np.ndarray:
    w, v = np.linalg.eigh(a * _PAULI[0] + b * _PAULI[1] + c * _PAULI[2])
    return (v * np.exp(1j * w)) @ v.conj().T


@dataclass
class KAK:
    phase: complex
    k1: np.ndarray
    coords: np.ndarray
    k2: np.ndarray

    def matrix(self) -> np.ndarray:
        return self.phase * self.k1 @ canonical_gate(*self.coords) @ self.k2


def _raw_kak(u: np.ndarray) -> KAK:
    det = np.linalg.det(u)
    su = u / det ** 0.25
    ub = _B.conj().T @ su @ _B
    m = ub.T @ ub
    for r in (0.6180339887, 1.3247179572, 0.2879672506, 2.2360679775, 0.0):
        _, p = np.linalg.eigh(m.real + r * m.imag)
        d2 = np.diag(p.T @ m @ p)
        if np.max(np.abs(p.T @ m @ p - np.diag(d2))) < 1e-9:
            break
    else:
        raise NumericalInstability("could not diagonalize the magic-basis product")
    if np.linalg.det(p) < 0:
        p[:, 0] = -p[:, 0]
    d = np.exp(0.5j * np.angle(d2))
    if np.real(np.prod(d)) < 0:
        d[0] = -d[0]
    o1 = ub @ p @ np.diag(d.conj())
    o2 = p.T
    h = np.angle(d)
    h[-1] -= np.sum(h)  # sum of phases is 0 mod 2pi; make it exact
    coords = np.linalg.lstsq(_DIAG, h, rcond=None)[0]
    k1 = _B @ o1 @ _B.conj().T
    k2 = _B @ o2 @ _B.conj().T
    kak = KAK(det ** 0.25, k1, coords, k2)
    return kak


def _shift(k: KAK, i: int, s: int):
    # Can(c_i) = Can(c_i + s pi/2) . (-s i P_i P_i)
    k.coords[i] += s * np.pi / 2
    k.phase *= -s * 1j
    k.k2 = _PAULI[i] @ k.k2


def _flip(k: KAK, i: int, j: int):
    q = np.kron(_I2, _FLIP[(i, j)])
    k.coords[i] = -k.coords[i]
    k.coords[j] = -k.coords[j]
    k.k1 = k.k1 @ q
    k.k2 = q @ k.k2


def _swap(k: KAK, i: int, j: int):
    i, j = min(i, j), max(i, j)
    v = _SWAPPER[(i, j)]
    vv = np.kron(v, v)
    k.coords[[i, j]] = k.coords[[j, i]]
    k.k1 = k.k1 @ vv.conj().T
    k.k2 = vv @ k.k2


def weyl_kak(u: np.ndarray) -> KAK:
    """KAK form with coordinates in the Weyl chamber pi/4 >= a >= b >= |c|."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise DimMismatch(f"expected 4x4, got {u.shape}")
    k = _raw_kak(u)
    q = np.pi / 4
    for i in range(3):
        n = int(np.round(k.coords[i] / (np.pi / 2)))
        for _ in range(abs(n)):
            _shift(k, i, -int(np.sign(n)))
        if k.coords[i] <= -q + 1e-12:
            _shift(k, i, 1)
    for _ in range(3):
        for i in range(2):
            if abs(k.coords[i]) < abs(k.coords[i + 1]) - 1e-13:
                _swap(k, i, i + 1)
    if k.coords[0] < 0:
        _flip(k, 0, 2)
    if k.coords[1] < 0:
        _flip(k, 1, 2)
    if abs(k.coords[0] - q) < 1e-12 and k.coords[2] < 0:
        _shift(k, 0, -1)
        _flip(k, 0, 2)
    return k


def weyl_coordinates(u: np.ndarray) -> tuple[float, float, float]:
    return tuple(float(x) for x in weyl_kak(u).coords)


def cnot_class(coords, tol: float = CLASS_TOL) -> int:
    a, b, c = coords
    if max(abs(a), abs(b), abs(c)) < tol:
        return 0
    if abs(a - np.pi / 4) < tol and max(abs(b), abs(c)) < tol:
        return 1
    if abs(c) < tol:
        return 2
    return 3


def factor_local(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """k = A (x) B up to phase with A on local qubit 1 and B on qubit 0."""
    r = k.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    uu, s, vh = np.linalg.svd(r)
    a = uu[:, 0].reshape(2, 2) * np.sqrt(s[0])
    b = vh[0].reshape(2, 2) * np.sqrt(s[0])
    a = a / np.sqrt(abs(np.linalg.det(a)))
    b = b / np.sqrt(abs(np.linalg.det(b)))
    return a, b


def _template(n_cx: int, a: float = 0.0, b: float = 0.0, c: float = 0.0) -> list[Gate]:
    if n_cx == 0:
        return []
    if n_cx == 1:
        return [Gate("CX", (0, 1))]
    if n_cx == 2:
        # CX . (Rx(-2a) x Rz(-2b)) . CX = exp(i(a XX + b ZZ)) ~ Can(a, b, 0)
        return [
            Gate("CX", (0, 1)),
            Gate("Rx", (0,), (-2 * a,)),
            Gate("Rz", (1,), (-2 * b,)),
            Gate("CX", (0, 1)),
        ]
    # equals Can(a, b, c) up to phase
    return [
        Gate("Rz", (1,), (-np.pi / 2,)),
        Gate("CX", (1, 0)),
        Gate("Rz", (0,), (np.pi / 2 - 2 * c,)),
        Gate("Ry", (1,), (2 * a - np.pi / 2,)),
        Gate("CX", (0, 1)),
        Gate("Ry", (1,), (np.pi / 2 - 2 * b,)),
        Gate("CX", (1, 0)),
        Gate("Rz", (0,), (np.pi / 2,)),
    ]


def _locals(k: np.ndarray) -> list[Gate]:
    a, b = factor_local(k)
    return [Gate("U1Q", (0,), (), b), Gate("U1Q", (1,), (), a)]


def _fuse(gates: list[Gate]) -> Circuit:
    """Collapse single-qubit runs between CXs into one U3 per wire."""
    out: list[Gate] = []
    acc = [np.eye(2, dtype=complex), np.eye(2, dtype=complex)]

    def emit(q):
        if not is_identity_up_to_phase(acc[q], 1e-12):
            th, ph, lam, _ = euler_zyz(acc[q])
            out.append(Gate("U3", (q,), (th, ph, lam)))
        acc[q] = np.eye(2, dtype=complex)

    for g in gates:
        if g.arity == 1:
            q = g.qubits[0]
            acc[q] = g.matrix @ acc[q]
        else:
            emit(0)
            emit(1)
            out.append(g)
    emit(0)
    emit(1)
    return Circuit(2, out)


def _build(u: np.ndarray, k: KAK, n_cx: int) -> Circuit:
    a, b, c = k.coords
    tmpl = _template(n_cx, a, b, c)
    if n_cx in (0, 3):
        k1, k2 = k.k1, k.k2
    else:
        kt = weyl_kak(compute_unitary(Circuit(2, tmpl)))
        k1 = k.k1 @ kt.k1.conj().T
        k2 = kt.k2.conj().T @ k.k2
    if n_cx == 0:
        return _fuse(_locals(k1 @ k2))
    return _fuse(_locals(k2) + tmpl + _locals(k1))


def kak_decompose(u: np.ndarray) -> Circuit:
    """CX + U3 circuit on local qubits (0, 1) equal to u up to phase."""
    u = np.asarray(u, dtype=complex)
    for attempt in range(2):
        k = weyl_kak(u)
        n = cnot_class(k.coords)
        for n_cx in range(n, 4):
            out = _build(u, k, n_cx)
            if distance(u, compute_unitary(out)) <= KAK_TOL:
                return out
        # degenerate spectrum: nudge and retry once
        rng = np.random.default_rng(12345)
        h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = (h + h.conj().T) * 1e-12
        w, v = np.linalg.eigh(h)
        u = u @ ((v * np.exp(1j * w)) @ v.conj().T)
    raise NumericalInstability("KAK reconstruction failed")


def cnot_count(c: Circuit) -> int:
    return sum(1 for g in c.gates if g.kind == "CX")
