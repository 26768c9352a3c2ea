"""Matrices of the named gates.

Two-qubit matrices use the little-endian local basis: for a gate on
qubits (a, b) the basis index is bit_a + 2 * bit_b.
"""
from __future__ import annotations

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
SDG = S.conj().T
T = np.diag([1, np.exp(1j * np.pi / 4)])
TDG = T.conj().T

# qubit a = LSB (control), b = target
CX = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def u3(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ]
    )


def rxx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return c * np.eye(4, dtype=complex) - 1j * s * np.kron(X, X)


def rzz(theta: float) -> np.ndarray:
    return np.diag(np.exp(-0.5j * theta * np.array([1, -1, -1, 1])))


def crx(theta: float) -> np.ndarray:
    # control is the first listed qubit (local bit 0)
    m = np.eye(4, dtype=complex)
    r = rx(theta)
    idx = [1, 3]
    for a in range(2):
        for b in range(2):
            m[idx[a], idx[b]] = r[a, b]
    return m


def on_first(m: np.ndarray) -> np.ndarray:
    """Embed a 1q matrix on local qubit 0 of a pair."""
    return np.kron(I2, m)


def on_second(m: np.ndarray) -> np.ndarray:
    return np.kron(m, I2)


FIXED = {"H": H, "S": S, "Sdg": SDG, "T": T, "Tdg": TDG, "X": X, "Y": Y, "Z": Z, "CX": CX}
PARAMETRIC = {"Rz": rz, "Rx": rx, "Ry": ry, "U3": u3, "Rxx": rxx, "Rzz": rzz, "CRx": crx}

# kind -> (arity, number of params); None means a raw matrix
ARITY = {
    "H": (1, 0), "S": (1, 0), "Sdg": (1, 0), "T": (1, 0), "Tdg": (1, 0),
    "X": (1, 0), "Y": (1, 0), "Z": (1, 0), "CX": (2, 0),
    "Rz": (1, 1), "Rx": (1, 1), "Ry": (1, 1), "U3": (1, 3),
    "Rxx": (2, 1), "Rzz": (2, 1), "CRx": (2, 1),
    "U1Q": (1, None), "U2Q": (2, None),
}

# two-qubit kinds whose matrix is invariant under exchanging the qubits
SYMMETRIC_2Q = {"Rxx", "Rzz"}

INVERSE_NAME = {"H": "H", "S": "Sdg", "Sdg": "S", "T": "Tdg", "Tdg": "T", "X": "X", "Y": "Y", "Z": "Z", "CX": "CX"}
