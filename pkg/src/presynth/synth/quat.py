"""SU(2) elements as unit quaternions (Re a, Im a, Re b, Im b) of [[a, b], [-b*, a*]].

Operator distance up to global phase between two such elements p, q is
min(|p - q|, |p + q|).
"""
from __future__ import annotations

import numpy as np

KEY_SCALE = 1e7


def to_quat(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    det = u[..., 0, 0] * u[..., 1, 1] - u[..., 0, 1] * u[..., 1, 0]
    v = u / np.sqrt(det)[..., None, None]
    a, b = v[..., 0, 0], v[..., 0, 1]
    return np.stack([a.real, a.imag, b.real, b.imag], -1)


def to_matrix(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    a = q[..., 0] + 1j * q[..., 1]
    b = q[..., 2] + 1j * q[..., 3]
    out = np.empty(q.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = a
    out[..., 0, 1] = b
    out[..., 1, 0] = -b.conj()
    out[..., 1, 1] = a.conj()
    return out


def canon(q: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    """Fix the sign so the first clearly nonzero component is positive."""
    idx = np.argmax(np.abs(q) > tol, axis=-1)
    sgn = np.sign(np.take_along_axis(q, idx[..., None], -1))
    sgn[sgn == 0] = 1
    return q * sgn


def keys(q: np.ndarray) -> np.ndarray:
    return np.round(canon(q) * KEY_SCALE).astype(np.int64)


def as_void(k: np.ndarray) -> np.ndarray:
    k = np.ascontiguousarray(k)
    return k.view(np.dtype((np.void, k.dtype.itemsize * k.shape[-1]))).ravel()


def mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Quaternion of the matrix product P @ Q (broadcasting)."""
    a1 = p[..., 0] + 1j * p[..., 1]
    b1 = p[..., 2] + 1j * p[..., 3]
    a2 = q[..., 0] + 1j * q[..., 1]
    b2 = q[..., 2] + 1j * q[..., 3]
    a = a1 * a2 - b1 * b2.conj()
    b = a1 * b2 + b1 * a2.conj()
    return np.stack([a.real, a.imag, b.real, b.imag], -1)


def inv(q: np.ndarray) -> np.ndarray:
    # adjoint: a -> a*, b -> -b
    return q * np.array([1, -1, -1, -1])


def dist(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.minimum(np.linalg.norm(p - q, axis=-1), np.linalg.norm(p + q, axis=-1))


def rz_quat(theta: float) -> np.ndarray:
    return np.array([np.cos(theta / 2), -np.sin(theta / 2), 0.0, 0.0])


def rz_circle_dist(q: np.ndarray) -> np.ndarray:
    """Distance from q to the nearest Rz rotation."""
    r = np.sqrt(q[..., 0] ** 2 + q[..., 1] ** 2)
    return np.sqrt(np.maximum(0.0, 2 - 2 * r))


def rz_angle(q: np.ndarray) -> np.ndarray:
    """Angle of the nearest Rz, reduced to [0, 2pi)."""
    return np.mod(-2 * np.arctan2(q[..., 1], q[..., 0]), 2 * np.pi)
