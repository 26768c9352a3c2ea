from __future__ import annotations

import numpy as np

_TINY = 1e-13


def euler_zyz(u: np.ndarray) -> tuple[float, float, float, float]:
    """(theta, phi, lam, phase) with u = e^{i phase} Rz(phi) Ry(theta) Rz(lam).

    When theta is 0 or pi the split between phi and lam is fixed by lam = 0.
    """
    u = np.asarray(u, dtype=complex)
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    v = u / np.sqrt(det)
    a, b = v[0, 0], v[1, 0]
    theta = 2 * np.arctan2(abs(b), abs(a))
    if abs(b) < _TINY:
        phi, lam = -2 * np.angle(a), 0.0
    elif abs(a) < _TINY:
        phi, lam = 2 * np.angle(b), 0.0
    else:
        s, d = -2 * np.angle(a), 2 * np.angle(b)
        phi, lam = (s + d) / 2, (s - d) / 2
    phi = float(np.angle(np.exp(1j * phi)))
    lam = float(np.angle(np.exp(1j * lam)))
    if abs(phi) < _TINY:
        phi = 0.0
    if abs(lam) < _TINY:
        lam = 0.0
    from ..gates import rz, ry

    r = rz(phi) @ ry(theta) @ rz(lam)
    k = np.unravel_index(np.argmax(np.abs(r)), r.shape)
    phase = float(np.angle(u[k] / r[k]))
    if abs(phase) < _TINY:
        phase = 0.0
    return float(theta), phi, lam, phase
