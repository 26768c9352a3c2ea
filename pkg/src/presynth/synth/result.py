from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..circuit import Circuit

KEY_GRID = 1e-8


@dataclass(frozen=True)
class UnitaryKey:
    """Phase-canonical, quantized fingerprint of a small unitary."""

    dim: int
    data: bytes

    @staticmethod
    def of(m: np.ndarray) -> "UnitaryKey":
        m = np.asarray(m, dtype=complex)
        flat = m.ravel()
        mag = np.abs(flat)
        # first entry within 1e-6 of the largest magnitude, so ties are stable
        k = int(np.argmax(mag >= mag.max() - 1e-6))
        z = flat / (flat[k] / mag[k])
        q = np.round(np.stack([z.real, z.imag], -1) / KEY_GRID).astype(np.int64)
        q[q == 0] = 0
        return UnitaryKey(m.shape[0], q.tobytes())


@dataclass(frozen=True)
class SynthesisResult:
    word: Circuit
    t_count: int
    error: float
    backend_id: str
    input_key: UnitaryKey
    # number of approximation steps, each bounded by the requested tolerance
    n_approx: int = 1
