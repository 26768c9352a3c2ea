"""Seeded generators for the benchmark task families."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .. import gates as G
from ..circuit import Circuit, Gate
from ..errors import ConfigError
from ..synth.euler import euler_zyz

TWO_PI = 2 * np.pi
RANDOM_POOL = ("H", "X", "Y", "Z", "S", "T", "Rx", "Ry", "Rz", "U3", "CX", "CRx", "Rxx")


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def gen_random_circuit(n: int, depth: int, seed: int = 0, pool=RANDOM_POOL) -> Circuit:
    """Layer by layer: shuffle the wires, then fill them with uniformly drawn kinds."""
    if n < 2:
        raise ConfigError("random circuits need n >= 2")
    rng = _rng(seed)
    out: list[Gate] = []
    for _ in range(depth):
        free = list(rng.permutation(n))
        while free:
            kind = pool[rng.integers(len(pool))]
            arity, npar = G.ARITY[kind]
            if arity > len(free):
                continue
            qs = tuple(int(free.pop()) for _ in range(arity))
            params = tuple(float(x) for x in rng.uniform(0, TWO_PI, npar or 0))
            out.append(Gate(kind, qs, params))
    return Circuit(n, out)


def gen_linear_circuit(n: int, blocks: int = 3, kind: str = "crx_ladder", seed: int = 0) -> Circuit:
    if n < 2 or blocks < 1:
        raise ConfigError("linear circuits need n >= 2 and blocks >= 1")
    if kind not in ("crx_ladder", "rxx_brick"):
        raise ConfigError(f"unknown entangler {kind!r}")
    rng = _rng(seed)
    out: list[Gate] = []
    for _ in range(blocks):
        for q in range(n):
            a, b = rng.uniform(0, TWO_PI, 2)
            out += [Gate("Rx", (q,), (float(a),)), Gate("Rz", (q,), (float(b),))]
        if kind == "crx_ladder":
            pairs = [(i, i + 1) for i in range(n - 1)]
            gk = "CRx"
        else:
            pairs = [(i, i + 1) for i in range(0, n - 1, 2)] + [(i, i + 1) for i in range(1, n - 1, 2)]
            gk = "Rxx"
        for p in pairs:
            out.append(Gate(gk, p, (float(rng.uniform(0, TWO_PI)),)))
    return Circuit(n, out)


@dataclass
class IsingSpec:
    n: int
    J: float = 1.0
    h_x: np.ndarray = field(default=None)
    h_y: np.ndarray = field(default=None)
    h_z: np.ndarray = field(default=None)
    t: float = 1.0
    steps: int = 10

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigError("steps must be >= 1")
        for name in ("h_x", "h_y", "h_z"):
            v = getattr(self, name)
            v = np.zeros(self.n) if v is None else np.broadcast_to(np.asarray(v, dtype=float), (self.n,))
            setattr(self, name, np.array(v))

    @classmethod
    def random(cls, n: int, seed: int = 0, J: float = 1.0, t: float = 1.0, steps: int = 10) -> "IsingSpec":
        rng = _rng(seed)
        h = rng.uniform(-2, 2, (3, n))
        return cls(n, J, h[0], h[1], h[2], t, steps)

    def hamiltonian(self) -> np.ndarray:
        """Dense H, little-endian, for small n."""
        n = self.n
        dim = 2 ** n

        def op(m, q):
            out = np.array([[1.0]])
            for k in reversed(range(n)):
                out = np.kron(out, m if k == q else G.I2)
            return out

        h = np.zeros((dim, dim), dtype=complex)
        for i in range(n - 1):
            h += self.J * op(G.Z, i) @ op(G.Z, i + 1)
        for q in range(n):
            h += self.h_x[q] * op(G.X, q) + self.h_y[q] * op(G.Y, q) + self.h_z[q] * op(G.Z, q)
        return h

    def exact(self) -> np.ndarray:
        return expm(-1j * self.t * self.hamiltonian())


def gen_trotter_ising(spec: IsingSpec) -> Circuit:
    """Strang steps: half field, full ZZ, half field."""
    n, dt = spec.n, spec.t / spec.steps
    half = []
    for q in range(n):
        hm = spec.h_x[q] * G.X + spec.h_y[q] * G.Y + spec.h_z[q] * G.Z
        th, ph, lam, _ = euler_zyz(expm(-0.5j * dt * hm))
        half.append(Gate("U3", (q,), (th, ph, lam)))
    zz = [Gate("Rzz", (i, i + 1), (2 * spec.J * dt,)) for i in range(n - 1)]
    out: list[Gate] = []
    for _ in range(spec.steps):
        out += half + zz + half
    return Circuit(n, out)


def gen_matchgate_circuit(n: int, n_gates: int | None = None, seed: int = 0) -> Circuit:
    if n < 2:
        raise ConfigError("matchgate circuits need n >= 2")
    rng = _rng(seed)
    out: list[Gate] = []
    for _ in range(5 * n if n_gates is None else n_gates):
        theta = float(rng.uniform(0, TWO_PI))
        if rng.random() < 0.5:
            out.append(Gate("Rz", (int(rng.integers(n)),), (theta,)))
        else:
            i = int(rng.integers(n - 1))
            out.append(Gate("Rxx", (i, i + 1), (theta,)))
    return Circuit(n, out)


def slice_layers(c: Circuit, per_slice: int = 1) -> list[Circuit]:
    """Cut after every per_slice-th layer that holds a two-qubit gate."""
    depth = [0] * c.n_qubits
    ent_layers = set()
    tagged = []
    for g in c.gates:
        d = max(depth[q] for q in g.qubits)
        for q in g.qubits:
            depth[q] = d + 1
        if g.arity > 1:
            ent_layers.add(d)
        tagged.append((d, g))
    cuts = sorted(ent_layers)[per_slice - 1::per_slice]
    bounds = cuts + [float("inf")]
    out: list[list[Gate]] = [[] for _ in bounds]
    for d, g in tagged:
        k = next(i for i, b in enumerate(bounds) if d <= b)
        out[k].append(g)
    return [Circuit(c.n_qubits, gs) for gs in out if gs]


def _value(v: str):
    for cast in (int, float):
        try:
            return cast(v)
        except ValueError:
            pass
    return v


def parse_task(spec: str) -> tuple[str, dict]:
    """'random:n=6,depth=6,seed=1' -> ('random', {'n': 6, 'depth': 6, 'seed': 1})."""
    family, _, rest = spec.partition(":")
    kw = {}
    for item in filter(None, rest.split(",")):
        k, eq, v = item.partition("=")
        if not eq:
            raise ConfigError(f"bad task field {item!r} in {spec!r}")
        kw[k.strip()] = _value(v.strip())
    return family.strip(), kw


def generate(spec: str) -> Circuit:
    family, kw = parse_task(spec)
    try:
        if family == "random":
            return gen_random_circuit(kw["n"], kw.get("depth", kw["n"]), kw.get("seed", 0))
        if family == "linear":
            return gen_linear_circuit(kw["n"], kw.get("blocks", 3), kw.get("kind", "crx_ladder"), kw.get("seed", 0))
        if family == "ising":
            s = IsingSpec.random(kw["n"], kw.get("seed", 0), kw.get("J", 1.0), kw.get("t", 1.0), kw.get("steps", 10))
            return gen_trotter_ising(s)
        if family == "matchgate":
            return gen_matchgate_circuit(kw["n"], kw.get("gates"), kw.get("seed", 0))
        if family == "pathological":
            return pathological_circuit(kw.get("seed", 1), kw.get("alpha", 0.37))
        if family == "qasm":
            from ..qasm import parse_qasm

            with open(kw["path"]) as fh:
                return parse_qasm(fh.read())
    except KeyError as e:
        raise ConfigError(f"task {spec!r} is missing field {e.args[0]!r}") from None
    raise ConfigError(f"unknown task family {family!r}")


def pathological_circuit(seed: int = 1, alpha: float = 0.37) -> Circuit:
    """Rz(a) q1, U(0,1), U^dag(0,1), Rz(-a) q1, CX(1,2): merging (0,1) first leaves only the CX."""
    from scipy.stats import unitary_group

    from ..circuit import u2q

    u = unitary_group.rvs(4, random_state=seed)
    return Circuit(3, [
        Gate("Rz", (1,), (alpha,)),
        u2q(u, 0, 1),
        u2q(u.conj().T, 0, 1),
        Gate("Rz", (1,), (-alpha,)),
        Gate("CX", (1, 2)),
    ])
