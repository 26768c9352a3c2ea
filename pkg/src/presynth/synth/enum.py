"""Minimum-T-count single-qubit synthesis by exhaustive enumeration.

Level a holds every single-qubit Clifford+T unitary (mod phase) whose
minimal T-count is exactly a, built as C . T . W for W in level a-1.
Any minimal word of T-count t splits as A . B with A in level t//2 and B
in level t - t//2 whose leading Clifford is absorbed into A, so searching
those pairs is exhaustive.  Pairs whose product lies near the Rz circle
are tabulated once (complete up to a per-level radius) and cached on disk.
"""
from __future__ import annotations

import hashlib
import os
import threading
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from ..errors import BudgetExhausted, PresynthError
from . import quat as Q
from .gateset import GateSet

STEP = -1
FORMAT_VERSION = 4
# (max T-count, radius): table for T-count t is complete for eps <= radius
DEFAULT_RADII = ((14, 0.1), (20, 0.035), (24, 0.0125))

_H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
_S = np.diag([1, 1j])
_T = np.diag([1, np.exp(1j * np.pi / 4)])


def cache_dir() -> Path | None:
    d = os.environ.get("PRESYNTH_CACHE")
    if d == "":
        return None
    path = Path(d) if d else Path.home() / ".cache" / "presynth"
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError:
        return None
    return path


def _closure(gens: np.ndarray) -> np.ndarray:
    """All products of the given quaternions, identity first, BFS order."""
    elems = [np.array([1.0, 0, 0, 0])]
    seen = {bytes(Q.keys(elems[0]))}
    frontier = list(elems)
    while frontier:
        nxt = []
        for q in frontier:
            for g in gens:
                p = Q.canon(Q.mul(g, q))
                k = bytes(Q.keys(p))
                if k not in seen:
                    seen.add(k)
                    elems.append(p)
                    nxt.append(p)
        frontier = nxt
    return np.array(elems)


def _bloch_z(q: np.ndarray) -> np.ndarray:
    """Bloch vector of U|0> for quaternion q."""
    alpha = q[..., 0] + 1j * q[..., 1]
    beta = -(q[..., 2] - 1j * q[..., 3])
    ab = alpha.conj() * beta
    return np.stack([2 * ab.real, 2 * ab.imag, np.abs(alpha) ** 2 - np.abs(beta) ** 2], -1)


class CliffordTTables:
    def __init__(self, max_level: int = 12, radii=DEFAULT_RADII, use_cache: bool = True):
        self.max_level = max_level
        self.radii = tuple(tuple(r) for r in radii)
        self.cliff = _closure(Q.to_quat(np.array([_H, _S])))
        if len(self.cliff) != 24:
            raise PresynthError("Clifford closure has wrong size")
        self.cliff_keys = {bytes(k): i for i, k in enumerate(Q.keys(self.cliff))}
        prod = Q.mul(self.cliff[:, None, :], self.cliff[None, :, :])
        self.cliff_mul = np.array(
            [[self.cliff_keys[bytes(k)] for k in Q.keys(row)] for row in prod]
        )
        self.step = Q.to_quat(_T)
        self._trees: dict = {}
        self._lock = threading.Lock()
        path = None
        if use_cache and cache_dir() is not None:
            path = cache_dir() / f"enum-{self.config_hash()}.npz"
        if path is not None and path.exists():
            try:
                self._load(path)
                return
            except Exception:
                pass
        self._build_levels()
        self._build_circle()
        if path is not None:
            try:
                self._save(path)
            except OSError:
                pass

    def config_hash(self) -> str:
        s = repr((FORMAT_VERSION, self.max_level, self.radii))
        return hashlib.sha256(s.encode()).hexdigest()[:16]

    # ---- construction -------------------------------------------------
    def _build_levels(self):
        self.level_q = [self.cliff.copy()]
        self.level_parent = [np.full(24, -1, dtype=np.int32)]
        self.level_cliff = [np.arange(24, dtype=np.int16)]
        seen = np.sort(Q.as_void(Q.keys(self.cliff)))
        ct = Q.mul(self.cliff, self.step)  # C . T for every Clifford, identity first
        for _ in range(1, self.max_level + 1):
            prev = self.level_q[-1]
            n = len(prev)
            cand = Q.mul(ct[:, None, :], prev[None, :, :]).reshape(-1, 4)
            v = Q.as_void(Q.keys(cand))
            uniq, first = np.unique(v, return_index=True)
            fresh = ~np.isin(uniq, seen)
            sel = np.sort(first[fresh])
            self.level_q.append(Q.canon(cand[sel]))
            self.level_parent.append((sel % n).astype(np.int32))
            self.level_cliff.append((sel // n).astype(np.int16))
            seen = np.union1d(seen, uniq[fresh])

    def radius(self, t: int) -> float:
        for tmax, r in self.radii:
            if t <= tmax:
                return r
        return 0.0

    def reps(self, a: int) -> np.ndarray:
        """Indices of level-a elements with identity leading Clifford."""
        return np.nonzero(self.level_cliff[a] == 0)[0]

    def _build_circle(self):
        self.circle = {}
        for t in range(1, 2 * self.max_level + 1):
            r = self.radius(t)
            if r <= 0:
                continue
            x, y = t // 2, t - t // 2
            a_q = self.level_q[x]
            b_idx = self.reps(y)
            b_q = self.level_q[y][b_idx]
            ta = cKDTree(_bloch_z(Q.inv(a_q)))
            tb = cKDTree(_bloch_z(b_q))
            sdm = ta.sparse_distance_matrix(tb, 2 * r * 1.01, output_type="ndarray")
            ia = sdm["i"].astype(np.int64)
            ib = sdm["j"].astype(np.int64)
            w = Q.mul(a_q[ia], b_q[ib])
            keep = Q.rz_circle_dist(w) <= r
            ia, ib, w = ia[keep], b_idx[ib[keep]], w[keep]
            phi = Q.rz_angle(w)
            order = np.lexsort((ib, ia, phi))
            self.circle[t] = (phi[order], ia[order], ib[order], w[order])

    def _save(self, path: Path):
        arrays = {}
        for a in range(self.max_level + 1):
            arrays[f"q{a}"] = self.level_q[a]
            arrays[f"p{a}"] = self.level_parent[a]
            arrays[f"c{a}"] = self.level_cliff[a]
        for t, (phi, ia, ib, _) in self.circle.items():
            arrays[f"phi{t}"] = phi
            arrays[f"ia{t}"] = ia.astype(np.int32)
            arrays[f"ib{t}"] = ib.astype(np.int32)
        tmp = path.with_suffix(f".{os.getpid()}.tmp.npz")
        np.savez(tmp, **arrays)
        os.replace(tmp, path)

    def _load(self, path: Path):
        with np.load(path) as z:
            self.level_q = [z[f"q{a}"] for a in range(self.max_level + 1)]
            self.level_parent = [z[f"p{a}"] for a in range(self.max_level + 1)]
            self.level_cliff = [z[f"c{a}"] for a in range(self.max_level + 1)]
            self.circle = {}
            for t in range(1, 2 * self.max_level + 1):
                if f"phi{t}" in z:
                    ia = z[f"ia{t}"].astype(np.int64)
                    ib = z[f"ib{t}"].astype(np.int64)
                    x, y = t // 2, t - t // 2
                    w = Q.mul(self.level_q[x][ia], self.level_q[y][ib])
                    self.circle[t] = (z[f"phi{t}"], ia, ib, w)

    # ---- words ----------------------------------------------------------
    def tokens(self, a: int, k: int) -> list[int]:
        """Time-ordered tokens of level element (a, k): Clifford indices and STEP."""
        out: list[int] = []
        while a > 0:
            out.append(int(self.level_cliff[a][k]))
            out.append(STEP)
            k = int(self.level_parent[a][k])
            a -= 1
        out.append(int(self.level_cliff[0][k]))
        return out[::-1]

    def simplify(self, tokens: list[int]) -> list[int]:
        out: list[int] = []
        for tok in tokens:
            if tok != STEP and out and out[-1] != STEP:
                out[-1] = int(self.cliff_mul[tok, out[-1]])
            else:
                out.append(tok)
        return [t for t in out if t != 0]

    def tokens_quat(self, tokens: list[int]) -> np.ndarray:
        q = np.array([1.0, 0, 0, 0])
        for tok in tokens:
            q = Q.mul(self.step if tok == STEP else self.cliff[tok], q)
        return q

    # ---- search ---------------------------------------------------------
    def _tree(self, name: str, build):
        with self._lock:
            if name not in self._trees:
                self._trees[name] = build()
            return self._trees[name]

    def _rep_tree(self, y: int):
        def build():
            idx = self.reps(y)
            q = self.level_q[y][idx]
            return cKDTree(np.concatenate([q, -q])), np.concatenate([idx, idx])

        return self._tree(f"rep{y}", build)

    def _level_tree(self, a: int):
        def build():
            q = self.level_q[a]
            return cKDTree(np.concatenate([q, -q]))

        return self._tree(f"lvl{a}", build)

    def _hits_exhaustive(self, t: int, target: np.ndarray, eps: float):
        """Every (A, B) at T-count t with dist(A.B, target) <= eps, as index arrays."""
        x, y = t // 2, t - t // 2
        tree, idx = self._rep_tree(y)
        queries = Q.mul(Q.inv(self.level_q[x]), target)
        lists = tree.query_ball_point(queries, eps)
        ia = np.repeat(np.arange(len(lists)), [len(l) for l in lists])
        ib = idx[np.concatenate([np.asarray(l, dtype=np.int64) for l in lists])] if len(ia) else ia
        w = Q.mul(self.level_q[x][ia], self.level_q[y][ib])
        return ia, ib, w

    def _hits_table(self, t: int, theta: float, eps: float):
        phi, ia, ib, w = self.circle[t]
        half = 4 * np.arcsin(min(1.0, eps))
        th = np.mod(theta, 2 * np.pi)
        spans = [(th - half, th + half)]
        if th - half < 0:
            spans.append((th - half + 2 * np.pi, 2 * np.pi))
        if th + half > 2 * np.pi:
            spans.append((0.0, th + half - 2 * np.pi))
        sel = []
        for lo, hi in spans:
            s = np.searchsorted(phi, max(lo, 0.0), side="left")
            e = np.searchsorted(phi, min(hi, 2 * np.pi), side="right")
            sel.append(np.arange(s, e))
        sel = np.unique(np.concatenate(sel))
        return ia[sel], ib[sel], w[sel]

    @staticmethod
    def _best(ia, ib, w, target: np.ndarray, eps: float):
        if len(ia) == 0:
            return None
        d = Q.dist(w, target)
        ok = np.nonzero(d <= eps)[0]
        if len(ok) == 0:
            return None
        k = ok[np.lexsort((ib[ok], ia[ok], d[ok]))[0]]
        return float(d[k]), int(ia[k]), int(ib[k])

    def search_rz(self, theta: float, eps: float, budget: int = 24) -> tuple[list[int], float]:
        """Minimum-T-count tokens within eps of Rz(theta); ties broken by error."""
        target = Q.rz_quat(theta)
        return self._search(target, eps, budget, theta)

    def _search(self, target: np.ndarray, eps: float, budget: int, theta=None):
        d0 = Q.dist(self.cliff, target)
        k = int(np.argmin(d0))
        if d0[k] <= eps:
            return [k] if k else [], float(d0[k])
        top = min(budget, 2 * self.max_level)
        for t in range(1, top + 1):
            if theta is not None and t in self.circle and eps <= self.radius(t):
                hits = self._hits_table(t, theta, eps)
            else:
                hits = self._hits_exhaustive(t, target, eps)
            best = self._best(*hits, target, eps)
            if best is not None:
                d, ia, ib = best
                x, y = t // 2, t - t // 2
                toks = self.tokens(y, ib) + self.tokens(x, ia)
                return self.simplify(toks), d
        raise BudgetExhausted(f"no word within {eps} at T-count <= {top}")

    def exact_lookup(self, target: np.ndarray, max_level: int | None = None, tol: float = 1e-9):
        """Tokens of an exact Clifford+T match with minimal T-count, or None."""
        top = self.max_level if max_level is None else min(max_level, self.max_level)
        for a in range(top + 1):
            tree = self._level_tree(a)
            d, j = tree.query(target)
            if d <= tol:
                return self.simplify(self.tokens(a, int(j) % len(self.level_q[a])))
        return None


_TABLES: dict = {}
_TABLES_LOCK = threading.Lock()


def get_tables(max_level: int = 12, radii=DEFAULT_RADII) -> CliffordTTables:
    key = (max_level, tuple(tuple(r) for r in radii))
    with _TABLES_LOCK:
        if key not in _TABLES:
            _TABLES[key] = CliffordTTables(max_level, radii)
        return _TABLES[key]


class Speller:
    """Spell table tokens as words over a concrete gate set of the same group."""

    def __init__(self, gs: GateSet, tables: CliffordTTables):
        self.gs = gs
        self.tables = tables
        gq = gs.quats
        zero = [i for i, w in enumerate(gs.t_weights) if w == 0]
        one = [i for i, w in enumerate(gs.t_weights) if w == 1]
        if not one:
            raise PresynthError(f"gate set {gs.name} has no non-Clifford generator")
        words: dict[int, tuple[int, ...]] = {0: ()}
        frontier = [((), np.array([1.0, 0, 0, 0]))]
        while frontier:
            nxt = []
            for w, q in frontier:
                for g in zero:
                    p = Q.mul(gq[g], q)
                    c = tables.cliff_keys.get(bytes(Q.keys(p)))
                    if c is None:
                        raise PresynthError(f"{gs.name}: Clifford generators leave the Clifford group")
                    if c not in words:
                        words[c] = w + (g,)
                        nxt.append((w + (g,), p))
            frontier = nxt
        if len(words) != 24:
            raise PresynthError(f"{gs.name}: Clifford generators do not span the Clifford group")
        self.cliff_words = words
        # T step = C . g for some non-Clifford generator g
        step = None
        for g in one:
            for c in range(24):
                if Q.dist(Q.mul(tables.cliff[c], gq[g]), tables.step) < 1e-9:
                    step = (g,) + words[c]
                    break
            if step is not None:
                break
        if step is None:
            raise PresynthError(f"{gs.name}: no generator equals T up to Clifford")
        self.step_word = step

    def spell(self, tokens: list[int]) -> tuple[int, ...]:
        out: list[int] = []
        for tok in tokens:
            out.extend(self.step_word if tok == STEP else self.cliff_words[tok])
        return tuple(out)

    def clifford_token(self, m: np.ndarray) -> int:
        return self.tables.cliff_keys[bytes(Q.keys(Q.to_quat(m)))]
