"""Solovay-Kitaev approximation over a finite inverse-closed gate set."""
from __future__ import annotations

import threading

import numpy as np
from scipy.spatial import cKDTree

from .. import gates as G
from ..errors import NetTooCoarse
from . import quat as Q
from .gateset import GateSet


class SKNet:
    """Shortest word for every distinct element reachable within base_length."""

    def __init__(self, gs: GateSet, base_length: int = 14, base_tol: float = 0.25):
        self.gs = gs
        self.base_length = base_length
        # coarsest base approximation the recursion is trusted to contract from
        self.base_tol = base_tol
        gq = gs.quats
        words: list[tuple[int, ...]] = [()]
        quats = [np.array([1.0, 0, 0, 0])]
        seen = {bytes(Q.keys(quats[0]))}
        frontier = [0]
        for _ in range(base_length):
            nxt = []
            for idx in frontier:
                for g in range(len(gq)):
                    p = Q.canon(Q.mul(gq[g], quats[idx]))
                    k = bytes(Q.keys(p))
                    if k not in seen:
                        seen.add(k)
                        words.append(words[idx] + (g,))
                        quats.append(p)
                        nxt.append(len(quats) - 1)
            frontier = nxt
        self.words = words
        self.quats = np.array(quats)
        self.tree = cKDTree(np.concatenate([self.quats, -self.quats]))

    def __len__(self):
        return len(self.words)

    def nearest(self, q: np.ndarray) -> tuple[int, ...]:
        d, i = self.tree.query(q)
        if d > self.base_tol:
            raise NetTooCoarse(f"nearest net element is {d:.3g} away (tolerance {self.base_tol})")
        return self.words[int(i) % len(self.words)]


_NETS: dict = {}
_NETS_LOCK = threading.Lock()


def get_net(gs: GateSet, base_length: int = 14) -> SKNet:
    key = (gs.name, tuple(g for g in gs.generators), base_length)
    with _NETS_LOCK:
        if key not in _NETS:
            _NETS[key] = SKNet(gs, base_length)
        return _NETS[key]


def _axis_angle(q: np.ndarray) -> tuple[float, np.ndarray]:
    """Rotation angle and axis of U = cos(t/2) I - i sin(t/2) n.sigma."""
    u = Q.to_matrix(q)
    c = np.real(np.trace(u)) / 2
    if c < 0:
        u, c = -u, -c
    th = 2 * np.arccos(min(1.0, c))
    s = np.sin(th / 2)
    if s < 1e-14:
        return 0.0, np.array([0.0, 0.0, 1.0])
    n = np.array(
        [
            np.real(1j * (u[0, 1] + u[1, 0])),
            np.real(u[1, 0] - u[0, 1]),
            np.real(1j * (u[0, 0] - u[1, 1])),
        ]
    ) / (2 * s)
    return th, n / np.linalg.norm(n)


def _rot(n, th: float) -> np.ndarray:
    m = np.cos(th / 2) * np.eye(2) - 1j * np.sin(th / 2) * (n[0] * G.X + n[1] * G.Y + n[2] * G.Z)
    return Q.to_quat(m)


def group_commutator(q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Balanced V, W with V W V^dag W^dag = U (Dawson-Nielsen construction)."""
    th, n = _axis_angle(q)
    phi = 2 * np.arcsin(((1 - np.cos(th / 2)) / 2) ** 0.25)
    v = _rot([1.0, 0, 0], phi)
    w = _rot([0, 1.0, 0], phi)
    comm = Q.mul(Q.mul(v, w), Q.mul(Q.inv(v), Q.inv(w)))
    _, m = _axis_angle(comm)
    ax = np.cross(m, n)
    s, c = np.linalg.norm(ax), float(np.dot(m, n))
    if s < 1e-12:
        if c > 0:
            sq = np.array([1.0, 0, 0, 0])
        else:
            perp = np.array([1.0, 0, 0]) if abs(m[0]) < 0.9 else np.array([0, 1.0, 0])
            perp = perp - np.dot(perp, m) * m
            sq = _rot(perp / np.linalg.norm(perp), np.pi)
    else:
        sq = _rot(ax / s, np.arctan2(s, c))
    conj = lambda x: Q.mul(Q.mul(sq, x), Q.inv(sq))
    return conj(v), conj(w)


def _word_quat(gs_quats: np.ndarray, word) -> np.ndarray:
    q = np.array([1.0, 0, 0, 0])
    for g in word:
        q = Q.mul(gs_quats[g], q)
    return q


def cancel_inverses(word, gs: GateSet) -> tuple[int, ...]:
    """Remove adjacent generator pairs whose product is the identity."""
    gq = gs.quats
    ident = np.array([1.0, 0, 0, 0])
    out: list[int] = []
    for g in word:
        if out and Q.dist(Q.mul(gq[g], gq[out[-1]]), ident) < 1e-12:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


def sk_word(u: np.ndarray, depth: int, net: SKNet) -> tuple[int, ...]:
    gs = net.gs
    gq = gs.quats

    def rec(q: np.ndarray, n: int) -> tuple[int, ...]:
        if n == 0:
            return net.nearest(q)
        w_prev = rec(q, n - 1)
        q_prev = _word_quat(gq, w_prev)
        v, w = group_commutator(Q.mul(q, Q.inv(q_prev)))
        wv = rec(v, n - 1)
        ww = rec(w, n - 1)
        # V W V^dag W^dag U_prev in time order
        return w_prev + gs.inverse_word(ww) + gs.inverse_word(wv) + ww + wv

    return cancel_inverses(rec(Q.to_quat(u), depth), gs)
