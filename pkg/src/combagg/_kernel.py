"""Vectorized per-tree arithmetic.

A ``TreeSet`` stores every spanning tree of one comparison graph as a BFS
schedule rooted at object 1, so that the log-potentials ``y`` of all trees
(``a_uv = exp(y_u - y_v)`` or ``y_u - y_v``) come out of ``n - 1`` fancy-index
steps instead of a Python loop per tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .trees import SpanningTree, trees_for

E_MINUS_1 = math.e - 1.0


@dataclass(frozen=True)
class TreeSet:
    n: int
    pair_u: np.ndarray     # (P,) 0-based first endpoint of each pair in all_pairs order
    pair_v: np.ndarray     # (P,)
    edge_idx: np.ndarray   # (T, n-1) pair indices of tree edges, sorted
    child: np.ndarray      # (T, n-1) BFS schedule: y[child] = y[parent] + sign * ell[pidx]
    parent: np.ndarray
    pidx: np.ndarray
    sign: np.ndarray

    @property
    def count(self) -> int:
        return self.edge_idx.shape[0]

    def tree(self, q: int) -> SpanningTree:
        """Tree number q (0-based) as 1-based edges."""
        return SpanningTree(self.n, tuple(
            (int(self.pair_u[p]) + 1, int(self.pair_v[p]) + 1) for p in self.edge_idx[q]
        ))

    def potentials(self, ell: np.ndarray) -> np.ndarray:
        """Log-potentials with y[root] = 0; ``ell`` is (..., P), result (..., T, n)."""
        ell = np.nan_to_num(np.asarray(ell, dtype=float), nan=0.0)
        lead = ell.shape[:-1]
        T = self.count
        y = np.zeros(lead + (T, self.n))
        rows = np.arange(T)
        for s in range(self.n - 1):
            y[..., rows, self.child[:, s]] = (
                y[..., rows, self.parent[:, s]] + self.sign[:, s] * ell[..., self.pidx[:, s]]
            )
        return y

    def pair_values(self, y: np.ndarray) -> np.ndarray:
        """ICPCM upper triangles (additive form) from potentials: (..., T, P)."""
        return y[..., self.pair_u] - y[..., self.pair_v]

    def scale_weights(self, grades_upper: np.ndarray) -> np.ndarray:
        """Hartley geometric mean of log2 N over each tree's edges: (T,)."""
        hart = np.log(np.log2(np.asarray(grades_upper, dtype=float)))
        return np.exp(hart[self.edge_idx].mean(axis=1))


def _build(n: int, edges: tuple | None) -> TreeSet:
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    index = {p: i for i, p in enumerate(pairs)}
    edge_rows, child, parent, pidx, sign = [], [], [], [], []
    for tree in trees_for(n, edges):
        adj: dict[int, list] = {i: [] for i in range(n)}
        for u, v in tree.edges:
            adj[u - 1].append(v - 1)
            adj[v - 1].append(u - 1)
        c_row, p_row, i_row, s_row = [], [], [], []
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for a in frontier:
                for b in sorted(adj[a]):
                    if b in seen:
                        continue
                    seen.add(b)
                    nxt.append(b)
                    c_row.append(b)
                    p_row.append(a)
                    if a < b:      # a_ab = w_a / w_b  =>  y_b = y_a - ell
                        i_row.append(index[(a, b)])
                        s_row.append(-1.0)
                    else:
                        i_row.append(index[(b, a)])
                        s_row.append(1.0)
            frontier = nxt
        edge_rows.append(sorted(index[(u - 1, v - 1)] for u, v in tree.edges))
        child.append(c_row)
        parent.append(p_row)
        pidx.append(i_row)
        sign.append(s_row)
    as_int = lambda rows: np.array(rows, dtype=np.intp).reshape(len(rows), n - 1)
    return TreeSet(
        n=n,
        pair_u=np.array([u for u, _ in pairs], dtype=np.intp),
        pair_v=np.array([v for _, v in pairs], dtype=np.intp),
        edge_idx=as_int(edge_rows),
        child=as_int(child),
        parent=as_int(parent),
        pidx=as_int(pidx),
        sign=np.array(sign, dtype=float).reshape(len(sign), n - 1),
    )


@lru_cache(maxsize=64)
def _cached(n: int, edges: tuple | None) -> TreeSet:
    return _build(n, edges)


def tree_set(n: int, mask=None) -> TreeSet:
    """Trees of K_n (mask None or complete) or of the masked graph."""
    if mask is not None:
        mask = tuple(sorted(mask))
        if len(mask) == n * (n - 1) // 2:
            mask = None
    return _cached(n, mask)


def log_divergence_denominator(D: np.ndarray) -> np.ndarray:
    """ln(exp(D) + e - 1) without overflow for large D."""
    D = np.asarray(D, dtype=float)
    small = D < 30.0
    out = np.empty_like(D)
    out[small] = np.log(np.exp(D[small]) + E_MINUS_1)
    big = D[~small]
    out[~small] = big + np.log1p(E_MINUS_1 * np.exp(-big))
    return out


def additive_denominator(D: np.ndarray) -> np.ndarray:
    return np.log(np.asarray(D, dtype=float) + math.e)


def normalize_rows(y: np.ndarray, multiplicative: bool) -> np.ndarray:
    """Per-tree gauge fixing: log of unit-sum weights, or zero-mean additive weights."""
    if multiplicative:
        top = y.max(axis=-1, keepdims=True)
        return y - (top + np.log(np.exp(y - top).sum(axis=-1, keepdims=True)))
    return y - y.mean(axis=-1, keepdims=True)
