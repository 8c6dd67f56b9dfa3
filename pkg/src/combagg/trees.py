"""Spanning trees of comparison graphs.

Vertices are 1..n and edges are pairs ``(u, v)`` with ``u < v``. Both
enumerators are generators so that large tree sets are streamed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import DisconnectedGraph, InputError, NTooLarge

MAX_COMPLETE_N = 8


@dataclass(frozen=True)
class SpanningTree:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __str__(self):
        return ",".join(f"{u}-{v}" for u, v in self.edges)


class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n + 1))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def _normalize_edges(n: int, edges: Iterable) -> list[tuple[int, int]]:
    out = set()
    for u, v in edges:
        u, v = (u, v) if u < v else (v, u)
        if not (1 <= u < v <= n):
            raise InputError(f"edge ({u},{v}) is not a pair of distinct vertices in 1..{n}")
        out.add((u, v))
    return sorted(out)


def is_connected(n: int, edges: Iterable) -> bool:
    ds = _DisjointSet(n)
    components = n
    for u, v in edges:
        if ds.union(u, v):
            components -= 1
    return components == 1


def is_spanning_tree(n: int, edges: Iterable) -> bool:
    edges = list(edges)
    return len(edges) == n - 1 and is_connected(n, edges)


def decode_prufer(seq: Iterable[int], n: int) -> tuple[tuple[int, int], ...]:
    """Tree edges (sorted, 1-based) for a Prüfer sequence over 1..n."""
    seq = list(seq)
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = next(j for j in range(1, n + 1) if degree[j] == 1)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = (j for j in range(1, n + 1) if degree[j] == 1)
    edges.append((u, v))
    return tuple(sorted(edges))


def enumerate_complete(n: int) -> Iterator[SpanningTree]:
    """All n^(n-2) spanning trees of K_n, in lexicographic Prüfer-sequence order."""
    if n < 2:
        raise InputError("need at least 2 vertices")
    if n > MAX_COMPLETE_N:
        raise NTooLarge(f"n={n} exceeds {MAX_COMPLETE_N}: {n ** (n - 2)} trees")
    for seq in itertools.product(range(1, n + 1), repeat=n - 2):
        yield SpanningTree(n, decode_prufer(seq, n))


def enumerate_masked(n: int, edges: Iterable) -> Iterator[SpanningTree]:
    """All spanning trees of the graph ``(1..n, edges)`` by backtracking over sorted edges.

    Each edge is either taken (if it joins two components) or skipped (if the
    graph of taken plus remaining edges stays connected), so every leaf of the
    search is a distinct spanning tree.
    """
    edges = _normalize_edges(n, edges)
    if not is_connected(n, edges):
        raise DisconnectedGraph(f"graph on {n} vertices is not connected")

    def grow(idx: int, chosen: list):
        if len(chosen) == n - 1:
            yield SpanningTree(n, tuple(chosen))
            return
        if len(chosen) + len(edges) - idx < n - 1:
            return
        u, v = edges[idx]
        ds = _DisjointSet(n)
        for a, b in chosen:
            ds.union(a, b)
        if ds.find(u) != ds.find(v):
            chosen.append((u, v))
            yield from grow(idx + 1, chosen)
            chosen.pop()
        if is_connected(n, itertools.chain(chosen, edges[idx + 1:])):
            yield from grow(idx + 1, chosen)

    yield from grow(0, [])


def count_trees(n: int, edges: Iterable) -> int:
    """Matrix-Tree theorem: any cofactor of the graph Laplacian."""
    edges = _normalize_edges(n, edges)
    if n == 1:
        return 1
    L = np.zeros((n, n))
    for u, v in edges:
        L[u - 1, v - 1] -= 1
        L[v - 1, u - 1] -= 1
        L[u - 1, u - 1] += 1
        L[v - 1, v - 1] += 1
    return int(round(np.linalg.det(L[1:, 1:])))


def trees_for(n: int, edges: Iterable | None = None) -> Iterator[SpanningTree]:
    """Prüfer enumeration for the complete graph, backtracking otherwise."""
    if edges is None:
        return enumerate_complete(n)
    edges = _normalize_edges(n, edges)
    if len(edges) == n * (n - 1) // 2:
        return enumerate_complete(n)
    return enumerate_masked(n, edges)
