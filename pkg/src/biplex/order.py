"""2-hop degrees and the 2-hop degeneracy ordering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .bigraph import BipartiteGraph, k_hop


@dataclass(frozen=True)
class DegeneracyOrdering:
    eta: np.ndarray               # removal order
    rank: np.ndarray              # rank[eta[i]] == i
    d2: int
    residual_degrees: np.ndarray  # 2-hop degree of each vertex when it was removed

    def __len__(self):
        return len(self.eta)


def two_hop_degree(g: BipartiteGraph, v: int, restriction=None) -> int:
    """``|N(v) | N^2(v)|`` inside ``restriction`` (whole graph by default)."""
    return len(k_hop(g, v, 1, restriction)) + len(k_hop(g, v, 2, restriction))


@njit(cache=True)
def _initial_two_hop(indptr, indices, n):
    td = np.zeros(n, dtype=np.int64)
    mark = np.full(n, -1, dtype=np.int64)
    for v in range(n):
        mark[v] = v
        c = 0
        for a in range(indptr[v], indptr[v + 1]):
            u = indices[a]
            if mark[u] != v:
                mark[u] = v
                c += 1
            for b in range(indptr[u], indptr[u + 1]):
                w = indices[b]
                if mark[w] != v:
                    mark[w] = v
                    c += 1
        td[v] = c
    return td


@njit(cache=True)
def _less(td, a, b):
    return td[a] < td[b] or (td[a] == td[b] and a < b)


@njit(cache=True)
def _sift_up(heap, pos, td, i):
    x = heap[i]
    while i > 0:
        p = (i - 1) >> 1
        y = heap[p]
        if _less(td, x, y):
            heap[i] = y
            pos[y] = i
            i = p
        else:
            break
    heap[i] = x
    pos[x] = i


@njit(cache=True)
def _sift_down(heap, pos, td, i, size):
    x = heap[i]
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        if c + 1 < size and _less(td, heap[c + 1], heap[c]):
            c += 1
        y = heap[c]
        if _less(td, y, x):
            heap[i] = y
            pos[y] = i
            i = c
        else:
            break
    heap[i] = x
    pos[x] = i


@njit(cache=True)
def _has_other_common(indptr, indices, alive, a, b, v):
    i, ie = indptr[a], indptr[a + 1]
    j, je = indptr[b], indptr[b + 1]
    while i < ie and j < je:
        x = indices[i]
        y = indices[j]
        if x < y:
            i += 1
        elif y < x:
            j += 1
        else:
            if x != v and alive[x]:
                return True
            i += 1
            j += 1
    return False


@njit(cache=True)
def _degeneracy(indptr, indices, n):
    td = _initial_two_hop(indptr, indices, n)
    heap = np.arange(n, dtype=np.int64)
    pos = np.arange(n, dtype=np.int64)
    for i in range(n // 2 - 1, -1, -1):
        _sift_down(heap, pos, td, i, n)
    alive = np.ones(n, dtype=np.bool_)
    mark = np.full(n, -1, dtype=np.int64)
    eta = np.empty(n, dtype=np.int64)
    resid = np.zeros(n, dtype=np.int64)
    nbuf = np.empty(n, dtype=np.int64)
    size = n
    for step in range(n):
        v = heap[0]
        size -= 1
        if size > 0:
            heap[0] = heap[size]
            pos[heap[0]] = 0
            _sift_down(heap, pos, td, 0, size)
        eta[step] = v
        resid[v] = td[v]
        mark[v] = step
        cnt = 0
        # v leaves the 1-hop and 2-hop sets of its surviving neighbourhood
        for a in range(indptr[v], indptr[v + 1]):
            u = indices[a]
            if not alive[u]:
                continue
            nbuf[cnt] = u
            cnt += 1
            mark[u] = step
            td[u] -= 1
            _sift_up(heap, pos, td, pos[u])
            for b in range(indptr[u], indptr[u + 1]):
                w = indices[b]
                if alive[w] and mark[w] != step:
                    mark[w] = step
                    td[w] -= 1
                    _sift_up(heap, pos, td, pos[w])
        # neighbour pairs whose only common neighbour was v stop being 2-hop
        for x in range(cnt):
            a = nbuf[x]
            for y in range(x + 1, cnt):
                b = nbuf[y]
                if not _has_other_common(indptr, indices, alive, a, b, v):
                    td[a] -= 1
                    td[b] -= 1
                    _sift_up(heap, pos, td, pos[a])
                    _sift_up(heap, pos, td, pos[b])
        alive[v] = False
    return eta, resid


def compute_degeneracy_ordering(g: BipartiteGraph) -> DegeneracyOrdering:
    """Repeatedly remove the vertex of minimum residual 2-hop degree.

    Ties go to the smallest unified id.  Runs in ``O(n * Delta^2 log n)``.
    """
    n = g.n
    if n == 0:
        e = np.zeros(0, dtype=np.int64)
        return DegeneracyOrdering(e, e.copy(), 0, e.copy())
    eta, resid = _degeneracy(g.indptr, g.indices, n)
    rank = np.empty(n, dtype=np.int64)
    rank[eta] = np.arange(n)
    return DegeneracyOrdering(eta, rank, int(resid.max()), resid)


def forward_khop(g: BipartiteGraph, ord: DegeneracyOrdering, v: int, k: int) -> set[int]:
    """``N^k(v)`` measured in the full graph, kept only if ranked after ``v``."""
    r = ord.rank
    rv = r[v]
    return {w for w in k_hop(g, v, k) if r[w] > rv}


def format_ordering(g: BipartiteGraph, ord: DegeneracyOrdering) -> str:
    """One ``side:label rank residual`` line per vertex, in removal order."""
    out = []
    for v in ord.eta.tolist():
        side = "L" if v < g.n_left else "R"
        out.append(f"{side}:{g.label(v)} {ord.rank[v]} {ord.residual_degrees[v]}\n")
    return "".join(out)
