"""Bipartite graph container, s-biplex predicates and edge-list I/O.

Vertices use one dense id space: left vertices occupy ``[0, n_left)`` and
right vertices ``[n_left, n)``.  Adjacency is stored in CSR form with sorted
neighbour lists; a tuple of frozensets is built lazily for set algebra in the
search code.
"""

from __future__ import annotations

import io
import math
from collections import deque
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import EmptyGraphError, GraphParseError, ParameterError


class BipartiteGraph:
    """Immutable bipartite graph over unified vertex ids.

    Parameters
    ----------
    n_left, n_right : int
        Side sizes.
    edges : array-like of shape (m, 2)
        Pairs ``(left_index, right_index)`` with *side-local* indices,
        i.e. ``0 <= left_index < n_left`` and ``0 <= right_index < n_right``.
        Duplicates are collapsed.
    left_labels, right_labels : sequence of int, optional
        External ids per internal index; default to the local index.
    """

    def __init__(self, n_left, n_right, edges=(), left_labels=None, right_labels=None):
        self.n_left = int(n_left)
        self.n_right = int(n_right)
        n = self.n_left + self.n_right
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e[:, 0].min() < 0 or e[:, 0].max() >= self.n_left:
                raise ValueError("left endpoint out of range")
            if e[:, 1].min() < 0 or e[:, 1].max() >= self.n_right:
                raise ValueError("right endpoint out of range")
            e = np.unique(e, axis=0)
        u = e[:, 0]
        v = e[:, 1] + self.n_left
        self.m = len(e)
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=self.indptr[1:])
        self.indices = dst.astype(np.int64)
        self.degree = np.diff(self.indptr)
        self.left_labels = (np.arange(self.n_left, dtype=np.int64) if left_labels is None
                            else np.asarray(left_labels, dtype=np.int64))
        self.right_labels = (np.arange(self.n_right, dtype=np.int64) if right_labels is None
                             else np.asarray(right_labels, dtype=np.int64))
        self.skipped_lines = 0

    @property
    def n(self) -> int:
        return self.n_left + self.n_right

    def __repr__(self):
        return f"BipartiteGraph(n_left={self.n_left}, n_right={self.n_right}, m={self.m})"

    def is_left(self, v: int) -> bool:
        return v < self.n_left

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @cached_property
    def adj(self) -> tuple[frozenset, ...]:
        """Neighbour sets, one per vertex."""
        ind = self.indices.tolist()
        ptr = self.indptr.tolist()
        return tuple(frozenset(ind[ptr[v]:ptr[v + 1]]) for v in range(self.n))

    @property
    def left(self) -> range:
        return range(self.n_left)

    @property
    def right(self) -> range:
        return range(self.n_left, self.n)

    def label(self, v: int) -> int:
        """External id of ``v`` within its side's namespace."""
        if v < self.n_left:
            return int(self.left_labels[v])
        return int(self.right_labels[v - self.n_left])

    def edge_array(self) -> np.ndarray:
        """Edges as side-local ``(left, right)`` index pairs, sorted."""
        src = np.repeat(np.arange(self.n_left), self.degree[:self.n_left])
        dst = self.indices[:self.indptr[self.n_left]] - self.n_left
        return np.stack([src, dst], axis=1)

    def validate(self) -> None:
        """Raise AssertionError if a structural invariant is broken."""
        n, nl = self.n, self.n_left
        assert len(self.indptr) == n + 1 and self.indptr[0] == 0
        assert self.indptr[-1] == 2 * self.m
        for v in range(n):
            nb = self.neighbors(v)
            assert np.all(np.diff(nb) > 0), f"neighbours of {v} not strictly increasing"
            if v < nl:
                assert np.all(nb >= nl), f"left vertex {v} has a same-side neighbour"
            else:
                assert np.all(nb < nl), f"right vertex {v} has a same-side neighbour"
        adj = self.adj
        for v in range(n):
            for u in adj[v]:
                assert v in adj[u], f"asymmetric edge {v}-{u}"


# ---------------------------------------------------------------------------
# I/O and generation

def parse_edge_list(text, strict: bool = True) -> BipartiteGraph:
    """Parse a two-column edge list into a :class:`BipartiteGraph`.

    ``text`` may be ``str``, ``bytes`` or a text/binary file object.  Lines
    starting with ``%`` or ``#`` are comments.  Left and right ids live in
    separate namespaces and are remapped to dense indices in ascending order.
    A ``% m n_left n_right`` comment fixes the side sizes (keeping isolated
    vertices) when every id fits them, 0- or 1-based.
    With ``strict=False`` malformed lines are skipped and counted in
    ``graph.skipped_lines``.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode()
    stream = io.StringIO(text) if isinstance(text, str) else text
    pairs = []
    skipped = 0
    sizes = None
    for lineno, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            line = line.decode()
        line = line.strip()
        if not line or line[0] in "%#":
            head = line[1:].split()
            if len(head) == 3 and all(t.isdigit() for t in head):
                sizes = int(head[1]), int(head[2])
            continue
        toks = line.split()
        try:
            if len(toks) != 2:
                raise ValueError(f"expected 2 columns, got {len(toks)}")
            a, b = int(toks[0]), int(toks[1])
            if a < 0 or b < 0:
                raise ValueError("negative vertex id")
        except ValueError as exc:
            if strict:
                raise GraphParseError(f"line {lineno}: {exc}", lineno=lineno) from None
            skipped += 1
            continue
        pairs.append((a, b))
    if not pairs:
        raise EmptyGraphError("edge list contains no data lines")
    raw = np.array(pairs, dtype=np.int64)
    left_labels, li = np.unique(raw[:, 0], return_inverse=True)
    right_labels, ri = np.unique(raw[:, 1], return_inverse=True)
    if sizes is not None:
        # a "% m n_left n_right" header keeps isolated vertices (0- or 1-based ids)
        for base in (0, 1):
            if raw[:, 0].min() >= base and raw[:, 1].min() >= base and \
                    raw[:, 0].max() < sizes[0] + base and raw[:, 1].max() < sizes[1] + base:
                left_labels = np.arange(base, sizes[0] + base)
                right_labels = np.arange(base, sizes[1] + base)
                li, ri = raw[:, 0] - base, raw[:, 1] - base
                break
    g = BipartiteGraph(len(left_labels), len(right_labels),
                       np.stack([li.ravel(), ri.ravel()], axis=1),
                       left_labels, right_labels)
    g.skipped_lines = skipped
    return g


def read_edge_list(path, strict: bool = True) -> BipartiteGraph:
    with open(path) as fh:
        return parse_edge_list(fh, strict=strict)


def format_edge_list(g: BipartiteGraph) -> str:
    """Serialise ``g`` as ``left right`` lines using external labels."""
    e = g.edge_array()
    header = f"% bip unweighted\n% {g.m} {g.n_left} {g.n_right}\n"
    lines = [f"{g.left_labels[a]} {g.right_labels[b]}" for a, b in e]
    return header + "".join(line + "\n" for line in lines)


def write_edge_list(g: BipartiteGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_edge_list(g))


def max_density(n_left: int, n_right: int) -> float:
    return 2.0 * n_left * n_right / (n_left + n_right)


def generate_er(n_left: int, n_right: int, density: float, seed: int) -> BipartiteGraph:
    """Uniform random bipartite graph with an exact edge count.

    ``density`` is ``2m / (n_left + n_right)``; the edge count is that value
    rounded half-up, and the edges are drawn without replacement from all
    ``n_left * n_right`` pairs.
    """
    if n_left < 1 or n_right < 1:
        raise ParameterError("both sides need at least one vertex")
    hi = max_density(n_left, n_right)
    if not (0.0 <= density <= hi + 1e-12):
        raise ParameterError(f"density {density} outside [0, {hi:g}]")
    m = min(int(math.floor(density * (n_left + n_right) / 2.0 + 0.5)), n_left * n_right)
    rng = np.random.default_rng(seed)
    flat = np.sort(rng.choice(n_left * n_right, size=m, replace=False))
    edges = np.stack([flat // n_right, flat % n_right], axis=1)
    return BipartiteGraph(n_left, n_right, edges)


def from_biadjacency(rows) -> BipartiteGraph:
    """Build a graph from a 0/1 biadjacency matrix (rows = left side)."""
    a = np.asarray(rows, dtype=bool)
    return BipartiteGraph(a.shape[0], a.shape[1], np.argwhere(a))


# ---------------------------------------------------------------------------
# Predicates and neighbourhoods

def anti_neighbors(g: BipartiteGraph, v: int, scope: Iterable[int]) -> list[int]:
    """Members of ``scope`` on the opposite side of ``v`` not adjacent to it."""
    left = v < g.n_left
    nb = g.adj[v]
    return sorted(w for w in scope if (w < g.n_left) != left and w not in nb)


def k_hop(g: BipartiteGraph, v: int, k: int, restriction=None) -> set[int]:
    """Vertices at shortest-path distance exactly ``k`` from ``v``.

    With ``restriction`` the BFS only walks through that vertex subset.
    """
    allowed = None if restriction is None else set(restriction) | {v}
    adj = g.adj
    seen = {v}
    frontier = {v}
    for _ in range(k):
        nxt = set()
        for u in frontier:
            for w in adj[u]:
                if w not in seen and (allowed is None or w in allowed):
                    nxt.add(w)
        seen |= nxt
        frontier = nxt
        if not frontier:
            break
    return frontier


def _split(g: BipartiteGraph, vs) -> tuple[set, set]:
    vs = set(vs)
    return {v for v in vs if v < g.n_left}, {v for v in vs if v >= g.n_left}


def is_s_biplex(g: BipartiteGraph, vs, s: int) -> bool:
    left, right = _split(g, vs)
    adj = g.adj
    nl, nr = len(left), len(right)
    return (all(nr - len(adj[u] & right) <= s for u in left)
            and all(nl - len(adj[u] & left) <= s for u in right))


def is_maximal_s_biplex(g: BipartiteGraph, vs, s: int) -> bool:
    vs = set(vs)
    if not is_s_biplex(g, vs, s):
        return False
    return not any(is_s_biplex(g, vs | {u}, s) for u in range(g.n) if u not in vs)


def induced_subgraph(g: BipartiteGraph, vs) -> tuple[BipartiteGraph, np.ndarray]:
    """Subgraph on ``vs`` reindexed densely.

    Returns ``(sub, mapping)`` where ``mapping[i]`` is the original id of the
    sub-graph vertex ``i``; left members keep ascending order before right
    members, so the mapping is the identity when ``vs`` is everything.
    """
    vs = np.unique(np.asarray(sorted(vs), dtype=np.int64))
    left = vs[vs < g.n_left]
    right = vs[vs >= g.n_left]
    mapping = np.concatenate([left, right])
    local = {int(v): i for i, v in enumerate(left)}
    local.update({int(v): i for i, v in enumerate(right)})
    adj = g.adj
    rset = set(right.tolist())
    edges = [(local[u], local[w]) for u in left.tolist() for w in adj[u] if w in rset]
    sub = BipartiteGraph(len(left), len(right), edges,
                         g.left_labels[left], g.right_labels[right - g.n_left])
    return sub, mapping


def bfs_distances(g: BipartiteGraph, v: int) -> dict[int, int]:
    """Shortest-path distance from ``v`` to every reachable vertex."""
    dist = {v: 0}
    q = deque([v])
    adj = g.adj
    while q:
        u = q.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist
