"""Search state, solutions and the shared top-k pool."""

from __future__ import annotations

import heapq
import itertools
import threading
from dataclasses import dataclass, field

from .bigraph import BipartiteGraph


@dataclass(frozen=True)
class SearchParams:
    s: int
    k: int
    theta_l: int
    theta_r: int
    time_limit: float | None = None

    def __post_init__(self):
        from .errors import ParameterError

        if self.s < 1:
            raise ParameterError("s must be >= 1")
        if self.k < 1:
            raise ParameterError("k must be >= 1")
        lo = 2 * self.s + 1
        if self.theta_l < lo or self.theta_r < lo:
            raise ParameterError(
                f"size lower bounds must be >= 2s+1 = {lo}, got ({self.theta_l}, {self.theta_r})")


@dataclass(frozen=True)
class Solution:
    left: tuple
    right: tuple

    @classmethod
    def from_vertices(cls, g: BipartiteGraph, vs) -> "Solution":
        vs = sorted(vs)
        return cls(tuple(v for v in vs if v < g.n_left), tuple(v for v in vs if v >= g.n_left))

    @property
    def size(self) -> int:
        return len(self.left) + len(self.right)

    @property
    def vertices(self) -> tuple:
        return self.left + self.right

    def __len__(self):
        return self.size


class SolutionPool:
    """The ``k`` largest distinct solutions seen so far.

    ``threshold`` is the size of the k-th entry, or 0 while fewer than ``k``
    solutions are held; it never decreases.  Among equal sizes the earliest
    accepted entry survives eviction.  Offers are serialised by a lock so the
    pool can be shared between worker threads.
    """

    def __init__(self, k: int):
        self.k = k
        self._heap = []            # (size, -seq, solution)
        self._seen = set()
        self._seq = itertools.count()
        self._lock = threading.Lock()
        self.threshold = 0
        self.threshold_history = []
        self.partial = False

    def __len__(self):
        return len(self._heap)

    def __iter__(self):
        return iter(self.solutions())

    @property
    def full(self) -> bool:
        return len(self._heap) >= self.k

    def offer(self, sol: Solution) -> bool:
        key = (sol.left, sol.right)
        with self._lock:
            if key in self._seen:
                return False
            if len(self._heap) >= self.k and sol.size <= self.threshold:
                return False
            self._seen.add(key)
            heapq.heappush(self._heap, (sol.size, -next(self._seq), sol))
            if len(self._heap) > self.k:
                _, _, old = heapq.heappop(self._heap)
                self._seen.discard((old.left, old.right))
            if len(self._heap) >= self.k and self._heap[0][0] != self.threshold:
                self.threshold = self._heap[0][0]
                self.threshold_history.append(self.threshold)
            return True

    def solutions(self) -> list[Solution]:
        """Entries by size descending, ties in acceptance order."""
        return [sol for _, _, sol in sorted(self._heap, key=lambda t: (-t[0], -t[1]))]

    def sizes(self) -> list[int]:
        return [sol.size for sol in self.solutions()]


def pool_offer(pool: SolutionPool, sol: Solution) -> bool:
    return pool.offer(sol)


@dataclass
class SearchState:
    """Disjoint partition of live vertices into P (partial), C (candidates), X (excluded).

    Anti-neighbour counts are derived from the side sets on demand and cached
    per state; every mutating method drops the cache.
    """

    g: BipartiteGraph
    p_l: set = field(default_factory=set)
    p_r: set = field(default_factory=set)
    c_l: set = field(default_factory=set)
    c_r: set = field(default_factory=set)
    x_l: set = field(default_factory=set)
    x_r: set = field(default_factory=set)

    def __post_init__(self):
        self._apc = None

    @classmethod
    def build(cls, g: BipartiteGraph, p=(), c=(), x=()) -> "SearchState":
        nl = g.n_left
        st = cls(g)
        for vs, (sl, sr) in ((p, (st.p_l, st.p_r)), (c, (st.c_l, st.c_r)), (x, (st.x_l, st.x_r))):
            for v in vs:
                (sl if v < nl else sr).add(v)
        return st

    @classmethod
    def root(cls, g: BipartiteGraph) -> "SearchState":
        return cls(g, c_l=set(g.left), c_r=set(g.right))

    def copy(self) -> "SearchState":
        return SearchState(self.g, set(self.p_l), set(self.p_r), set(self.c_l),
                           set(self.c_r), set(self.x_l), set(self.x_r))

    # -- views -----------------------------------------------------------
    @property
    def p(self) -> set:
        return self.p_l | self.p_r

    @property
    def c(self) -> set:
        return self.c_l | self.c_r

    @property
    def x(self) -> set:
        return self.x_l | self.x_r

    def pc_size(self) -> int:
        return len(self.p_l) + len(self.p_r) + len(self.c_l) + len(self.c_r)

    def left_size(self) -> int:
        return len(self.p_l) + len(self.c_l)

    def right_size(self) -> int:
        return len(self.p_r) + len(self.c_r)

    def opposite(self, v):
        """``(P, C)`` sets on the side opposite to ``v``."""
        if v < self.g.n_left:
            return self.p_r, self.c_r
        return self.p_l, self.c_l

    def anti_p(self, v) -> int:
        po, _ = self.opposite(v)
        return len(po) - len(self.g.adj[v] & po)

    def anti_c(self, v) -> int:
        _, co = self.opposite(v)
        return len(co) - len(self.g.adj[v] & co)

    def anti_c_set(self, v) -> set:
        _, co = self.opposite(v)
        return co - self.g.adj[v]

    def anti_pc(self, v) -> int:
        if self._apc is not None and v in self._apc:
            return self._apc[v]
        return self.anti_p(v) + self.anti_c(v)

    def deg_pc(self, v) -> int:
        """Neighbours of ``v`` inside P ∪ C."""
        po, co = self.opposite(v)
        a = self.g.adj[v]
        return len(a & po) + len(a & co)

    def anti_pc_counts(self) -> dict:
        """``|N̄_{P∪C}(v)|`` for every v in P ∪ C ∪ X (cached)."""
        if self._apc is None:
            adj = self.g.adj
            pcl = self.p_l | self.c_l
            pcr = self.p_r | self.c_r
            nL, nR = len(pcl), len(pcr)
            apc = {}
            for group in (self.p_l, self.c_l, self.x_l):
                for v in group:
                    apc[v] = nR - len(adj[v] & pcr)
            for group in (self.p_r, self.c_r, self.x_r):
                for v in group:
                    apc[v] = nL - len(adj[v] & pcl)
            self._apc = apc
        return self._apc

    def anti_p_counts(self) -> dict:
        return {v: self.anti_p(v) for v in itertools.chain(self.p_l, self.p_r, self.c_l,
                                                          self.c_r, self.x_l, self.x_r)}

    # -- mutation --------------------------------------------------------
    def _touch(self):
        self._apc = None

    def to_p(self, vs):
        nl = self.g.n_left
        for v in vs:
            if v < nl:
                self.c_l.discard(v)
                self.p_l.add(v)
            else:
                self.c_r.discard(v)
                self.p_r.add(v)
        self._touch()

    def to_x(self, vs):
        nl = self.g.n_left
        for v in vs:
            if v < nl:
                self.c_l.discard(v)
                self.x_l.add(v)
            else:
                self.c_r.discard(v)
                self.x_r.add(v)
        self._touch()

    def drop(self, vs):
        """Remove vertices from C and X entirely."""
        nl = self.g.n_left
        for v in vs:
            if v < nl:
                self.c_l.discard(v)
                self.x_l.discard(v)
            else:
                self.c_r.discard(v)
                self.x_r.discard(v)
        self._touch()

    # -- checks ----------------------------------------------------------
    def p_is_feasible(self, s: int) -> bool:
        adj = self.g.adj
        nl, nr = len(self.p_l), len(self.p_r)
        return (all(nr - len(adj[u] & self.p_r) <= s for u in self.p_l)
                and all(nl - len(adj[u] & self.p_l) <= s for u in self.p_r))

    def check_invariants(self, s: int) -> None:
        sets = [self.p_l, self.p_r, self.c_l, self.c_r, self.x_l, self.x_r]
        total = sum(len(t) for t in sets)
        assert len(set().union(*sets)) == total, "P, C, X overlap"
        nl = self.g.n_left
        assert all(v < nl for t in (self.p_l, self.c_l, self.x_l) for v in t)
        assert all(v >= nl for t in (self.p_r, self.c_r, self.x_r) for v in t)
        assert self.p_is_feasible(s), "G[P] is not an s-biplex"


def filter_compatible(state: SearchState, s: int) -> SearchState:
    """Drop C and X vertices that cannot join P without breaking the s-biplex property.

    A vertex ``v`` is compatible iff it has at most ``s`` anti-neighbours in
    P and is adjacent to every P vertex that already has ``s`` of them.
    Mutates and returns ``state``.
    """
    adj = state.g.adj
    sat_l = {u for u in state.p_l if state.anti_p(u) >= s}
    sat_r = {u for u in state.p_r if state.anti_p(u) >= s}
    np_l, np_r = len(state.p_l), len(state.p_r)
    bad = []
    for group in (state.c_l, state.x_l):
        for v in group:
            a = adj[v]
            if np_r - len(a & state.p_r) > s or not sat_r <= a:
                bad.append(v)
    for group in (state.c_r, state.x_r):
        for v in group:
            a = adj[v]
            if np_l - len(a & state.p_l) > s or not sat_l <= a:
                bad.append(v)
    if bad:
        state.drop(bad)
    return state
