"""Branch-and-bound enumeration of large maximal s-biplexes (MVBP).

The search keeps a partial solution P, candidates C and an exclusion set X.
Each node filters incompatible vertices, applies the pruning rules in a fixed
order, then branches on a pivot either inside P (several branches, one per
admissible prefix of its candidate anti-neighbours) or inside C (include /
exclude).  Nodes are processed depth-first from an explicit stack.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .bigraph import BipartiteGraph
from .bounds import INF, SideBounds, initial_bounds, reduce_to_fixpoint
from .errors import ContractError, InfeasibleError, SearchTimeout
from .state import (SearchParams, SearchState, Solution, SolutionPool,
                    filter_compatible, pool_offer)

__all__ = [
    "Decision", "Pivot", "SearchConfig", "SearchStats", "SearchContext",
    "filter_compatible", "prune", "select_pivot", "branch_br1", "branch_br2",
    "mvbpf", "mvbp", "pool_offer", "SearchState", "Solution", "SolutionPool",
]


class Decision(enum.Enum):
    CONTINUE = "continue"
    RECORD = "record"
    RETURN = "return"


class Pivot(NamedTuple):
    in_p: bool
    v: int


@dataclass
class SearchConfig:
    """Switches for the pruning machinery.

    ``pr6`` is ``"safe"`` (force only anti-neighbours whose inclusion can
    never overload another vertex), ``"literal"`` (force every candidate
    anti-neighbour of the pivot) or ``None``.
    """

    pr2: bool = True
    pr3: bool = True
    pr5: bool = True
    pr6: str | None = "safe"
    node_reductions: bool = False
    use_r5: bool = True
    check_solutions: bool = False


@dataclass
class SearchStats:
    nodes: int = 0
    branches: int = 0
    records: int = 0
    subproblems: int = 0

    def merge(self, other: "SearchStats") -> None:
        self.nodes += other.nodes
        self.branches += other.branches
        self.records += other.records
        self.subproblems += other.subproblems


@dataclass
class SearchContext:
    params: SearchParams
    pool: SolutionPool
    config: SearchConfig = field(default_factory=SearchConfig)
    stats: SearchStats = field(default_factory=SearchStats)
    deadline: float | None = None
    on_leaf: Callable | None = None

    @property
    def s(self) -> int:
        return self.params.s

    def tick(self) -> None:
        self.stats.nodes += 1
        if self.deadline is not None and time.perf_counter() > self.deadline:
            raise SearchTimeout("time limit exceeded")


def prune(state: SearchState, bounds: SideBounds, pool: SolutionPool, s: int,
          config: SearchConfig | None = None):
    """Apply PR1-PR5 in order.

    Returns ``(decision, vertices)`` where ``vertices`` is the set to record
    for :attr:`Decision.RECORD`.  A record whose side sizes fall outside
    ``bounds`` degrades to :attr:`Decision.RETURN`.
    """
    cfg = config or SearchConfig()
    # PR1
    if not (state.c_l or state.c_r or state.x_l or state.x_r):
        return _record_or_return(state, bounds, len(state.p_l), len(state.p_r), state.p)
    # PR2
    n_pc = state.pc_size()
    if cfg.pr2 and n_pc <= pool.threshold:
        return Decision.RETURN, None
    apc = state.anti_pc_counts()
    adj = state.g.adj
    # PR3
    if cfg.pr3 and (state.x_l or state.x_r):
        hi_l = {v for v in state.p_l | state.c_l if apc[v] >= s}
        hi_r = {v for v in state.p_r | state.c_r if apc[v] >= s}
        for u in state.x_l:
            if apc[u] <= s and hi_r <= adj[u]:
                return Decision.RETURN, None
        for u in state.x_r:
            if apc[u] <= s and hi_l <= adj[u]:
                return Decision.RETURN, None
    # PR4
    if all(apc[v] <= s for grp in (state.p_l, state.p_r, state.c_l, state.c_r) for v in grp):
        return _record_or_return(state, bounds, state.left_size(), state.right_size(),
                                 state.p | state.c)
    # PR5
    if cfg.pr5 and (state.left_size() < bounds.lb_l or state.right_size() < bounds.lb_r):
        return Decision.RETURN, None
    return Decision.CONTINUE, None


def _record_or_return(state, bounds, n_l, n_r, vs):
    if bounds.admits(n_l, n_r):
        return Decision.RECORD, vs
    return Decision.RETURN, vs


def select_pivot(state: SearchState, s: int) -> Pivot:
    """BR1 pivot from P if some P vertex is overloaded in P ∪ C, else BR2 pivot from C."""
    apc = state.anti_pc_counts()
    best = None
    for v in sorted(state.p_l | state.p_r):
        if apc[v] >= s + 1:
            key = (-state.anti_c(v), v)
            if best is None or key < best:
                best = key
    if best is not None:
        return Pivot(True, best[1])
    best = None
    for v in state.c_l | state.c_r:
        key = (-apc[v], v)
        if best is None or key < best:
            best = key
    if best is None or -best[0] < s + 1:
        raise ContractError("no pivot qualifies; pruning should have terminated this node")
    return Pivot(False, best[1])


def branch_br1(state: SearchState, v: int, s: int) -> list[SearchState]:
    """Children for a P pivot ``v`` with more than ``s`` anti-neighbours in P ∪ C.

    With ``u_1 < ... < u_b`` its candidate anti-neighbours and
    ``s' = s - anti_P(v)``: child i (i <= s') includes u_1..u_{i-1} and
    excludes u_i; the last child includes u_1..u_{s'} and excludes the rest.
    Children whose P stops being an s-biplex are dropped.
    """
    us = sorted(state.anti_c_set(v))
    sp = s - state.anti_p(v)
    if sp < 0:
        raise ContractError("pivot already violates the s-biplex property in P")
    children = []
    for i in range(1, sp + 1):
        child = state.copy()
        if i > 1:
            child.to_p(us[:i - 1])
        child.to_x([us[i - 1]])
        if i == 1 or child.p_is_feasible(s):
            children.append(child)
    last = state.copy()
    last.to_p(us[:sp])
    last.to_x(us[sp:])
    if last.p_is_feasible(s):
        children.append(last)
    return children


def _pr6_forced(state: SearchState, v: int, s: int, mode: str) -> list:
    if mode is None or state.anti_p(v) != 0:
        return []
    anti = state.anti_c_set(v)
    if len(anti) != s + 1:
        return []
    if mode == "literal":
        return sorted(anti)
    apc = state.anti_pc_counts()
    adj = state.g.adj
    forced = []
    for w in sorted(anti):
        if apc[w] - 1 > s:
            continue
        po, co = state.opposite(w)
        if all(apc[x] <= s for x in (po | co) - adj[w] if x != v):
            forced.append(w)
    return forced


def branch_br2(state: SearchState, v: int, s: int, pr6: str | None = "safe"):
    """``(include, exclude)`` children for a candidate pivot ``v``.

    The exclude child may pull the pivot's candidate anti-neighbours into P
    (PR6); it is ``None`` if that makes P infeasible.
    """
    forced = _pr6_forced(state, v, s, pr6)
    inc = state.copy()
    inc.to_p([v])
    exc = state.copy()
    exc.to_x([v])
    if forced:
        exc.to_p(forced)
        if not exc.p_is_feasible(s):
            exc = None
    return inc, exc


def mvbpf(state: SearchState, bounds: SideBounds, ctx: SearchContext) -> None:
    """Depth-first branch and bound from ``state``; solutions go to ``ctx.pool``.

    Raises :class:`SearchTimeout` when ``ctx.deadline`` passes; the pool is
    left consistent.
    """
    s = ctx.s
    cfg = ctx.config
    pool = ctx.pool
    stack = [(state, bounds)]
    while stack:
        st, bd = stack.pop()
        ctx.tick()
        filter_compatible(st, s)
        if cfg.node_reductions:
            bd = reduce_to_fixpoint(st, bd, pool.threshold, s, cfg.use_r5)
            if bd is None:
                continue
        decision, vs = prune(st, bd, pool, s, cfg)
        if vs is not None and ctx.on_leaf is not None:
            ctx.on_leaf(frozenset(vs))
        if decision is Decision.RECORD:
            sol = Solution.from_vertices(st.g, vs)
            if cfg.check_solutions:
                _assert_solution(st.g, sol, ctx.params)
            ctx.stats.records += 1
            pool.offer(sol)
            continue
        if decision is Decision.RETURN:
            continue
        piv = select_pivot(st, s)
        if piv.in_p:
            children = branch_br1(st, piv.v, s)
        else:
            children = [c for c in branch_br2(st, piv.v, s, cfg.pr6) if c is not None]
        ctx.stats.branches += len(children)
        for child in reversed(children):
            stack.append((child, bd))


def _assert_solution(g, sol, params):
    from .bigraph import is_maximal_s_biplex

    assert len(sol.left) >= params.theta_l and len(sol.right) >= params.theta_r, sol
    assert is_maximal_s_biplex(g, sol.vertices, params.s), sol


def mvbp(g: BipartiteGraph, params: SearchParams, config: SearchConfig | None = None,
         stats: SearchStats | None = None) -> SolutionPool:
    """Top-k maximal s-biplexes by a single search over the whole graph."""
    pool = SolutionPool(params.k)
    try:
        bounds = initial_bounds(g, params)
    except InfeasibleError:
        return pool
    deadline = None if params.time_limit is None else time.perf_counter() + params.time_limit
    ctx = SearchContext(params, pool, config or SearchConfig(), stats or SearchStats(), deadline)
    try:
        mvbpf(SearchState.root(g), bounds, ctx)
    except SearchTimeout:
        pool.partial = True
    return pool


def unbounded(g: BipartiteGraph) -> SideBounds:
    """Bounds that admit every side size."""
    return SideBounds(0, 0, INF, INF)
