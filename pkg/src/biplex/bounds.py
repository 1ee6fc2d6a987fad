"""Single-side size bounds and the reduction rules built on them.

All degree-like quantities are measured inside the current P ∪ C, which is
never weaker than measuring them in the input graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations

from .bigraph import BipartiteGraph
from .errors import ContractError, InfeasibleError
from .state import SearchParams, SearchState, filter_compatible

INF = math.inf


class SubproblemInfeasible(Exception):
    """Raised by reductions when no solution can contain the current P."""


@dataclass(frozen=True)
class SideBounds:
    lb_l: int
    lb_r: int
    ub_l: float
    ub_r: float

    def admits(self, n_left: int, n_right: int) -> bool:
        return self.lb_l <= n_left <= self.ub_l and self.lb_r <= n_right <= self.ub_r

    def tighten(self, other: "SideBounds") -> "SideBounds":
        return SideBounds(max(self.lb_l, other.lb_l), max(self.lb_r, other.lb_r),
                          min(self.ub_l, other.ub_l), min(self.ub_r, other.ub_r))


def _kth_largest(values, k):
    vals = sorted(values, reverse=True)
    return vals[k - 1] if 0 < k <= len(vals) else None


def initial_bounds(g: BipartiteGraph, p: SearchParams) -> SideBounds:
    """Root bounds from the degree order statistics of each side."""
    if g.n_left < p.theta_l or g.n_right < p.theta_r:
        raise InfeasibleError(
            f"sides ({g.n_left}, {g.n_right}) smaller than lower bounds ({p.theta_l}, {p.theta_r})")
    deg = g.degree.tolist()
    d_r = _kth_largest(deg[g.n_left:], p.theta_r)
    d_l = _kth_largest(deg[:g.n_left], p.theta_l)
    return SideBounds(p.theta_l, p.theta_r, min(d_r + p.s, g.n_left), min(d_l + p.s, g.n_right))


def lemma1_ub(g: BipartiteGraph, p_l, p_r, s: int, scope=None):
    """Caps ``(|B_L|, |B_R|)`` by the smallest P degree on the other side, plus s.

    ``scope`` restricts degrees to a vertex set (e.g. the current P ∪ C).
    """
    adj = g.adj
    if scope is None:
        deg = lambda u: len(adj[u])  # noqa: E731
    else:
        scope = scope if isinstance(scope, (set, frozenset)) else set(scope)
        deg = lambda u: len(adj[u] & scope)  # noqa: E731
    cap_l = min((deg(u) for u in p_r), default=INF) + s
    cap_r = min((deg(u) for u in p_l), default=INF) + s
    return cap_l, cap_r


def _is_fixed(state: SearchState, side: str, bounds: SideBounds | None) -> bool:
    if side == "R":
        return not state.c_r or (bounds is not None and len(state.p_r) >= bounds.ub_r)
    return not state.c_l or (bounds is not None and len(state.p_l) >= bounds.ub_l)


def lemma2_fixed_ub(state: SearchState, side: str, s: int, bounds: SideBounds | None = None) -> int:
    """Upper bound on the *other* side's size once ``side`` ('L' or 'R') is fixed.

    With the right side fixed this returns
    ``|P_L| + |common C_L neighbours of P_R| + sum_u min(s - anti_P(u), anti_C(u))``
    over ``u`` in P_R, capped at ``|P_L ∪ C_L|``; symmetric for 'L'.
    """
    if not _is_fixed(state, side, bounds):
        raise ContractError(f"side {side} is not fixed")
    adj = state.g.adj
    if side == "R":
        fixed_p, other_p, other_c = state.p_r, state.p_l, state.c_l
    else:
        fixed_p, other_p, other_c = state.p_l, state.p_r, state.c_r
    common = set(other_c)
    total = 0
    n_other_p = len(other_p)
    for u in fixed_p:
        a = adj[u]
        common &= a
        total += min(s - (n_other_p - len(a & other_p)), len(other_c) - len(a & other_c))
    return min(len(other_p) + len(common) + total, len(other_p) + len(other_c))


def lemma3_lb(lb: int, bounds: SideBounds, p: SearchParams | None = None) -> SideBounds:
    """Raise side lower bounds so that a solution can still beat size ``lb``."""
    if lb <= 0:
        return bounds
    lb_l = bounds.lb_l if bounds.ub_r == INF else max(bounds.lb_l, int(lb + 1 - bounds.ub_r))
    lb_r = bounds.lb_r if bounds.ub_l == INF else max(bounds.lb_r, int(lb + 1 - bounds.ub_l))
    if p is not None:
        lb_l, lb_r = max(lb_l, p.theta_l), max(lb_r, p.theta_r)
    return replace(bounds, lb_l=lb_l, lb_r=lb_r)


def update_bounds(state: SearchState, bounds: SideBounds, lb: int, s: int) -> SideBounds:
    """Tighten ``bounds`` for the current state; never loosens any of them."""
    adj = state.g.adj
    pcl = state.p_l | state.c_l
    pcr = state.p_r | state.c_r
    ub_l = min(bounds.ub_l, len(pcl))
    ub_r = min(bounds.ub_r, len(pcr))
    # min residual degree over P on the other side
    for u in state.p_r:
        ub_l = min(ub_l, len(adj[u] & pcl) + s)
    for u in state.p_l:
        ub_r = min(ub_r, len(adj[u] & pcr) + s)
    # any solution keeps >= lb_r vertices of P_R ∪ C_R, so its smallest
    # right degree is at most the lb_r-th largest one there
    if bounds.lb_r > 0:
        d = _kth_largest([len(adj[u] & pcl) for u in pcr], bounds.lb_r)
        ub_l = min(ub_l, d + s) if d is not None else -1
    if bounds.lb_l > 0:
        d = _kth_largest([len(adj[u] & pcr) for u in pcl], bounds.lb_l)
        ub_r = min(ub_r, d + s) if d is not None else -1
    cur = SideBounds(bounds.lb_l, bounds.lb_r, ub_l, ub_r)
    if _is_fixed(state, "R", cur):
        ub_l = min(ub_l, lemma2_fixed_ub(state, "R", s, cur))
    if _is_fixed(state, "L", cur):
        ub_r = min(ub_r, lemma2_fixed_ub(state, "L", s, cur))
    return lemma3_lb(lb, SideBounds(bounds.lb_l, bounds.lb_r, ub_l, ub_r))


def check_r4(bounds: SideBounds) -> bool:
    """False iff a side's lower bound exceeds its upper bound."""
    return not (bounds.lb_l > bounds.ub_l or bounds.lb_r > bounds.ub_r)


def reduce_r1(state: SearchState, bounds: SideBounds, s: int) -> set:
    """Delete candidates with too few neighbours to reach the other side's lower bound.

    Peels to a fixpoint and returns every removed vertex.
    """
    adj = state.g.adj
    removed = set()
    while True:
        pcl = state.p_l | state.c_l
        pcr = state.p_r | state.c_r
        bad = [u for u in state.c_l if len(adj[u] & pcr) + s < bounds.lb_r]
        bad += [u for u in state.c_r if len(adj[u] & pcl) + s < bounds.lb_l]
        if not bad:
            return removed
        state.drop(bad)
        removed.update(bad)


def _force(state: SearchState, vs, s: int) -> None:
    if not vs:
        return
    state.to_p(vs)
    if not state.p_is_feasible(s):
        raise SubproblemInfeasible("forced vertices break the s-biplex property")
    filter_compatible(state, s)


def reduce_r2(state: SearchState, bounds: SideBounds, s: int):
    """Force all remaining neighbours of a P vertex whose degree is exactly tight.

    A P_L vertex with ``lb_r - s`` neighbours left in P_R ∪ C_R needs all of
    them; afterwards candidates with more than ``s`` anti-neighbours in P are
    dropped.  Returns ``(forced, removed)``.
    """
    adj = state.g.adj
    forced = set()
    before = state.c | state.x
    pcl = state.p_l | state.c_l
    pcr = state.p_r | state.c_r
    for u in state.p_l:
        d = len(adj[u] & pcr)
        if d + s < bounds.lb_r:
            raise SubproblemInfeasible("P vertex cannot reach lb_r")
        if d + s == bounds.lb_r:
            forced |= adj[u] & state.c_r
    for u in state.p_r:
        d = len(adj[u] & pcl)
        if d + s < bounds.lb_l:
            raise SubproblemInfeasible("P vertex cannot reach lb_l")
        if d + s == bounds.lb_l:
            forced |= adj[u] & state.c_l
    _force(state, forced, s)
    filter_compatible(state, s)
    removed = before - forced - state.c - state.x
    return forced, removed


def reduce_r3(state: SearchState, bounds: SideBounds, s: int | None = None) -> set:
    """If a side has exactly ``lb`` vertices left in P ∪ C, all of them are needed."""
    forced = set()
    if state.c_r and len(state.p_r) + len(state.c_r) == bounds.lb_r:
        forced |= state.c_r
    if state.c_l and len(state.p_l) + len(state.c_l) == bounds.lb_l:
        forced |= state.c_l
    forced = set(forced)
    if forced:
        state.to_p(forced)
        if s is not None:
            if not state.p_is_feasible(s):
                raise SubproblemInfeasible("forced side breaks the s-biplex property")
            filter_compatible(state, s)
    return forced


def reduce_r5(g: BipartiteGraph, bounds: SideBounds, s: int, scope=None) -> list:
    """Same-side pairs sharing fewer than ``lb_opposite - 2s`` neighbours.

    Such pairs can never appear together in a solution.  ``scope`` limits
    both the pairs and the counted neighbours to a vertex subset.
    """
    adj = g.adj
    verts = range(g.n) if scope is None else sorted(scope)
    sc = None if scope is None else set(scope)
    out = []
    for side_l in (True, False):
        members = [v for v in verts if (v < g.n_left) == side_l]
        need = (bounds.lb_r if side_l else bounds.lb_l) - 2 * s
        if need <= 0:
            continue
        for u, v in combinations(members, 2):
            common = adj[u] & adj[v]
            if sc is not None:
                common = common & sc
            if len(common) < need:
                out.append((u, v))
    return out


def apply_r5(state: SearchState, bounds: SideBounds, s: int) -> set:
    """Drop candidates that conflict with some P vertex on their side."""
    adj = state.g.adj
    pcl = state.p_l | state.c_l
    pcr = state.p_r | state.c_r
    removed = set()
    need_r = bounds.lb_r - 2 * s
    need_l = bounds.lb_l - 2 * s
    if need_r > 0 and state.p_l:
        for p in state.p_l:
            ap = adj[p] & pcr
            for q in state.p_l:
                if q != p and len(ap & adj[q]) < need_r:
                    raise SubproblemInfeasible("conflicting pair inside P")
            removed.update(c for c in state.c_l if len(ap & adj[c]) < need_r)
    if need_l > 0 and state.p_r:
        for p in state.p_r:
            ap = adj[p] & pcl
            for q in state.p_r:
                if q != p and len(ap & adj[q]) < need_l:
                    raise SubproblemInfeasible("conflicting pair inside P")
            removed.update(c for c in state.c_r if len(ap & adj[c]) < need_l)
    if removed:
        state.drop(removed)
    return removed


def reduce_to_fixpoint(state: SearchState, bounds: SideBounds, lb: int, s: int,
                       use_r5: bool = True) -> SideBounds | None:
    """Run update_bounds and R1, R2, R3, R5, R4 until nothing changes.

    Mutates ``state``; returns the tightened bounds, or ``None`` when the
    state provably holds no solution within them.
    """
    try:
        while True:
            size = (len(state.p_l), len(state.p_r), len(state.c_l), len(state.c_r))
            bounds = update_bounds(state, bounds, lb, s)
            if not check_r4(bounds):
                return None
            reduce_r1(state, bounds, s)
            reduce_r2(state, bounds, s)
            reduce_r3(state, bounds, s)
            if use_r5:
                apply_r5(state, bounds, s)
            if not check_r4(bounds):
                return None
            if state.left_size() < bounds.lb_l or state.right_size() < bounds.lb_r:
                return None
            if size == (len(state.p_l), len(state.p_r), len(state.c_l), len(state.c_r)):
                return bounds
    except SubproblemInfeasible:
        return None
