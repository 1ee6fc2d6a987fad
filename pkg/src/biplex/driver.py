"""FastMVBP: 2-hop decomposition, seed enumeration and progressive search.

Every maximal s-biplex with both sides >= 2s+1 has diameter at most 3, so it
lives inside the 3-hop ball of its earliest vertex in the 2-hop degeneracy
order.  The driver runs one small search per (anchor, seed) pair, where the
seed fixes which of the anchor's distance-3 vertices join the solution.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from numba import njit

from .bigraph import BipartiteGraph, induced_subgraph
from .bounds import SideBounds, initial_bounds, lemma3_lb, reduce_to_fixpoint
from .errors import InfeasibleError, SearchTimeout
from .order import DegeneracyOrdering, compute_degeneracy_ordering, forward_khop
from .search import SearchConfig, SearchContext, SearchStats, mvbpf
from .state import SearchParams, SearchState, SolutionPool


@dataclass
class Subproblem:
    anchor: int
    seed: tuple
    core: frozenset
    exclusion_seed: frozenset
    subgraph: BipartiteGraph | None = None
    mapping: np.ndarray | None = None

    def initial_state(self, g: BipartiteGraph) -> SearchState:
        return SearchState.build(g, p=(self.anchor, *self.seed), c=self.core, x=self.exclusion_seed)


def decompose(g: BipartiteGraph, ord: DegeneracyOrdering, i: int):
    """Vertex universe of the anchor ``eta[i]`` and the subgraph it induces.

    Returns ``(universe, n1, n2, n3, subgraph, mapping)`` where ``n1..n3`` are
    the anchor's forward k-hop sets.
    """
    v = int(ord.eta[i])
    n1 = forward_khop(g, ord, v, 1)
    n2 = forward_khop(g, ord, v, 2)
    n3 = forward_khop(g, ord, v, 3)
    universe = {v} | n1 | n2 | n3
    sub, mapping = induced_subgraph(g, universe)
    return universe, n1, n2, n3, sub, mapping


def enumerate_seeds(n3, s: int):
    """All subsets of ``n3`` with at most ``s`` members, by size then lexicographically."""
    items = sorted(n3)
    for size in range(min(s, len(items)) + 1):
        yield from combinations(items, size)


def subproblems(g: BipartiteGraph, ord: DegeneracyOrdering, i: int, s: int):
    """Unreduced subproblems of anchor ``eta[i]``, one per seed."""
    universe, n1, n2, n3, sub, mapping = decompose(g, ord, i)
    v = int(ord.eta[i])
    earlier = {int(u) for u in ord.eta[:i]}
    near_earlier = frozenset(u for u in earlier if any(w in universe for w in g.adj[u]))
    for seed in enumerate_seeds(n3, s):
        yield Subproblem(v, seed, frozenset(n1 | n2),
                         near_earlier | frozenset(n3 - set(seed)), sub, mapping)


# ---------------------------------------------------------------------------
# per-anchor candidate ball, peeled by residual degree

@njit(cache=True, nogil=True)
def _anchor_ball(indptr, indices, rank, nl, v, s, lb_l, lb_r, stamp,
                 mark, seen, dist, deg, buf, queue):
    ri = rank[v]
    cnt = 0
    mark[v] = stamp
    seen[v] = stamp
    dist[v] = 0
    buf[cnt] = v
    cnt += 1
    for a in range(indptr[v], indptr[v + 1]):
        u = indices[a]
        seen[u] = stamp
        if rank[u] > ri:
            mark[u] = stamp
            dist[u] = 1
            buf[cnt] = u
            cnt += 1
    n2_start = cnt
    for a in range(indptr[v], indptr[v + 1]):
        u = indices[a]
        for b in range(indptr[u], indptr[u + 1]):
            w = indices[b]
            if seen[w] != stamp:
                seen[w] = stamp
                if rank[w] > ri:
                    mark[w] = stamp
                    dist[w] = 2
                    buf[cnt] = w
                    cnt += 1
    n2_end = cnt
    # distance-3 vertices only have ball neighbours among forward distance-2
    # ones, so their ball degree is the hit count collected here
    n3_start = cnt
    for j in range(n2_start, n2_end):
        w = buf[j]
        for b in range(indptr[w], indptr[w + 1]):
            x = indices[b]
            if seen[x] != stamp:
                seen[x] = stamp
                if rank[x] > ri:
                    dist[x] = 3
                    deg[x] = 1
                    buf[cnt] = x
                    cnt += 1
                else:
                    dist[x] = -1
            elif dist[x] == 3 and mark[x] != stamp and rank[x] > ri:
                deg[x] += 1
    need3 = lb_l if v < nl else lb_r
    k = n3_start
    for j in range(n3_start, cnt):
        x = buf[j]
        if deg[x] + s >= need3:
            mark[x] = stamp
            buf[k] = x
            k += 1
        else:
            dist[x] = -1
    cnt = k
    for j in range(n3_start):
        x = buf[j]
        d = 0
        for b in range(indptr[x], indptr[x + 1]):
            if mark[indices[b]] == stamp:
                d += 1
        deg[x] = d
    qt = 0
    for j in range(cnt):
        x = buf[j]
        need = lb_r if x < nl else lb_l
        if deg[x] + s < need:
            mark[x] = -1
            queue[qt] = x
            qt += 1
    qh = 0
    while qh < qt:
        x = queue[qh]
        qh += 1
        for b in range(indptr[x], indptr[x + 1]):
            y = indices[b]
            if mark[y] == stamp:
                deg[y] -= 1
                need = lb_r if y < nl else lb_l
                if deg[y] + s < need:
                    mark[y] = -1
                    queue[qt] = y
                    qt += 1
    if mark[v] != stamp:
        return 0
    k = 0
    n_left = 0
    for j in range(cnt):
        x = buf[j]
        if mark[x] == stamp:
            buf[k] = x
            k += 1
            if x < nl:
                n_left += 1
    if n_left < lb_l or k - n_left < lb_r:
        return 0
    return k


@njit(cache=True, nogil=True)
def _seed_space(indptr, indices, nl, s, lb_l, lb_r, thr, ball, dist, bstamp, bmark,
                pverts, relaxed, st, inpc, isp, issat, cp, cs, dg, tstamp,
                touched, out_c, out_x, queue):
    """Compatible, degree-peeled candidates and useful exclusions for P = ``pverts``.

    Returns the number of candidates written to ``out_c`` (or -1 if no
    solution in range contains P); the exclusion count goes to ``queue[0]``
    after the call, exclusions to ``out_x``.
    """
    npl = 0
    npr = 0
    for p in pverts:
        isp[p] = st
        inpc[p] = st
        if p < nl:
            npl += 1
        else:
            npr += 1
    # P feasibility and saturation
    satl = 0
    satr = 0
    for p in pverts:
        c = 0
        for a in range(indptr[p], indptr[p + 1]):
            if isp[indices[a]] == st:
                c += 1
        anti = (npr if p < nl else npl) - c
        if anti > s:
            return -1
        if anti == s:
            issat[p] = st
            if p < nl:
                satl += 1
            else:
                satr += 1
    # counts of P and saturated-P neighbours
    nt = 0
    for p in pverts:
        for a in range(indptr[p], indptr[p + 1]):
            x = indices[a]
            if tstamp[x] != st:
                tstamp[x] = st
                cp[x] = 0
                cs[x] = 0
                touched[nt] = x
                nt += 1
            cp[x] += 1
            if issat[p] == st:
                cs[x] += 1
    need_nb_l = satr > 0 or npr > s
    need_nb_r = satl > 0 or npl > s
    nc = 0
    narrow = need_nb_l and need_nb_r
    for j in range(nt if narrow else ball.shape[0]):
        x = touched[j] if narrow else ball[j]
        if isp[x] == st or bmark[x] != bstamp:
            continue
        d = dist[x]
        if d == 0 or (d == 3 and not relaxed):
            continue
        left = x < nl
        if (need_nb_l if left else need_nb_r) and tstamp[x] != st:
            continue
        cpx = cp[x] if tstamp[x] == st else 0
        csx = cs[x] if tstamp[x] == st else 0
        if left:
            ok = npr - cpx <= s and csx == satr
        else:
            ok = npl - cpx <= s and csx == satl
        if ok:
            inpc[x] = st
            out_c[nc] = x
            nc += 1
    # residual degrees inside P ∪ C, then peel C
    for p in pverts:
        c = 0
        for a in range(indptr[p], indptr[p + 1]):
            if inpc[indices[a]] == st:
                c += 1
        dg[p] = c
    for j in range(nc):
        x = out_c[j]
        c = 0
        for a in range(indptr[x], indptr[x + 1]):
            if inpc[indices[a]] == st:
                c += 1
        dg[x] = c
    qt = 0
    for j in range(nc):
        x = out_c[j]
        if dg[x] + s < (lb_r if x < nl else lb_l):
            inpc[x] = -1
            queue[qt] = x
            qt += 1
    qh = 0
    while qh < qt:
        x = queue[qh]
        qh += 1
        for a in range(indptr[x], indptr[x + 1]):
            y = indices[a]
            if inpc[y] == st:
                dg[y] -= 1
                if isp[y] != st and dg[y] + s < (lb_r if y < nl else lb_l):
                    inpc[y] = -1
                    queue[qt] = y
                    qt += 1
    nleft = npl
    nright = npr
    for p in pverts:
        if dg[p] + s < (lb_r if p < nl else lb_l):
            return -1
    k = 0
    for j in range(nc):
        x = out_c[j]
        if inpc[x] == st:
            out_c[k] = x
            k += 1
            if x < nl:
                nleft += 1
            else:
                nright += 1
    nc = k
    if nleft < lb_l or nright < lb_r or nleft + nright <= thr:
        return -1
    # exclusions: outside vertices compatible with P that have enough
    # neighbours in P ∪ C to extend a solution within the bounds
    st2 = -st - 2
    nx = 0
    for j in range(nc + pverts.shape[0]):
        y = out_c[j] if j < nc else pverts[j - nc]
        for a in range(indptr[y], indptr[y + 1]):
            z = indices[a]
            if inpc[z] == st:
                continue
            if tstamp[z] != st2:
                if tstamp[z] == st:
                    cp_z = cp[z]
                    cs_z = cs[z]
                else:
                    cp_z = 0
                    cs_z = 0
                tstamp[z] = st2
                cp[z] = cp_z
                cs[z] = cs_z
                dg[z] = 0
                touched[nx] = z
                nx += 1
            dg[z] += 1
    k = 0
    for j in range(nx):
        z = touched[j]
        if z < nl:
            ok = npr - cp[z] <= s and cs[z] == satr and dg[z] + s >= lb_r
        else:
            ok = npl - cp[z] <= s and cs[z] == satl and dg[z] + s >= lb_l
        if ok:
            out_x[k] = z
            k += 1
    queue[0] = k
    return nc


@njit(cache=True, nogil=True)
def _advance(comb, m, s):
    """Next seed index tuple in (size, lexicographic) order; False when exhausted."""
    r = comb[0]
    i = r
    while i >= 1 and comb[i] == m - r + i - 1:
        i -= 1
    if i >= 1:
        comb[i] += 1
        for j in range(i + 1, r + 1):
            comb[j] = comb[j - 1] + 1
        return True
    r += 1
    if r > s or r > m:
        return False
    comb[0] = r
    for j in range(1, r + 1):
        comb[j] = j - 1
    return True


@njit(cache=True, nogil=True)
def _next_seed(indptr, indices, nl, s, lb_l, lb_r, thr, ball, dist, bstamp, bmark,
               v, n3, comb, pv, st0, inpc, isp, issat, cp, cs, dg, tstamp,
               touched, out_c, out_x, queue, tried):
    """Advance ``comb`` to the next seed whose subproblem survives screening.

    ``comb[0] == -1`` means "not started".  Returns the candidate count of
    the surviving seed, or -2 once all seeds are exhausted.  ``tried[0]``
    accumulates the number of seeds screened and ``tried[1]`` the stamp.
    """
    m = n3.shape[0]
    st = st0
    while True:
        if comb[0] == -1:
            comb[0] = 0
        elif not _advance(comb, m, s):
            tried[1] = st
            return -2
        r = comb[0]
        pv[0] = v
        for j in range(r):
            pv[j + 1] = n3[comb[j + 1]]
        st += 1
        tried[0] += 1
        nc = _seed_space(indptr, indices, nl, s, lb_l, lb_r, thr, ball, dist, bstamp, bmark,
                         pv[:r + 1], False, st, inpc, isp, issat, cp, cs, dg, tstamp,
                         touched, out_c, out_x, queue)
        if nc >= 0:
            tried[1] = st
            return nc


class _Scratch:
    def __init__(self, n):
        self.mark = np.full(n, -1, dtype=np.int64)
        self.seen = np.full(n, -1, dtype=np.int64)
        self.dist = np.zeros(n, dtype=np.int64)
        self.deg = np.zeros(n, dtype=np.int64)
        self.buf = np.zeros(n, dtype=np.int64)
        self.queue = np.zeros(n, dtype=np.int64)
        self.stamp = 0
        # per-seed arrays
        self.inpc = np.full(n, -1, dtype=np.int64)
        self.isp = np.full(n, -1, dtype=np.int64)
        self.issat = np.full(n, -1, dtype=np.int64)
        self.tstamp = np.full(n, -1, dtype=np.int64)
        self.cp = np.zeros(n, dtype=np.int64)
        self.cs = np.zeros(n, dtype=np.int64)
        self.dg = np.zeros(n, dtype=np.int64)
        self.touched = np.zeros(n, dtype=np.int64)
        self.out_c = np.zeros(n, dtype=np.int64)
        self.out_x = np.zeros(n, dtype=np.int64)
        self.q2 = np.zeros(n, dtype=np.int64)
        self.sst = 0

    def seed_space(self, g, s, lb_l, lb_r, thr, ball, pverts, relaxed=False):
        self.sst += 1
        nc = _seed_space(g.indptr, g.indices, g.n_left, s, lb_l, lb_r, thr, ball, self.dist,
                         self.stamp, self.mark, pverts, relaxed, self.sst, self.inpc,
                         self.isp, self.issat, self.cp, self.cs, self.dg, self.tstamp,
                         self.touched, self.out_c, self.out_x, self.q2)
        return nc


def _run_anchor(g, ord, i, bounds, ctx, scratch, peel):
    v = int(ord.eta[i])
    s = ctx.s
    pool = ctx.pool
    bd = lemma3_lb(pool.threshold, bounds)
    scratch.stamp += 1
    lb_l, lb_r = (bd.lb_l, bd.lb_r) if peel else (0, 0)
    k = _anchor_ball(g.indptr, g.indices, ord.rank, g.n_left, v, s, lb_l, lb_r,
                     scratch.stamp, scratch.mark, scratch.seen, scratch.dist,
                     scratch.deg, scratch.buf, scratch.queue)
    thr = pool.threshold if ctx.config.pr2 else -1
    if k == 0 or k <= thr:
        return
    ball = scratch.buf[:k].copy()
    n3 = np.sort(ball[scratch.dist[ball] == 3])
    # distance-3 vertices that cannot join any solution with the anchor
    if s > 1 and len(n3):
        keep = [u for u in n3.tolist()
                if scratch.seed_space(g, s, lb_l, lb_r, thr, ball,
                                      np.array([v, u], dtype=np.int64), True) >= 0]
        n3 = np.array(keep, dtype=np.int64)
    comb = np.full(s + 1, -1, dtype=np.int64)
    pv = np.zeros(s + 1, dtype=np.int64)
    tried = np.zeros(2, dtype=np.int64)
    while True:
        thr = pool.threshold if ctx.config.pr2 else -1
        if peel:
            bd = lemma3_lb(pool.threshold, bounds)
            lb_l, lb_r = bd.lb_l, bd.lb_r
        tried[0] = 0
        nc = _next_seed(g.indptr, g.indices, g.n_left, s, lb_l, lb_r, thr, ball, scratch.dist,
                        scratch.stamp, scratch.mark, v, n3, comb, pv, scratch.sst,
                        scratch.inpc, scratch.isp, scratch.issat, scratch.cp, scratch.cs,
                        scratch.dg, scratch.tstamp, scratch.touched, scratch.out_c,
                        scratch.out_x, scratch.q2, tried)
        scratch.sst = int(tried[1])
        ctx.stats.subproblems += int(tried[0])
        ctx.tick()
        if nc < 0:
            return
        nx = int(scratch.q2[0])
        st = SearchState.build(g, p=pv[:comb[0] + 1].tolist(), c=scratch.out_c[:nc].tolist(),
                               x=scratch.out_x[:nx].tolist())
        if ctx.config.node_reductions or peel:
            sb = reduce_to_fixpoint(st, bounds, pool.threshold, s, ctx.config.use_r5)
            if sb is None:
                continue
        else:
            sb = bounds
        if ctx.config.pr2 and st.pc_size() <= pool.threshold:
            continue
        mvbpf(st, sb, ctx)


def mvbpd(g: BipartiteGraph, ord: DegeneracyOrdering, bounds: SideBounds,
          ctx: SearchContext, reductions: bool = True, workers: int = 1) -> None:
    """One sweep over all anchors in ascending rank with the given side bounds."""
    n = g.n
    if workers <= 1:
        scratch = _Scratch(n)
        for i in range(n):
            _run_anchor(g, ord, i, bounds, ctx, scratch, reductions)
        return
    lock = threading.Lock()
    chunks = [range(a, min(a + 256, n)) for a in range(0, n, 256)]
    stats_all = []
    stop = threading.Event()

    def work(chunk_ids):
        scratch = _Scratch(n)
        local = SearchContext(ctx.params, ctx.pool, ctx.config, SearchStats(), ctx.deadline)
        try:
            for c in chunk_ids:
                for i in chunks[c]:
                    if stop.is_set():
                        return
                    _run_anchor(g, ord, i, bounds, local, scratch, reductions)
        except SearchTimeout:
            stop.set()
        finally:
            with lock:
                stats_all.append(local.stats)

    # strided assignment spreads cheap and expensive anchors across workers
    with ThreadPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(work, list(range(w, len(chunks), workers))) for w in range(workers)]
        for f in futs:
            f.result()
    for st in stats_all:
        ctx.stats.merge(st)
    if stop.is_set():
        raise SearchTimeout("time limit exceeded")


# ---------------------------------------------------------------------------
# progressive schedule

@dataclass
class ProgressiveSchedule:
    """Descending cut points on the left-side size; pass t covers [cuts[t+1], cuts[t]]."""

    cuts: list

    @classmethod
    def build(cls, ub_l: int, theta_l: int, eighth_cut: bool = True) -> "ProgressiveSchedule":
        ub_l = int(max(ub_l, theta_l))
        cuts = [ub_l]
        first = True
        while cuts[-1] > theta_l:
            div = 8 if (first and eighth_cut) else 2
            cuts.append(max(cuts[-1] // div, theta_l))
            first = False
        if len(cuts) == 1:
            cuts.append(theta_l)
        return cls(cuts)

    def ranges(self) -> list:
        return [(self.cuts[t + 1], self.cuts[t]) for t in range(len(self.cuts) - 1)]

    def covered(self) -> set:
        out = set()
        for lo, hi in self.ranges():
            out.update(range(lo, hi + 1))
        return out


@dataclass
class FastStats(SearchStats):
    d2: int = 0
    passes: list = field(default_factory=list)
    ordering_seconds: float = 0.0


def fast_mvbp(g: BipartiteGraph, params: SearchParams, *, decomposition: bool = True,
              progressive: bool = True, reductions: bool = True, eighth_cut: bool = True,
              workers: int = 1, config: SearchConfig | None = None,
              stats: FastStats | None = None, ordering: DegeneracyOrdering | None = None
              ) -> SolutionPool:
    """Top-k maximal s-biplexes with the decomposition/reduction/progressive pipeline.

    The three keyword switches turn the techniques off individually (for
    ablation runs); ``workers > 1`` distributes anchors over threads that
    share the pool.
    """
    pool = SolutionPool(params.k)
    stats = stats if stats is not None else FastStats()
    try:
        root = initial_bounds(g, params)
    except InfeasibleError:
        return pool
    cfg = config or SearchConfig(node_reductions=reductions)
    deadline = None if params.time_limit is None else time.perf_counter() + params.time_limit
    ctx = SearchContext(params, pool, cfg, stats, deadline)
    ord = ordering
    if decomposition and ord is None:
        t0 = time.perf_counter()
        ord = compute_degeneracy_ordering(g)
        stats.ordering_seconds = time.perf_counter() - t0
    if ord is not None:
        stats.d2 = ord.d2

    def run(bounds):
        stats.passes.append((bounds.lb_l, bounds.ub_l, bounds.lb_r, bounds.ub_r))
        if decomposition:
            mvbpd(g, ord, bounds, ctx, reductions, workers)
            return
        st = SearchState.root(g)
        if reductions:
            bounds = reduce_to_fixpoint(st, bounds, pool.threshold, params.s, cfg.use_r5)
            if bounds is None:
                return
        mvbpf(st, bounds, ctx)

    try:
        if not progressive:
            run(root)
        else:
            sched = ProgressiveSchedule.build(root.ub_l, params.theta_l, eighth_cut)
            for lo, hi in sched.ranges():
                run(SideBounds(lo, params.theta_r, hi, root.ub_r))
                if lo > params.theta_l and pool.full and pool.threshold > 2 * lo:
                    lb_r = max(pool.threshold + 1 - lo, params.theta_r)
                    run(SideBounds(params.theta_l, lb_r, lo, root.ub_r))
                    break
    except SearchTimeout:
        pool.partial = True
    return pool


def branching_factor(s: int, tol: float = 1e-9) -> float:
    """Largest real root of ``x^(s+4) - 2x^(s+3) + x^2 - x + 1`` by bisection on (1, 2]."""
    f = lambda x: x ** (s + 4) - 2 * x ** (s + 3) + x * x - x + 1  # noqa: E731
    lo, hi = 1.0 + 1e-6, 2.0
    if f(lo) >= 0 or f(hi) <= 0:
        raise ValueError(f"root not bracketed for s={s}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)

