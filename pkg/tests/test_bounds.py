import numpy as np
import pytest

from biplex.bigraph import BipartiteGraph, from_biadjacency
from biplex.bounds import (INF, SideBounds, SubproblemInfeasible, apply_r5, check_r4,
                           initial_bounds, lemma1_ub, lemma2_fixed_ub, lemma3_lb, reduce_r1,
                           reduce_r2, reduce_r3, reduce_r5, reduce_to_fixpoint, update_bounds)
from biplex.errors import ContractError, InfeasibleError
from biplex.oracle import enumerate_all_maximal
from biplex.state import SearchParams, SearchState, filter_compatible

from conftest import k33, random_small


def star(deg_by_left):
    """Left vertex i adjacent to the first deg_by_left[i] right vertices."""
    nr = max(deg_by_left)
    return BipartiteGraph(len(deg_by_left), nr,
                          [(i, j) for i, d in enumerate(deg_by_left) for j in range(d)])


def test_initial_bounds_k33():
    assert initial_bounds(k33(), SearchParams(1, 1, 3, 3)) == SideBounds(3, 3, 3, 3)


def test_initial_bounds_infeasible():
    g = BipartiteGraph(2, 5, [(0, 0), (1, 1)])
    with pytest.raises(InfeasibleError):
        initial_bounds(g, SearchParams(1, 1, 3, 3))


def test_lemma1_examples():
    g = star([5, 4, 7])
    # right-side caps come from left P vertices; swap roles via P_L
    assert lemma1_ub(g, [0], [], 1)[1] == 6
    assert lemma1_ub(g, [], [], 1) == (INF, INF)
    assert lemma1_ub(g, [1, 2], [], 2)[1] == 6


def test_lemma2_full_adjacency():
    g = k33()
    st = SearchState.build(g, p=[0, 3, 4, 5], c=[1, 2])
    assert lemma2_fixed_ub(st, "R", 1) == 3


def test_lemma2_saturated_single():
    a = np.ones((3, 2), dtype=int)
    a[0, 0] = 0
    g = from_biadjacency(a)      # l0..l2 = 0..2, r0 = 3, r1 = 4
    st = SearchState.build(g, p=[0, 3], c=[1, 2])
    # r0 misses l0 so its slack is 0; common neighbours of P_R in C_L: l1, l2
    assert lemma2_fixed_ub(st, "R", 1) == 1 + 2


def test_lemma2_contract():
    st = SearchState.root(k33())
    with pytest.raises(ContractError):
        lemma2_fixed_ub(st, "R", 1)


def _biplexes_containing(g, p, pool, s):
    from biplex.bigraph import is_s_biplex
    out = []
    for mask in range(1 << len(pool)):
        vs = set(p) | {pool[i] for i in range(len(pool)) if mask >> i & 1}
        if is_s_biplex(g, vs, s):
            out.append(vs)
    return out


@pytest.mark.parametrize("seed", range(25))
def test_lemma2_dominates_brute_force(seed):
    g = random_small(seed, 5, 8, (0.4, 0.95))
    rng = np.random.default_rng(seed)
    s = 1
    p_r = [v for v in g.right if rng.random() < 0.5][:3]
    p_l = [v for v in g.left if rng.random() < 0.3][:2]
    st = SearchState.build(g, p=p_l + p_r, c=[v for v in g.left if v not in p_l])
    if not st.p_is_feasible(s):
        return
    cap = lemma2_fixed_ub(st, "R", s)
    best = max(len([v for v in b if v < g.n_left])
               for b in _biplexes_containing(g, p_l + p_r, sorted(st.c_l), s))
    assert cap >= best


def test_lemma3_examples():
    b = SideBounds(3, 3, 10, 7)
    assert lemma3_lb(10, b).lb_l == 4
    assert lemma3_lb(0, b) == b
    assert lemma3_lb(5, b).lb_l == 3


def test_update_bounds_k33_root():
    st = SearchState.root(k33())
    assert update_bounds(st, SideBounds(3, 3, INF, INF), 0, 1) == SideBounds(3, 3, 3, 3)


def test_update_bounds_fixed_sides_cap_at_sizes():
    g = k33()
    st = SearchState.build(g, p=range(6))
    b = update_bounds(st, SideBounds(3, 3, INF, INF), 0, 1)
    assert (b.ub_l, b.ub_r) == (3, 3)


def test_update_bounds_never_loosens():
    for seed in range(20):
        g = random_small(seed)
        st = SearchState.root(g)
        b0 = SideBounds(3, 3, 4, 5)
        b = update_bounds(st, b0, 2, 1)
        assert b.ub_l <= b0.ub_l and b.ub_r <= b0.ub_r
        assert b.lb_l >= b0.lb_l and b.lb_r >= b0.lb_r


def test_r1_boundary():
    # l0 has three right neighbours
    g = star([3, 5])
    st = SearchState.build(g, c=g.left)
    st.c_r |= set(g.right)
    assert reduce_r1(st.copy(), SideBounds(0, 5, INF, INF), 1) >= {0}
    assert 0 not in reduce_r1(st.copy(), SideBounds(0, 4, INF, INF), 1)
    assert reduce_r1(SearchState.root(k33()), SideBounds(3, 3, INF, INF), 1) == set()


def test_r2_forces_tight_neighbours():
    # l0 adjacent to r0, r1 only; lb_r = 3, s = 1
    g = BipartiteGraph(2, 3, [(0, 0), (0, 1), (1, 0), (1, 1), (1, 2)])
    st = SearchState.build(g, p=[0], c=[1, 2, 3, 4])
    forced, _ = reduce_r2(st, SideBounds(0, 3, INF, INF), 1)
    assert forced == {2, 3}
    assert {2, 3} <= st.p


def test_r2_removes_after_forcing():
    # x = l2 misses both forced right vertices
    g = BipartiteGraph(3, 3, [(0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 2)])
    st = SearchState.build(g, p=[0], c=[1, 2, 3, 4, 5])
    forced, removed = reduce_r2(st, SideBounds(0, 3, INF, INF), 1)
    assert forced == {3, 4} and 2 in removed


def test_r2_noop():
    st = SearchState.build(k33(), p=[0], c=[1, 2, 3, 4, 5])
    assert reduce_r2(st, SideBounds(3, 3, INF, INF), 1)[0] == set()


def test_r3_trio():
    g = k33()
    st = SearchState.build(g, p=[0, 3], c=[1, 2, 4, 5])
    assert reduce_r3(st, SideBounds(3, 3, INF, INF), 1) == {1, 2, 4, 5}
    st = SearchState.build(g, p=[0], c=[1, 2, 3, 4, 5])
    assert reduce_r3(st, SideBounds(2, 2, INF, INF), 1) == set()
    h = BipartiteGraph(3, 3, [(0, 0), (1, 1), (2, 2)])
    st = SearchState.build(h, p=[0], c=[1, 2, 3, 4, 5])
    with pytest.raises(SubproblemInfeasible):
        reduce_r3(st, SideBounds(3, 3, INF, INF), 1)


def test_r4():
    assert check_r4(SideBounds(3, 3, 3, 3))
    assert not check_r4(SideBounds(4, 3, 3, 3))
    assert check_r4(SideBounds(2, 2, 2, 2))


def test_r5_boundary():
    # l0, l1 share 2 right neighbours; l2, l3 share 3
    g = BipartiteGraph(4, 5, [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2),
                              (3, 0), (3, 1), (3, 2)])
    pairs = reduce_r5(g, SideBounds(0, 5, INF, INF), 1)
    assert (0, 1) in pairs and (2, 3) not in pairs


def test_apply_r5_drops_conflicting_candidate():
    g = BipartiteGraph(4, 5, [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2),
                              (3, 3), (3, 4)])
    st = SearchState.build(g, p=[0], c=[1, 3] + list(g.right))
    removed = apply_r5(st, SideBounds(0, 4, INF, INF), 1)
    assert removed == {3}


# oracle-backed soundness: no maximal biplex above lb that is consistent
# with a node may be cut by the bounds or by the reduction fixpoint
def check_node_soundness(g, st, bounds, lb, s, sols):
    inside = [b for b in sols if b.size > lb
              and st.p <= set(b.vertices) <= st.p | st.c]
    b2 = update_bounds(st, bounds, lb, s)
    for b in inside:
        assert b2.admits(len(b.left), len(b.right)), (b, b2)
    work = st.copy()
    out = reduce_to_fixpoint(work, bounds, lb, s)
    for b in inside:
        assert out is not None, b
        assert out.admits(len(b.left), len(b.right))
        assert work.p <= set(b.vertices) <= work.p | work.c, b
    return len(inside)


@pytest.mark.parametrize("seed", range(40))
def test_bounds_sound_against_oracle(seed):
    g = random_small(seed)
    rng = np.random.default_rng(seed)
    for s in (1, 2):
        th = 2 * s + 1
        sols = enumerate_all_maximal(g, s, th, th)
        if not sols:
            continue
        params = SearchParams(s, 3, th, th)
        root = SearchState.root(g)
        b0 = initial_bounds(g, params)
        for lb in {0, sols[min(2, len(sols) - 1)].size - 1}:
            check_node_soundness(g, root, b0, lb, s, sols)
        for _ in range(6):
            target = sols[int(rng.integers(len(sols)))]
            p = [v for v in target.vertices if rng.random() < 0.4]
            st = SearchState.build(g, p=p, c=[v for v in range(g.n) if v not in p])
            filter_compatible(st, s)
            check_node_soundness(g, st, b0, int(rng.integers(0, target.size)), s, sols)
