import numpy as np
import pytest

from biplex.bigraph import BipartiteGraph, is_maximal_s_biplex, is_s_biplex
from biplex.bounds import SideBounds, INF
from biplex.errors import ContractError
from biplex.oracle import enumerate_all_maximal, oracle_top_k
from biplex.search import (Decision, SearchConfig, SearchContext, SearchStats, branch_br1,
                           branch_br2, mvbp, mvbpf, prune, select_pivot, unbounded)
from biplex.state import SearchParams, SearchState, Solution, SolutionPool

from conftest import k33, k33_minus, random_small

P1 = SearchParams(1, 1, 3, 3)


def fig2_graph():
    """Six-vertex instance used for the worked branching example.

    u1 misses v1 and v4; u2 misses v3; u3 misses v2.  Left u1..u3 = 0..2,
    right v1..v4 = 3..6.
    """
    missing = {(0, 0), (0, 3), (1, 2), (2, 1)}
    return BipartiteGraph(3, 4, [(i, j) for i in range(3) for j in range(4)
                                 if (i, j) not in missing])


def test_prune_k33_root_records():
    st = SearchState.root(k33())
    d, vs = prune(st, SideBounds(3, 3, 3, 3), SolutionPool(1), 1)
    assert d is Decision.RECORD and vs == set(range(6))


def test_prune_pr2():
    pool = SolutionPool(1)
    pool.offer(Solution(tuple(range(3)), (3, 4, 5)))
    g = k33_minus((0, 0), (0, 1), (1, 0), (1, 1))
    st = SearchState.root(g)
    assert pool.threshold == 6 and st.pc_size() == 6
    assert prune(st, unbounded(g), pool, 1)[0] is Decision.RETURN


def test_prune_pr3_x_extends():
    g = fig2_graph()
    # P∪C = {u2, u3, v1..v4}; u1 in X has 2 anti-neighbours there, s=2 lets it extend
    st = SearchState.build(g, p=[1], c=[2, 3, 4, 5, 6], x=[0])
    assert prune(st, unbounded(g), SolutionPool(1), 2)[0] is Decision.RETURN
    st = SearchState.build(g, p=[1], c=[2, 3, 4, 5, 6], x=[0])
    cfg = SearchConfig(pr3=False)
    assert prune(st, unbounded(g), SolutionPool(1), 2, cfg)[0] is Decision.RECORD


def test_prune_record_needs_theta():
    g = k33()
    st = SearchState.build(g, p=[0, 1, 3, 4, 5])
    d, vs = prune(st, SideBounds(3, 3, INF, INF), SolutionPool(1), 1)
    assert d is Decision.RETURN and vs is not None


def test_select_pivot_fig2():
    g = fig2_graph()
    st = SearchState.build(g, p=[0], c=range(1, 7))
    piv = select_pivot(st, 1)
    assert piv.in_p and piv.v == 0
    # with P empty the candidate with most anti-neighbours wins
    piv = select_pivot(SearchState.root(g), 1)
    assert piv == (False, 0)


def test_select_pivot_contract():
    with pytest.raises(ContractError):
        select_pivot(SearchState.root(k33()), 1)


def test_br1_two_children_for_s1():
    g = fig2_graph()
    st = SearchState.build(g, p=[0], c=range(1, 7))
    kids = branch_br1(st, 0, 1)
    assert len(kids) == 2
    assert 3 in kids[0].x
    assert 3 in kids[1].p and 6 in kids[1].x


def test_br1_s2_shrinks_c():
    # pivot l0 misses r0..r3 (b=4), s=2, no anti-neighbour in P
    g = BipartiteGraph(2, 5, [(0, 4)] + [(1, j) for j in range(5)])
    st = SearchState.build(g, p=[0], c=[1] + list(g.right))
    kids = branch_br1(st, 0, 2)
    shrink = [len(st.c) - len(k.c) for k in kids]
    assert shrink == [1, 2, 4]


def test_br2_pr6_forces_pair():
    # v = r0 misses l0 and l1, nothing in P
    g = k33_minus((0, 0), (1, 0))
    st = SearchState.build(g, c=range(6))
    inc, exc = branch_br2(st, 3, 1, "literal")
    assert 3 in inc.p and 3 in exc.x
    assert {0, 1} <= exc.p


def test_br2_no_pr6_with_extra_anti():
    g = BipartiteGraph(3, 3, [(2, 0), (0, 1), (1, 1), (2, 1), (0, 2), (1, 2), (2, 2)])
    st = SearchState.build(g, c=range(6))
    _, exc = branch_br2(st, 3, 0, "literal")   # two anti-neighbours, s=0 => s+2
    assert exc.p == set()


@pytest.mark.parametrize("g,expect", [
    (k33(), [6]),
    (k33_minus((0, 0)), [6]),
    (k33_minus((0, 0), (0, 1)), []),
])
def test_mvbp_small_examples(g, expect):
    assert mvbp(g, P1).sizes() == expect


def test_mvbp_timeout_marks_partial():
    from biplex.bigraph import generate_er
    g = generate_er(40, 40, 12.0, 1)
    pool = mvbp(g, SearchParams(1, 10, 3, 3, time_limit=0.0))
    assert pool.partial


@pytest.mark.parametrize("seed", [207, 11, 58])
def test_pr6_guarded_matches_oracle(seed):
    g = random_small(seed)
    params = SearchParams(1, 10, 3, 3)
    safe = mvbp(g, params, SearchConfig(pr6="safe")).sizes()
    assert safe == oracle_top_k(g, params).top_sizes


def _leaves(g, s, cfg):
    seen = []
    pool = SolutionPool(10 ** 6)
    params = SearchParams(s, 10 ** 6, 2 * s + 1, 2 * s + 1)
    ctx = SearchContext(params, pool, cfg, SearchStats(),
                        on_leaf=lambda vs: seen.append(vs))
    mvbpf(SearchState.root(g), unbounded(g), ctx)
    return seen


@pytest.mark.parametrize("seed", range(30))
def test_branch_coverage_leaves(seed):
    g = random_small(seed, 3, 5)
    cfg = SearchConfig(pr2=False, pr3=False, pr5=False, pr6=None)
    for s in (1, 2):
        leaves = _leaves(g, s, cfg)
        maximal = [frozenset(b.vertices) for b in enumerate_all_maximal(g, s, 0, 0, True)]
        got = [vs for vs in leaves if is_maximal_s_biplex(g, vs, s)]
        assert sorted(map(sorted, got)) == sorted(map(sorted, maximal))
        for vs in leaves:
            assert is_s_biplex(g, vs, s)


@pytest.mark.parametrize("seed", range(15))
def test_counters_match_recompute(seed):
    g = random_small(seed)
    checked = []
    orig_prune = prune

    def spy(st, *a, **kw):
        apc = st.anti_pc_counts()
        for v, c in apc.items():
            po = st.p_r if v < g.n_left else st.p_l
            co = st.c_r if v < g.n_left else st.c_l
            assert c == sum(1 for u in po | co if u not in g.adj[v])
            assert st.anti_p(v) == sum(1 for u in po if u not in g.adj[v])
        st.check_invariants(1)
        checked.append(1)
        return orig_prune(st, *a, **kw)

    import biplex.search as search
    search.prune = spy
    try:
        mvbp(g, SearchParams(1, 3, 3, 3))
    finally:
        search.prune = orig_prune
    assert checked


@pytest.mark.parametrize("seed", range(40))
def test_pr2_off_same_sizes(seed):
    g = random_small(seed)
    p = SearchParams(1, 3, 3, 3)
    assert mvbp(g, p).sizes() == mvbp(g, p, SearchConfig(pr2=False)).sizes()


@pytest.mark.parametrize("seed", range(40))
def test_node_reductions_same_sizes(seed):
    g = random_small(seed)
    p = SearchParams(1, 3, 3, 3)
    assert mvbp(g, p).sizes() == mvbp(g, p, SearchConfig(node_reductions=True)).sizes()
