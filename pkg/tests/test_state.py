import pytest

from biplex.errors import ParameterError
from biplex.state import SearchParams, SearchState, Solution, SolutionPool, filter_compatible, pool_offer

from conftest import k33, k33_minus


def sol(n):
    return Solution(tuple(range(n)), ())


def test_params_reject_small_theta():
    with pytest.raises(ParameterError):
        SearchParams(1, 1, 2, 3)
    with pytest.raises(ParameterError):
        SearchParams(0, 1, 3, 3)
    SearchParams(2, 1, 5, 5)


def test_pool_accepts_while_filling():
    pool = SolutionPool(2)
    assert pool_offer(pool, sol(6))
    assert pool.threshold == 0


def test_pool_rejects_equal_to_threshold():
    pool = SolutionPool(2)
    pool.offer(sol(6))
    pool.offer(Solution((0,), tuple(range(1, 8))))
    assert pool.threshold == 6
    assert not pool.offer(Solution((9,), (1, 2, 3, 4, 5)))


def test_pool_rejects_duplicates():
    pool = SolutionPool(3)
    assert pool.offer(sol(4))
    assert not pool.offer(sol(4))
    assert len(pool) == 1


def test_pool_threshold_monotone_and_order():
    pool = SolutionPool(3)
    hist = []
    for i, n in enumerate([3, 5, 4, 7, 2, 6, 6, 9]):
        pool.offer(Solution(tuple(range(n)), (100 + i,)))
        hist.append(pool.threshold)
    assert hist == sorted(hist)
    assert pool.sizes() == [10, 8, 7]
    assert pool.threshold_history == [4, 5, 6, 7]


def test_pool_ties_keep_first():
    pool = SolutionPool(1)
    a, b = Solution((0,), (1,)), Solution((2,), (3,))
    pool.offer(a)
    pool.offer(b)
    assert pool.solutions() == [a]


def test_state_counts_and_moves():
    g = k33_minus((0, 0), (0, 1))
    st = SearchState.root(g)
    assert st.anti_pc(0) == 2
    st.to_p([0])
    assert st.anti_c(0) == 2 and st.anti_p(0) == 0
    st.to_p([3])
    assert st.anti_p(0) == 1
    st.to_x([4])
    assert st.anti_pc(0) == 1
    st.check_invariants(1)
    assert st.p_is_feasible(1)


def test_filter_compatible_empty_p_noop():
    st = SearchState.root(k33_minus((0, 0), (0, 1)))
    before = st.c
    filter_compatible(st, 1)
    assert st.c == before


def test_filter_compatible_removes_overloading_candidate():
    # l0 misses r0 and r1; once r0 is in P, l0 is saturated at s=1 so r1 goes
    g = k33_minus((0, 0), (0, 1))
    st = SearchState.build(g, p=[0, 3], c=[1, 2, 4, 5])
    filter_compatible(st, 1)
    assert 4 not in st.c and 4 not in st.x
    assert {1, 2, 5} <= st.c


def test_filter_compatible_moves_x_too():
    g = k33_minus((0, 0), (1, 0))
    st = SearchState.build(g, p=[0, 1], c=[2, 4, 5], x=[3])
    filter_compatible(st, 1)
    assert 3 not in st.x   # r0 has two anti-neighbours in P


def test_solution_from_vertices_splits_sides():
    g = k33()
    s = Solution.from_vertices(g, [4, 0, 2])
    assert s.left == (0, 2) and s.right == (4,) and s.size == 3
