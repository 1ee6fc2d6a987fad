"""Exhaustive reference enumeration for small graphs.

Walks the plain include/exclude tree over vertices in id order, keeping only
feasible (s-biplex) prefixes, then filters maximal sets by single-vertex
extension.  Shares no code with the branch-and-bound engine.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bigraph import BipartiteGraph
from .errors import ParameterError
from .state import SearchParams, Solution

MAX_ORACLE_VERTICES = 24


@dataclass
class OracleResult:
    all_maximal: list
    top: list

    @property
    def top_sizes(self) -> list[int]:
        return [sol.size for sol in self.top]


def _masks(g: BipartiteGraph):
    n, nl = g.n, g.n_left
    left_mask = (1 << nl) - 1
    right_mask = ((1 << n) - 1) ^ left_mask
    anti = []
    for v in range(n):
        nb = 0
        for u in g.neighbors(v).tolist():
            nb |= 1 << u
        opp = right_mask if v < nl else left_mask
        anti.append(opp & ~nb)
    return anti


def _is_biplex(mask, anti, s):
    m = mask
    while m:
        low = m & -m
        v = low.bit_length() - 1
        if bin(mask & anti[v]).count("1") > s:
            return False
        m ^= low
    return True


def enumerate_all_maximal(g: BipartiteGraph, s: int, theta_l: int, theta_r: int,
                          allow_small_theta: bool = False) -> list[Solution]:
    """Every maximal s-biplex with at least ``theta_l`` left and ``theta_r`` right vertices.

    Refuses graphs with more than 24 vertices.  ``theta < 2s+1`` needs
    ``allow_small_theta=True``.
    """
    n = g.n
    if n > MAX_ORACLE_VERTICES:
        raise ParameterError(f"oracle limited to {MAX_ORACLE_VERTICES} vertices, got {n}")
    if not allow_small_theta and min(theta_l, theta_r) < 2 * s + 1:
        raise ParameterError("theta below 2s+1 requires allow_small_theta=True")
    anti = _masks(g)
    nl = g.n_left
    left_mask = (1 << nl) - 1
    found = []

    # iterative include/exclude walk; a prefix is kept only if it is an s-biplex
    stack = [(0, 0)]
    while stack:
        i, mask = stack.pop()
        if i == n:
            found.append(mask)
            continue
        stack.append((i + 1, mask))
        with_v = mask | (1 << i)
        if _is_biplex(with_v, anti, s):
            stack.append((i + 1, with_v))

    biplexes = set(found)
    out = []
    full = (1 << n) - 1
    for mask in found:
        if bin(mask & left_mask).count("1") < theta_l or bin(mask & ~left_mask).count("1") < theta_r:
            continue
        rest = full & ~mask
        maximal = True
        while rest:
            low = rest & -rest
            if (mask | low) in biplexes:
                maximal = False
                break
            rest ^= low
        if maximal:
            vs = [v for v in range(n) if mask >> v & 1]
            out.append(Solution.from_vertices(g, vs))
    out.sort(key=lambda sol: (-sol.size, sol.left, sol.right))
    return out


def oracle_top_k(g: BipartiteGraph, params: SearchParams) -> OracleResult:
    allm = enumerate_all_maximal(g, params.s, params.theta_l, params.theta_r)
    return OracleResult(allm, allm[:params.k])
