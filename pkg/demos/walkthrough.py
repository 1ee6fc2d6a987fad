"""A small graph end to end: ordering, exact answer, both engines.

Run with ``python demos/walkthrough.py``.
"""

from biplex import (SearchParams, compute_degeneracy_ordering, enumerate_all_maximal,
                    fast_mvbp, mvbp)
from biplex.bigraph import from_biadjacency

# two overlapping near-bicliques plus a sparse tail
rows = [
    [1, 1, 1, 1, 0, 0, 0],
    [1, 1, 0, 1, 0, 0, 0],
    [1, 1, 1, 1, 1, 0, 0],
    [0, 1, 1, 1, 1, 1, 0],
    [0, 0, 1, 1, 1, 1, 1],
    [0, 0, 0, 1, 1, 0, 1],
]
g = from_biadjacency(rows)
print(g)

o = compute_degeneracy_ordering(g)
print("removal order:", o.eta.tolist())
print("d2 =", o.d2, "(max degree squared =", int(g.degree.max()) ** 2, ")")

s, th = 1, 3
print(f"\nall maximal {s}-biplexes with both sides >= {th}:")
for sol in enumerate_all_maximal(g, s, th, th):
    print(f"  size {sol.size}: L={list(sol.left)} R={[v - g.n_left for v in sol.right]}")

p = SearchParams(s, 3, th, th)
print("\ntop-3 sizes  mvbp:", mvbp(g, p).sizes(), " fast_mvbp:", fast_mvbp(g, p).sizes())
