"""Wall time of the full engine against each switched-off component.

Usage: ``python demos/ablation.py [n_per_side] [density]`` (defaults 1000, 8).
Variants that run past the limit print OOT.
"""

import sys
import time

from biplex import generate_er
from biplex.driver import FastStats, fast_mvbp
from biplex.state import SearchParams

n = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
dens = float(sys.argv[2]) if len(sys.argv) > 2 else 8.0
limit = 30.0

g = generate_er(n, n, dens, 1)
print(g)
variants = {
    "fastmvbp": {},
    "no-decompose": {"decomposition": False},
    "no-progressive": {"progressive": False},
    "no-reductions": {"reductions": False},
}
for s in (1, 2):
    p = SearchParams(s, 10, 2 * s + 1, 2 * s + 1, time_limit=limit)
    for name, kw in variants.items():
        st = FastStats()
        t0 = time.perf_counter()
        pool = fast_mvbp(g, p, stats=st, **kw)
        dt = time.perf_counter() - t0
        t = "OOT" if pool.partial else f"{dt:7.2f}s"
        print(f"s={s} {name:15s} {t:>9s}  sizes={pool.sizes()}  branches={st.branches}")
