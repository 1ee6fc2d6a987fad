"""How the pool threshold rises during the progressive schedule.

Prints the sequence of thresholds the top-k pool passes through and the
counts of screened subproblems for a mid-sized random graph.
"""

from biplex import generate_er
from biplex.driver import FastStats, fast_mvbp
from biplex.state import SearchParams

g = generate_er(20000, 20000, 12.0, 5)
for k in (1, 10, 50):
    st = FastStats()
    pool = fast_mvbp(g, SearchParams(1, k, 3, 3), stats=st)
    print(f"k={k:3d} sizes[:5]={pool.sizes()[:5]} thresholds={pool.threshold_history}"
          f" subproblems={st.subproblems} d2={st.d2}")
