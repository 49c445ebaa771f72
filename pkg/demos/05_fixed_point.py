"""The compositional operator C and its fixed point.

The exact state (edge probabilities, path probabilities and count ratios
read from the exact counter) is left unchanged by one application of C.
Approximate states move, and we can watch how far.
"""
from itertools import combinations

from hypercount.operators import ExactState, Inadmissible, Query, StarState, iterate_C, measure_contraction, op_C

d, k = (4, 3, 3, 3, 3, 2), 3
n = len(d)
queries = [Query.p_point(K[:-1], K[-1], d) for K in combinations(range(n), k)]

exact = ExactState(n, k)
derived = op_C(exact)
same = 0
for q in queries:
    try:
        same += q.evaluate(derived) == q.evaluate(exact)
    except Inadmissible:
        pass
print(f"C(exact) == exact at {same} of {len(queries)} edge-probability points for {d}")

star = StarState(n, k)
rep = measure_contraction(star, exact, queries)
print(f"\nStarting from the star approximants ({rep.points} points):")
print(f"  max relative error before C: {rep.before:.4f}")
print(f"  max relative error after  C: {rep.after:.4f}")

d = (4,) * 6
q = [Query.p_point((0, 1), 2, d)]
for t in (1, 2):
    r = iterate_C(ExactState(6, 3), t, q)
    print(f"\nt={t} at {d}: value {r.values[0]}  ({r.evaluations} evaluations)")
