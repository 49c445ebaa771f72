"""Closed-form estimates next to the exact numbers they approximate."""
import math

from hypercount.asymptotic import pstar, regular_count_estimate, rstar, ystar
from hypercount.core import plus
from hypercount.exact import count_exact, edge_probability_exact, path_probability_exact, ratio_exact

for n, k, d in [(6, 3, 2), (7, 3, 3), (8, 3, 3)]:
    est = regular_count_estimate(n, k, d)
    exact = count_exact((d,) * n, k)
    print(f"{d}-regular 3-graphs on {n} vertices: exact {exact}, estimate {math.exp(est.ln):.1f}")

d = (7, 6, 6, 6, 6, 6, 6, 5)
print(f"\nEdge and path probabilities at d = {d}:")
K = (0, 1, 7)
print(f"  P(K={K}): exact {float(edge_probability_exact(d, 3, K)):.5f}  P* {float(pstar(d, 3, K)):.5f}")
print(f"  Y(0,{{2,3}},7): exact {float(path_probability_exact(d, 3, 0, (2, 3), 7)):.5f}"
      f"  Y* {float(ystar(d, 3, 0, (2, 3), 7)):.5f}")

x = plus(d, [0])
print(f"\nRatio of counts with one more degree at a vs at b, x = {x}:")
print(f"  exact {float(ratio_exact(x, 3, 0, 7)):.4f}  R* {float(rstar(x, 3, 0, 7)):.4f}"
      f"  crude x_a/x_b {x[0] / x[7]:.4f}")
