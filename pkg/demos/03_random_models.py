"""Degree sequences of random hypergraphs and of the two reference models."""
import numpy as np

from hypercount.core import Params
from hypercount.models import omega, prob_binomial_model, prob_degseq_exact, prob_hypergeom_model, sample_many

p = Params(6, 3, 4)
print(f"n={p.n}, k={p.k}, m={p.m}: every sequence summing to km has three probabilities.")
print(f"{'d':>22} {'exact':>12} {'binomial':>12} {'hypergeom':>12}")
for d in [(2, 2, 2, 2, 2, 2), (3, 3, 2, 2, 1, 1), (4, 2, 2, 2, 1, 1)]:
    row = [prob_degseq_exact(d, p), prob_binomial_model(d, p), prob_hypergeom_model(d, p)]
    print(f"{str(d):>22} " + " ".join(f"{float(x):12.6f}" for x in row))

total = sum(prob_binomial_model(d, p) for d in omega(p.n, p.k * p.m))
print("\nThe binomial model is a distribution on that set:", total)

print("\nSampling is seeded per trial, so reruns agree exactly.")
a = sample_many("hypergraph", Params(30, 3, 40), 2000, seed=1)
b = sample_many("hypergraph", Params(30, 3, 40), 2000, seed=1)
print("  identical:", np.array_equal(a, b))
print("  mean degree:", a.mean(), " expected:", 3 * 40 / 30)
print("  degree variance:", a.var().round(4))
