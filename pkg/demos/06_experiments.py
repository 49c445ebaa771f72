"""Monte Carlo checks of the concentration statements."""
from hypercount.core import Params
from hypercount.experiments import degree_tail_experiment, switching_bound_check, switching_corpus, variance_check

p = Params(20, 3, 100)
v = variance_check(p, 20000, seed=3)
print(f"Degree variance for n=20, k=3, m=100 over 20000 samples:")
print(f"  exact {v.exact:.3f}  empirical {v.empirical:.3f}  d(1-mu) {v.approx:.3f}")

p = Params(30, 3, 40)
t = degree_tail_experiment(p, [2.0, 4.0, 8.0], 20000, seed=3)
print("\nTail frequencies against the bound:")
for row in t.points:
    print(f"  {row['model']:>10} alpha={row['alpha']:<4g} empirical {row['empirical']:.4f}  bound {row['bound']:.4f}")

rep = switching_bound_check(switching_corpus(n_max=5, m_max=4))
print(f"\nSwitching bound: {rep.instances} sequences, {rep.instances - rep.skipped} meet the precondition,"
      f" {rep.violated} violations")
