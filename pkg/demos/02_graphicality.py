"""Sufficient conditions for a sequence to be the degrees of a hypergraph."""
from hypercount.graphical import bef_sufficient, is_graphical_exact, nearly_regular_sufficient, sparse_sufficient

print("The threshold test scans p and compares a partial sum against a bound.")
for d, k in [((2,) * 6, 3), ((4, 4, 4, 2, 2, 2), 3)]:
    r = bef_sufficient(d, k)
    print(f"  {d} k={k}: sufficient={r.graphical_sufficient}  exact={is_graphical_exact(d, k)}")

print("\nAt small n the literal test can be fooled.  This sequence passes it")
print("but no 2-graph realizes it:")
d = (3, 3, 3, 1)
print(f"  {d}: sufficient={bef_sufficient(d, 2).graphical_sufficient}  exact={is_graphical_exact(d, 2)}")

print("\nThe large-n tests need 20k < n.  A near-regular sequence:")
d = (2,) * 69
print(f"  (2,)*69 k=3 nearly regular -> {nearly_regular_sufficient(d, 3)}")
d = (1,) * 63
print(f"  (1,)*63 k=3 sparse        -> {sparse_sufficient(d, 3)}")
try:
    sparse_sufficient((1,) * 60, 3)
except ValueError as e:
    print("  n=60 is refused:", e)
