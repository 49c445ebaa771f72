"""Counting k-uniform hypergraphs with a given degree sequence, exactly."""
from hypercount.exact import ExactCounter, count_exact, count_naive, count_with_edges, edge_probability_exact
from hypercount.core import minus

print("How many simple 3-uniform hypergraphs on 6 vertices are 2-regular?")
d = (2,) * 6
print("  memoized search:", count_exact(d, 3))
print("  brute force    :", count_naive(d, 3))

print("\nThe search only cares about the multiset of residual degrees, so the")
print("memo stays small even when the answer is huge:")
counter = ExactCounter()
big = (3,) * 9
print(f"  N{big} = {count_exact(big, 3, counter=counter)}  ({len(counter._free)} memo entries)")

print("\nForcing an edge L in, then peeling it off, gives a telescoping identity:")
L = (0, 1, 2)
lhs = count_with_edges(d, 3, [L])
rhs = count_exact(minus(d, L), 3) - count_with_edges(minus(d, L), 3, [L])
print(f"  N_L(d) = {lhs},  N(d-e_L) - N_L(d-e_L) = {rhs}")

print("\nSo the probability that L is an edge of a uniform random realization is")
print("  P =", edge_probability_exact(d, 3, L))
