"""Exact enumeration oracle for k-uniform hypergraphs with a given degree sequence.

The search repeatedly takes one vertex ``v`` and branches over every set of
``residual(v)`` distinct edges through ``v`` whose other vertices are still
unprocessed.  Once ``v`` is done no later edge may contain it, so the
unprocessed vertices are interchangeable and the subproblem is determined by
the multiset of their residual degrees.  That multiset is the memo key.

Required edges (``N_L`` and ``N_{J,L}``) are placed up front and then become
*forbidden*: the subproblem key is extended by each vertex's membership
pattern in the forbidden edges, which is still a complete invariant.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable, Iterator, Sequence

from .core import (
    BudgetExceeded,
    ParameterError,
    as_tuple,
    minus,
    normalize_edge,
)

DEFAULT_NODE_CAP = 10**8
NAIVE_KSET_CAP = 24
NAIVE_EDGE_CAP = 8


class ExactCounter:
    """Memoizing counter.  One instance may be reused across many queries.

    ``node_cap`` bounds the number of search nodes explored per top-level call.
    """

    def __init__(self, node_cap: int | None = None):
        from .core import budget_override

        self.node_cap = node_cap if node_cap is not None else budget_override(DEFAULT_NODE_CAP)
        self._free: dict[tuple, int] = {}
        self._forb: dict[tuple, int] = {}
        self._exists: dict[tuple, bool] = {}
        self.nodes = 0
        self._call_nodes = 0

    def clear(self) -> None:
        self._free.clear()
        self._forb.clear()
        self._exists.clear()

    # -- public entry points --------------------------------------------------

    def count(self, d: Sequence[int], k: int, required: Iterable[Iterable[int]] = ()) -> int:
        """Number of simple k-graphs on ``range(len(d))`` with degrees *d* containing *required*."""
        degs = as_tuple(d)
        n = len(degs)
        _check_k(n, k)
        req = _check_required(required, n, k)
        self._call_nodes = 0
        if any(x < 0 for x in degs):
            return 0
        res = list(degs)
        for e in req:
            for v in e:
                res[v] -= 1
        if any(x < 0 for x in res):
            return 0
        if sum(res) % k:
            return 0
        if not req:
            return self._count_free(_free_key(res), k)
        return self._count_forb(_forb_key(res, list(req)), k)

    def exists(self, d: Sequence[int], k: int) -> bool:
        """True iff at least one k-graph has degree sequence *d* (early-exit search)."""
        degs = as_tuple(d)
        _check_k(len(degs), k)
        self._call_nodes = 0
        if any(x < 0 for x in degs) or sum(degs) % k:
            return False
        return self._exists_free(_free_key(degs), k)

    # -- search ---------------------------------------------------------------

    def _tick(self, amount: int = 1) -> None:
        self.nodes += amount
        self._call_nodes += amount
        if self._call_nodes > self.node_cap:
            raise BudgetExceeded(f"search exceeded {self.node_cap} nodes")

    def _count_free(self, key: tuple[int, ...], k: int) -> int:
        if not key:
            return 1
        memo_key = (k, key)
        hit = self._free.get(memo_key)
        if hit is not None:
            return hit
        self._tick()
        total = 0
        if _feasible(key, k):
            v_res, others = key[0], key[1:]
            for new_key, mult in _free_branches(others, v_res, k):
                self._tick()
                sub = self._count_free(new_key, k)
                if sub:
                    total += mult * sub
        self._free[memo_key] = total
        return total

    def _exists_free(self, key: tuple[int, ...], k: int) -> bool:
        if not key:
            return True
        memo_key = (k, key)
        hit = self._exists.get(memo_key)
        if hit is None:
            cached = self._free.get(memo_key)
            if cached is not None:
                hit = cached > 0
        if hit is not None:
            return hit
        self._tick()
        found = False
        if _feasible(key, k):
            # try the most demanding vertex first: it fails fastest
            v_res, others = key[-1], key[:-1]
            for new_key, _ in _free_branches(others, v_res, k):
                self._tick()
                if self._exists_free(new_key, k):
                    found = True
                    break
        self._exists[memo_key] = found
        return found

    def _count_forb(self, key: tuple, k: int) -> int:
        res, forb = _unpack_forb(key)
        if not forb:
            return self._count_free(_free_key(res), k)
        memo_key = (k, key)
        hit = self._forb.get(memo_key)
        if hit is not None:
            return hit
        self._tick()
        total = 0
        if _feasible(tuple(sorted(res)), k):
            edge = forb[0]
            v = min(edge, key=lambda u: (res[u], u))
            others = [u for u in range(len(res)) if u != v]
            banned = {tuple(x for x in e if x != v) for e in forb if v in e}
            for usage in _labeled_branches(others, [res[u] for u in others], res[v], k, banned):
                self._tick()
                new_res = list(res)
                new_res[v] = 0
                for u, used in zip(others, usage):
                    new_res[u] -= used
                new_forb = [e for e in forb if v not in e]
                sub = self._count_forb(_forb_key(new_res, new_forb), k)
                total += sub
        self._forb[memo_key] = total
        return total


# ──────────────────────────────────────────────────────────────────────────────
# Subproblem keys and branching
# ──────────────────────────────────────────────────────────────────────────────

def _check_k(n: int, k: int) -> None:
    if not 2 <= k <= n:
        raise ParameterError(f"need 2 <= k <= n, got k={k}, n={n}")


def _check_required(required, n: int, k: int) -> list[tuple[int, ...]]:
    req = [normalize_edge(e) for e in required]
    for e in req:
        if len(e) != k:
            raise ParameterError(f"required edge {e} is not a {k}-set")
        if e[0] < 0 or e[-1] >= n:
            raise ParameterError(f"required edge {e} outside [0, {n})")
    if len(set(req)) != len(req):
        raise ParameterError("required edges must be distinct")
    return req


def _free_key(res: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(x for x in res if x > 0))


def _forb_key(res: Sequence[int], forb: list[tuple[int, ...]]) -> tuple:
    live = [e for e in forb if all(res[u] > 0 for u in e)]
    if not live:
        return ((), _free_key(res))
    best = None
    for order in permutations(range(len(live))):
        edges = [live[i] for i in order]
        sig = sorted(
            (tuple(u in e for e in edges), res[u])
            for u in range(len(res)) if res[u] > 0
        )
        cand = (len(edges), tuple(sig))
        if best is None or cand < best:
            best = cand
    return best


def _unpack_forb(key: tuple) -> tuple[list[int], list[tuple[int, ...]]]:
    n_edges, body = key
    if n_edges == ():
        return list(body), []
    res = [r for _, r in body]
    forb = [tuple(u for u, (pat, _) in enumerate(body) if pat[i]) for i in range(n_edges)]
    return res, forb


def _feasible(key: tuple[int, ...], k: int) -> bool:
    """Cheap necessary conditions on a sorted positive residual multiset."""
    total = sum(key)
    if total % k or len(key) < k:
        return False
    edges_left = total // k
    cap = math.comb(len(key) - 1, k - 1)
    return key[-1] <= edges_left and key[-1] <= cap


def _free_branches(others: tuple[int, ...], r: int, k: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Residual multisets reachable by choosing *r* distinct edges through one vertex.

    *others* is the sorted residual multiset of the remaining vertices.  Yields
    ``(new_key, multiplicity)`` pairs; a key may repeat.
    """
    if r == 1:
        yield from _single_set_classes(others, k - 1)
        return
    caps = list(others)
    idx = list(range(len(caps)))
    for usage in _labeled_branches(idx, caps, r, k, frozenset()):
        yield _free_key(c - u for c, u in zip(caps, usage)), 1


def _single_set_classes(others: tuple[int, ...], size: int):
    """One (size)-subset, enumerated up to symmetry of equal residual values."""
    classes = sorted(Counter(others).items())
    values = [v for v, _ in classes]
    sizes = [s for _, s in classes]

    def rec(i: int, left: int):
        if left == 0:
            yield [0] * (len(classes) - i)
            return
        if i == len(classes):
            return
        for t in range(min(left, sizes[i]), -1, -1):
            for tail in rec(i + 1, left - t):
                yield [t] + tail

    for take in rec(0, size):
        mult = 1
        new = []
        for v, s, t in zip(values, sizes, take):
            mult *= math.comb(s, t)
            new.extend([v - 1] * t)
            new.extend([v] * (s - t))
        yield _free_key(new), mult


def _labeled_branches(labels: list[int], caps: list[int], r: int, k: int, banned) -> Iterator[list[int]]:
    """Usage vectors for every choice of *r* distinct (k-1)-subsets of *labels*.

    ``caps[i]`` bounds how many chosen subsets may contain ``labels[i]``;
    subsets (as label tuples) in *banned* are skipped.
    """
    pos = [i for i, c in enumerate(caps) if c > 0]
    cands = []
    for combo in combinations(pos, k - 1):
        if banned and tuple(labels[i] for i in combo) in banned:
            continue
        cands.append(combo)
    usage = [0] * len(caps)
    if r == 0:
        yield list(usage)
        return

    def rec(start: int, left: int):
        if left == 0:
            yield list(usage)
            return
        for j in range(start, len(cands) - left + 1):
            combo = cands[j]
            if all(usage[i] < caps[i] for i in combo):
                for i in combo:
                    usage[i] += 1
                yield from rec(j + 1, left - 1)
                for i in combo:
                    usage[i] -= 1

    yield from rec(0, r)


# ──────────────────────────────────────────────────────────────────────────────
# Module-level API
# ──────────────────────────────────────────────────────────────────────────────

_DEFAULT = ExactCounter()


def default_counter() -> ExactCounter:
    return _DEFAULT


@dataclass(frozen=True)
class CountResult:
    count: int
    nodes_explored: int


def count_exact(d, k: int, *, counter: ExactCounter | None = None) -> int:
    """Exact number of simple k-graphs on ``[n]`` with degree sequence *d*."""
    c = counter or _DEFAULT
    return c.count(d, k)


def count_exact_report(d, k: int, required=(), *, counter: ExactCounter | None = None) -> CountResult:
    c = counter or _DEFAULT
    value = c.count(d, k, required)
    return CountResult(value, c._call_nodes)


def count_with_edges(d, k: int, required, *, counter: ExactCounter | None = None) -> int:
    """Exact number of k-graphs with degrees *d* that contain every edge in *required*."""
    c = counter or _DEFAULT
    return c.count(d, k, required)


def _require_graphical(d, k, counter) -> int:
    total = count_exact(d, k, counter=counter)
    if total == 0:
        raise ParameterError(f"degree sequence {tuple(as_tuple(d))} is not {k}-graphical")
    return total


def edge_probability_exact(d, k: int, K, *, counter: ExactCounter | None = None) -> Fraction:
    """``P_K(d)``: probability that a uniform k-graph with degrees *d* contains edge *K*."""
    K = normalize_edge(K)
    total = _require_graphical(d, k, counter)
    return Fraction(count_with_edges(d, k, [K], counter=counter), total)


def path_probability_exact(d, k: int, a: int, K, b: int, *, counter: ExactCounter | None = None) -> Fraction:
    """``Y_{a,K,b}(d)``: probability of containing both ``K+a`` and ``K+b``; zero when ``a == b``."""
    K = normalize_edge(K)
    n = len(as_tuple(d))
    if len(K) != k - 1:
        raise ParameterError(f"K must have k-1={k - 1} vertices")
    if a in K or b in K:
        raise ParameterError("a and b must lie outside K")
    if not (0 <= a < n and 0 <= b < n):
        raise ParameterError("vertex out of range")
    total = _require_graphical(d, k, counter)
    if a == b:
        return Fraction(0)
    edges = [K + (a,), K + (b,)]
    return Fraction(count_with_edges(d, k, edges, counter=counter), total)


def ratio_exact(d, k: int, a: int, b: int, *, counter: ExactCounter | None = None) -> Fraction:
    """``R_ab(d) = N(d - e_a) / N(d - e_b)``."""
    degs = as_tuple(d)
    if a == b:
        return Fraction(1)
    den = count_exact(minus(degs, [b]), k, counter=counter)
    if den == 0:
        raise ParameterError(f"N(d - e_{b}) is zero")
    return Fraction(count_exact(minus(degs, [a]), k, counter=counter), den)


# ──────────────────────────────────────────────────────────────────────────────
# Independent brute-force oracle
# ──────────────────────────────────────────────────────────────────────────────

_NAIVE_TABLES: dict[tuple[int, int, int, tuple], Counter] = {}


def naive_degree_table(n: int, k: int, m: int, required=(),
                       kset_cap: int = NAIVE_KSET_CAP, edge_cap: int = NAIVE_EDGE_CAP) -> Counter:
    """Histogram of degree sequences over every m-subset of ``C([n], k)`` that contains *required*."""
    universe = list(combinations(range(n), k))
    if len(universe) > kset_cap or m > edge_cap:
        raise BudgetExceeded(
            f"naive enumeration capped at C(n,k) <= {kset_cap}, m <= {edge_cap}; "
            f"got C({n},{k}) = {len(universe)}, m = {m}"
        )
    req = tuple(sorted(normalize_edge(e) for e in required))
    key = (n, k, m, req)
    table = _NAIVE_TABLES.get(key)
    if table is not None:
        return table
    table = Counter()
    if len(req) <= m:
        rest = [e for e in universe if e not in set(req)]
        for extra in combinations(rest, m - len(req)):
            degs = [0] * n
            for e in req + extra:
                for v in e:
                    degs[v] += 1
            table[tuple(degs)] += 1
    _NAIVE_TABLES[key] = table
    return table


def count_naive(d, k: int, required=(), *, kset_cap: int = NAIVE_KSET_CAP,
                edge_cap: int = NAIVE_EDGE_CAP) -> int:
    """Brute force over all m-subsets of k-sets.  Independent of :func:`count_exact`."""
    degs = as_tuple(d)
    n = len(degs)
    _check_k(n, k)
    if any(x < 0 for x in degs) or sum(degs) % k:
        return 0
    m = sum(degs) // k
    if m > math.comb(n, k):
        return 0
    return naive_degree_table(n, k, m, required, kset_cap, edge_cap)[degs]
