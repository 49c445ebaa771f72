"""Recursive relations and the P / R / Y / C operator algebra.

A *state* bundles three point evaluators::

    p(A, v, d)      ~ probability that edge A+v is present   (sum d = 0 mod k)
    y(a, K, b, d)   ~ probability that a+K and K+b both are   (sum d = 0 mod k)
    r(a, b, d)      ~ N(d - e_a) / N(d - e_b)                 (sum d = 1 mod k)

States are lazy: nothing is tabulated, and each derived state memoizes the
points it has been asked for.  The exact state reads everything off the
enumeration oracle in rational arithmetic, so operator identities can be
checked with ``==``.

Where an operator needs a value the state cannot supply (a non-graphical
sequence, a zero denominator), :class:`Inadmissible` is raised and the point
is excluded by the caller.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .asymptotic import pstar, rstar, ystar
from .core import BudgetExceeded, HypercountError, ParameterError, as_tuple, budget_override, minus, plus
from .exact import ExactCounter, count_exact, count_with_edges, default_counter

DEFAULT_MEMO_CAP = 10**7


class Inadmissible(HypercountError):
    """The requested point falls outside the region where the value is defined."""


# ──────────────────────────────────────────────────────────────────────────────
# A-consistent ordering
# ──────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ConsistentOrdering:
    a_order: tuple[int, ...]
    b_order: tuple[int, ...]


def a_consistent_ordering(A: Iterable[int], B: Iterable[int]) -> ConsistentOrdering:
    """Order A increasingly; shared elements sit in the same slot, the rest of B fill in increasing order."""
    a = tuple(sorted(A))
    bset = set(B)
    if len(a) != len(set(a)) or len(bset) != len(a):
        raise ParameterError("A and B must be sets of equal size")
    fresh = iter(sorted(bset - set(a)))
    b = tuple(x if x in bset else next(fresh) for x in a)
    return ConsistentOrdering(a, b)


def chain_points(A, B, d) -> list[tuple[int, int, tuple[int, ...]]]:
    """The ``(b_j, a_j, d - e_{b_1..b_{j-1} a_{j+1}..a_q})`` factors of ``r_{B,A}(d)``, diagonal ones dropped."""
    order = a_consistent_ordering(A, B)
    a, b = order.a_order, order.b_order
    out = []
    for j in range(len(a)):
        if a[j] == b[j]:
            continue
        out.append((b[j], a[j], minus(d, b[:j] + a[j + 1:])))
    return out


# ──────────────────────────────────────────────────────────────────────────────
# States
# ──────────────────────────────────────────────────────────────────────────────

def _residue(d, k: int, want: int, what: str) -> None:
    if sum(d) % k != want:
        raise AssertionError(f"{what} evaluated at sum {sum(d)} (mod {k}) != {want}")


class State:
    """Base class.  Subclasses implement ``_p``, ``_y`` and optionally ``_r``."""

    provenance = "abstract"

    def __init__(self, n: int, k: int, memo_cap: int | None = None):
        self.n = n
        self.k = k
        self.memo_cap = memo_cap if memo_cap is not None else budget_override(DEFAULT_MEMO_CAP)
        self.memo: dict[tuple, object] = {}
        self.evaluations = 0

    def _cached(self, key, fn):
        hit = self.memo.get(key, _MISSING)
        if hit is not _MISSING:
            if isinstance(hit, Inadmissible):
                raise hit
            return hit
        if len(self.memo) >= self.memo_cap:
            raise BudgetExceeded(f"memo exceeded {self.memo_cap} entries")
        self.evaluations += 1
        try:
            val = fn()
        except Inadmissible as exc:
            self.memo[key] = exc
            raise
        self.memo[key] = val
        return val

    def p(self, A, v: int, d):
        A = tuple(sorted(A))
        d = as_tuple(d)
        return self._cached(("p", A, v, d), lambda: self._p(A, v, d))

    def y(self, a: int, K, b: int, d):
        if a == b:
            return 0
        K = tuple(sorted(K))
        d = as_tuple(d)
        return self._cached(("y", a, K, b, d), lambda: self._y(a, K, b, d))

    def r(self, a: int, b: int, d):
        if a == b:
            return 1
        d = as_tuple(d)
        return self._cached(("r", a, b, d), lambda: self._r(a, b, d))

    def r_chain(self, B, A, d):
        """``r_{B,A}(d)`` as the A-consistent product."""
        val = 1
        for bj, aj, point in chain_points(A, B, d):
            val = val * self.r(bj, aj, point)
        return val

    def _p(self, A, v, d):
        raise NotImplementedError

    def _y(self, a, K, b, d):
        raise NotImplementedError

    def _r(self, a, b, d):
        return op_R(self, a, b, d)


_MISSING = object()


class ExactState(State):
    """``(P, Y, R)`` from the enumeration oracle, as exact rationals."""

    provenance = "exact"

    def __init__(self, n: int, k: int, counter: ExactCounter | None = None, memo_cap: int | None = None):
        super().__init__(n, k, memo_cap)
        self.counter = counter or default_counter()

    def total(self, d) -> int:
        if any(x < 0 for x in d):
            return 0
        return count_exact(d, self.k, counter=self.counter)

    def _p(self, A, v, d):
        total = self.total(d)
        if total == 0:
            raise Inadmissible(f"{d} is not graphical")
        return Fraction(count_with_edges(d, self.k, [A + (v,)], counter=self.counter), total)

    def _y(self, a, K, b, d):
        total = self.total(d)
        if total == 0:
            raise Inadmissible(f"{d} is not graphical")
        return Fraction(count_with_edges(d, self.k, [K + (a,), K + (b,)], counter=self.counter), total)

    def _r(self, a, b, d):
        den = self.total(minus(d, [b]))
        if den == 0:
            raise Inadmissible(f"d - e_{b} is not graphical")
        return Fraction(self.total(minus(d, [a])), den)


class StarState(State):
    """``(P*, Y*, R*)``; rationals by default, floats with ``as_float``."""

    provenance = "star"

    def __init__(self, n: int, k: int, as_float: bool = False, memo_cap: int | None = None):
        super().__init__(n, k, memo_cap)
        self.as_float = as_float

    def _conv(self, x):
        return float(x) if self.as_float else x

    def _guard(self, fn):
        try:
            return self._conv(fn())
        except (ParameterError, ZeroDivisionError) as exc:
            raise Inadmissible(str(exc)) from exc

    def _p(self, A, v, d):
        return self._guard(lambda: pstar(d, self.k, A + (v,)))

    def _y(self, a, K, b, d):
        return self._guard(lambda: ystar(d, self.k, a, K, b))

    def _r(self, a, b, d):
        return self._guard(lambda: rstar(d, self.k, a, b))


class ConstantState(State):
    """``p = p0``, ``y = y0``, ``r = r0`` everywhere."""

    provenance = "constant"

    def __init__(self, n: int, k: int, p0, y0, r0=1, memo_cap: int | None = None):
        super().__init__(n, k, memo_cap)
        self.p0, self.y0, self.r0 = p0, y0, r0

    def _p(self, A, v, d):
        return self.p0

    def _y(self, a, K, b, d):
        return self.y0

    def _r(self, a, b, d):
        return self.r0


class DerivedState(State):
    """``C(p, y)``: new ``p`` is ``P(p, R(p, y))``, new ``y`` is ``Y(new p, y)``."""

    def __init__(self, inner: State, memo_cap: int | None = None):
        super().__init__(inner.n, inner.k, memo_cap if memo_cap is not None else inner.memo_cap)
        self.inner = inner
        self.depth = getattr(inner, "depth", 0) + 1
        self.ratio = RatioView(inner)

    @property
    def provenance(self) -> str:
        return f"derived({self.depth})"

    def _p(self, A, v, d):
        return op_P(self.inner, self.ratio, A, v, d)

    def _y(self, a, K, b, d):
        return op_Y_split(self, self.inner, a, K, b, d)


class RatioView(State):
    """``R(p, y)`` of an inner state, exposed as the ``r`` of a state."""

    def __init__(self, inner: State):
        super().__init__(inner.n, inner.k, inner.memo_cap)
        self.inner = inner

    def _r(self, a, b, d):
        return op_R(self.inner, a, b, d)


# ──────────────────────────────────────────────────────────────────────────────
# Operators
# ──────────────────────────────────────────────────────────────────────────────

def _safe_div(num, den):
    if den == 0:
        raise Inadmissible("zero denominator")
    return num / den


def _z_sum(state: State, i: int, j: int, d) -> object:
    """``d (Z_p + Z_y)(i, j, d)``: the factor ``1/d`` in each Z cancels the leading ``d``."""
    if i == j:
        return 0
    rest = [u for u in range(state.n) if u not in (i, j)]
    k = state.k
    total = 0
    for K in combinations(rest, k - 2):
        total = total + state.p(K + (i,), j, d)
    for K in combinations(rest, k - 1):
        total = total + state.y(i, K, j, d)
    return total


def op_R(state: State, a: int, b: int, d):
    """``(d_a - d Z(a, b, d - e_b)) / (d_b - d Z(b, a, d - e_a))``."""
    d = as_tuple(d)
    _residue(d, state.k, 1 % state.k, "R")
    if a == b:
        if d[a] == 0:
            raise Inadmissible("zero denominator")
        return 1
    num = d[a] - _z_sum(state, a, b, minus(d, [b]))
    den = d[b] - _z_sum(state, b, a, minus(d, [a]))
    return _safe_div(num, den)


def op_P(p_state: State, r_state: State, A, v: int, d):
    """``d_v (sum_B r_{B,A}(d - e_v) (1 - p_{B,v}(d - e_{B+v})) / (1 - p_{A,v}(d - e_{A+v})))^{-1}``."""
    d = as_tuple(d)
    A = tuple(sorted(A))
    k = p_state.k
    _residue(d, k, 0, "P")
    if v in A or len(A) != k - 1:
        raise ParameterError("need a (k-1)-set A and v outside it")
    base = minus(d, [v])
    own = 1 - p_state.p(A, v, minus(base, A))
    if own == 0:
        raise Inadmissible("p_{A,v} equals 1")
    others = [u for u in range(p_state.n) if u != v]
    total = 0
    for B in combinations(others, k - 1):
        term = r_state.r_chain(B, A, base) * (1 - p_state.p(B, v, minus(base, B)))
        total = total + term
    return _safe_div(d[v] * own, total)


def op_Y(p_state: State, y_state: State, a: int, K, b: int, d):
    """``p_{K,a}(d) / (1 - p_{K,a}(d')) (p_{K,b}(d') - y_{a,K,b}(d'))`` with ``d' = d - e_{K+a}``."""
    return op_Y_split(p_state, y_state, a, K, b, d)


def op_Y_split(p_state: State, y_state: State, a: int, K, b: int, d):
    d = as_tuple(d)
    K = tuple(sorted(K))
    _residue(d, p_state.k, 0, "Y")
    if a == b:
        return 0
    if a in K or b in K or len(K) != p_state.k - 1:
        raise ParameterError("need a (k-1)-set K and a, b outside it")
    shifted = minus(d, K + (a,))
    lead = p_state.p(K, a, d)
    inner = p_state.p(K, a, shifted)
    return _safe_div(lead, 1 - inner) * (p_state.p(K, b, shifted) - y_state.y(a, K, b, shifted))


def op_C(state: State) -> DerivedState:
    """The compositional operator; evaluation is lazy and memoized."""
    return DerivedState(state)


# ──────────────────────────────────────────────────────────────────────────────
# Queries, iteration, contraction
# ──────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Query:
    kind: str  # "p" or "y"
    d: tuple[int, ...]
    A: tuple[int, ...] = ()
    v: int = -1
    a: int = -1
    b: int = -1

    @classmethod
    def p_point(cls, A, v, d) -> "Query":
        return cls("p", as_tuple(d), A=tuple(sorted(A)), v=v)

    @classmethod
    def y_point(cls, a, K, b, d) -> "Query":
        return cls("y", as_tuple(d), A=tuple(sorted(K)), a=a, b=b)

    @classmethod
    def from_json(cls, obj: dict) -> "Query":
        if obj["kind"] == "p":
            return cls.p_point(obj["A"], obj["v"], obj["d"])
        return cls.y_point(obj["a"], obj["K"], obj["b"], obj["d"])

    def to_json(self) -> dict:
        if self.kind == "p":
            return {"kind": "p", "A": list(self.A), "v": self.v, "d": list(self.d)}
        return {"kind": "y", "a": self.a, "K": list(self.A), "b": self.b, "d": list(self.d)}

    def evaluate(self, state: State):
        if self.kind == "p":
            return state.p(self.A, self.v, self.d)
        return state.y(self.a, self.A, self.b, self.d)


@dataclass
class IterationReport:
    t: int
    values: list = field(default_factory=list)  # value or None when inadmissible
    evaluations: int = 0
    memo_entries: int = 0


def iterate_C(state: State, t: int, queries: Sequence[Query]) -> IterationReport:
    """Evaluate ``C^t(state)`` at each query."""
    if t < 1:
        raise ParameterError("t must be at least 1")
    chain = [state]
    for _ in range(t):
        chain.append(op_C(chain[-1]))
    top = chain[-1]
    report = IterationReport(t)
    for q in queries:
        try:
            report.values.append(q.evaluate(top))
        except Inadmissible:
            report.values.append(None)
    for s in chain[1:]:
        report.evaluations += s.evaluations + s.ratio.evaluations
        report.memo_entries += len(s.memo) + len(s.ratio.memo)
    return report


def _rel_dev(x, ref) -> float:
    return abs(float(Fraction(x) / Fraction(ref)) - 1) if not isinstance(x, float) else abs(x / float(ref) - 1)


@dataclass(frozen=True)
class ContractionReport:
    points: int
    before: float
    after: float

    @property
    def factor(self) -> float:
        return self.after / self.before if self.before else math.inf


def measure_contraction(approx: State, exact: ExactState, queries: Sequence[Query]) -> ContractionReport:
    """Max relative distance to the exact values before and after one application of C.

    Only queries where the exact value is positive and both evaluations are
    admissible are used.
    """
    applied = op_C(approx)
    before = after = 0.0
    used = 0
    for q in queries:
        try:
            ref = q.evaluate(exact)
            if ref == 0:
                continue
            x0 = q.evaluate(approx)
            x1 = q.evaluate(applied)
        except Inadmissible:
            continue
        used += 1
        before = max(before, _rel_dev(x0, ref))
        after = max(after, _rel_dev(x1, ref))
    return ContractionReport(used, before, after)


def measure_invariance(approx: State, queries: Sequence[Query]) -> tuple[int, float]:
    """Max relative change ``|C(s)/s - 1|`` over the admissible queries."""
    applied = op_C(approx)
    worst, used = 0.0, 0
    for q in queries:
        try:
            x0 = q.evaluate(approx)
            x1 = q.evaluate(applied)
        except Inadmissible:
            continue
        if x0 == 0:
            continue
        used += 1
        worst = max(worst, _rel_dev(x1, x0))
    return used, worst


# ──────────────────────────────────────────────────────────────────────────────
# Verification of the recursive relations
# ──────────────────────────────────────────────────────────────────────────────

@dataclass
class RelationTally:
    checked: int = 0
    skipped: int = 0
    violated: int = 0


@dataclass
class RelationReport:
    ratio: RelationTally = field(default_factory=RelationTally)
    edge: RelationTally = field(default_factory=RelationTally)
    path: RelationTally = field(default_factory=RelationTally)
    violations: list = field(default_factory=list)

    @property
    def checked(self) -> int:
        return self.ratio.checked + self.edge.checked + self.path.checked

    @property
    def skipped(self) -> int:
        return self.ratio.skipped + self.edge.skipped + self.path.skipped

    @property
    def violated(self) -> int:
        return self.ratio.violated + self.edge.violated + self.path.violated

    def to_json(self) -> dict:
        def tally(t):
            return {"checked": t.checked, "skipped": t.skipped, "violated": t.violated}

        return {
            "checked": self.checked, "skipped": self.skipped, "violated": self.violated,
            "ratio": tally(self.ratio), "edge": tally(self.edge), "path": tally(self.path),
            "violations": [list(map(str, v)) for v in self.violations[:20]],
        }


def _graphical(state: ExactState, d) -> bool:
    return state.total(d) > 0


def _record(tally: RelationTally, report: RelationReport, ok: bool, tag) -> None:
    tally.checked += 1
    if not ok:
        tally.violated += 1
        report.violations.append(tag)


def verify_recursive_relations(corpus: Iterable[tuple[Sequence[int], int]],
                               counter: ExactCounter | None = None) -> RelationReport:
    """Check the ratio, edge and path relations exactly on every admissible point.

    For each graphical ``g`` in the corpus:

    * ratio: ``R_ab(x) == R(P, Y)(a, b, x)`` at ``x = g + e_a`` for all ``a != b``;
    * edge: ``P_{A+v}(g) == P(P, R)(A, v, g)`` for all ``(A, v)`` with ``P_{A+v}(g) > 0``;
    * path: ``Y_{a,K,b}(g) == Y(P, Y)(a, K, b, g)`` for all ``(a, K, b)``.

    Points whose side conditions fail are counted as skipped.
    """
    report = RelationReport()
    states: dict[tuple[int, int], ExactState] = {}
    seen_ratio: set = set()
    for g, k in corpus:
        g = as_tuple(g)
        n = len(g)
        st = states.setdefault((n, k), ExactState(n, k, counter))
        if not _graphical(st, g):
            continue
        _check_ratio(st, g, report, seen_ratio)
        _check_edge(st, g, report)
        _check_path(st, g, report)
    return report


def _check_ratio(st: ExactState, g, report: RelationReport, seen: set) -> None:
    n, k = st.n, st.k
    for a in range(n):
        x = plus(g, [a])
        for b in range(n):
            if a == b or (k, x, a, b) in seen:
                continue
            seen.add((k, x, a, b))
            if not _graphical(st, minus(x, [b])):
                report.ratio.skipped += 1
                continue
            try:
                got = op_R(st, a, b, x)
            except Inadmissible:
                report.ratio.skipped += 1
                continue
            _record(report.ratio, report, got == st.r(a, b, x), ("ratio", x, a, b))


def _check_edge(st: ExactState, g, report: RelationReport) -> None:
    n, k = st.n, st.k
    for v in range(n):
        base = minus(g, [v])
        others = [u for u in range(n) if u != v]
        for A in combinations(others, k - 1):
            want = st.p(A, v, g)
            if want == 0 or not _edge_side_conditions(st, A, v, base, others):
                report.edge.skipped += 1
                continue
            try:
                got = op_P(st, st, A, v, g)
            except Inadmissible:
                report.edge.skipped += 1
                continue
            _record(report.edge, report, got == want, ("edge", g, A, v))


def _edge_side_conditions(st: ExactState, A, v, base, others) -> bool:
    k = st.k
    for B in combinations(others, k - 1):
        order = a_consistent_ordering(A, B)
        a, b = order.a_order, order.b_order
        for j in range(k):
            if not _graphical(st, minus(base, b[:j] + a[j:])):
                return False
    return True


def _check_path(st: ExactState, g, report: RelationReport) -> None:
    n, k = st.n, st.k
    for K in combinations(range(n), k - 1):
        outside = [u for u in range(n) if u not in K]
        for a in outside:
            shifted = minus(g, K + (a,))
            for b in outside:
                if a == b:
                    continue
                if not _graphical(st, shifted) or st.p(K, a, shifted) >= 1:
                    report.path.skipped += 1
                    continue
                want = st.y(a, K, b, g)
                try:
                    got = op_Y(st, st, a, K, b, g)
                except Inadmissible:
                    report.path.skipped += 1
                    continue
                _record(report.path, report, got == want, ("path", g, a, K, b))


def telescoping_chain_check(d, k: int, A, B, v: int, counter: ExactCounter | None = None) -> bool:
    """``R_{B,A}(d - e_v) == N(d - e_{B+v}) / N(d - e_{A+v})`` when every chain sequence is graphical."""
    d = as_tuple(d)
    st = ExactState(len(d), k, counter)
    base = minus(d, [v])
    den = st.total(minus(base, A))
    if den == 0:
        raise Inadmissible("d - e_{A+v} is not graphical")
    return st.r_chain(B, A, base) == Fraction(st.total(minus(base, B)), den)
