"""Domain types and degree-sequence statistics.

Everything here is exact: means, variances and distances are ``Fraction``
values.  Floating point only shows up inside :class:`LogValue`.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence


class HypercountError(Exception):
    """Base class for library errors."""


class ParameterError(HypercountError, ValueError):
    """An argument violates an operation's precondition."""


class BudgetExceeded(HypercountError, RuntimeError):
    """A search or memo table grew past its configured cap."""


def budget_override(default: int) -> int:
    """Return ``HYPERCOUNT_BUDGET`` if set, else *default*."""
    raw = os.environ.get("HYPERCOUNT_BUDGET")
    if raw:
        return int(float(raw))
    return default


# ──────────────────────────────────────────────────────────────────────────────
# Degree sequences
# ──────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class DegreeSequence:
    """An immutable tuple of nonnegative integer degrees, vertex ``i`` at index ``i``."""

    degrees: tuple[int, ...]

    def __init__(self, degrees: Iterable[int]):
        degs = tuple(int(x) for x in degrees)
        if not degs:
            raise ParameterError("degree sequence must have length >= 1")
        if any(x < 0 for x in degs):
            raise ParameterError(f"negative degree in {degs}")
        object.__setattr__(self, "degrees", degs)

    def __len__(self) -> int:
        return len(self.degrees)

    def __iter__(self) -> Iterator[int]:
        return iter(self.degrees)

    def __getitem__(self, i):
        return self.degrees[i]

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def total(self) -> int:
        return sum(self.degrees)

    @property
    def mean(self) -> Fraction:
        return Fraction(self.total, self.n)

    def minus(self, vertices: Iterable[int]) -> tuple[int, ...]:
        """``d - e_S`` for a vertex multiset S (may go negative; returns a plain tuple)."""
        return minus(self.degrees, vertices)

    def to_json(self) -> list[int]:
        return list(self.degrees)


def as_tuple(d: DegreeSequence | Sequence[int]) -> tuple[int, ...]:
    if isinstance(d, DegreeSequence):
        return d.degrees
    return tuple(int(x) for x in d)


def minus(d: Sequence[int], vertices: Iterable[int]) -> tuple[int, ...]:
    out = list(d)
    for v in vertices:
        out[v] -= 1
    return tuple(out)


def plus(d: Sequence[int], vertices: Iterable[int]) -> tuple[int, ...]:
    out = list(d)
    for v in vertices:
        out[v] += 1
    return tuple(out)


def sigma_sq(d: DegreeSequence | Sequence[int], mean: Fraction | None = None) -> Fraction:
    """Empirical degree variance ``(1/n) * sum (d_v - mean)^2``, exactly.

    *mean* defaults to the sequence's own average.
    """
    degs = as_tuple(d)
    n = len(degs)
    if mean is None:
        mean = Fraction(sum(degs), n)
    return sum(((x - mean) ** 2 for x in degs), Fraction(0)) / n


def lambda_k_distance(d1, d2, k: int) -> Fraction:
    """``max(L_inf(d1 - d2), L_1(d1 - d2) / k)``."""
    a, b = as_tuple(d1), as_tuple(d2)
    if len(a) != len(b):
        raise ParameterError(f"length mismatch: {len(a)} vs {len(b)}")
    if k < 1:
        raise ParameterError("k must be positive")
    diffs = [abs(x - y) for x, y in zip(a, b)]
    return max(Fraction(max(diffs)), Fraction(sum(diffs), k))


@dataclass(frozen=True)
class DegreeStats:
    sum: int
    max: int
    min: int
    spread: Fraction


def degree_stats(d, mean: Fraction | None = None) -> DegreeStats:
    """Sum, max, min and spread ``max |d_v - mean|`` (mean defaults to the exact average)."""
    degs = as_tuple(d)
    if mean is None:
        mean = Fraction(sum(degs), len(degs))
    spread = max(abs(x - mean) for x in degs)
    return DegreeStats(sum(degs), max(degs), min(degs), Fraction(spread))


# ──────────────────────────────────────────────────────────────────────────────
# Scenario parameters
# ──────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Params:
    """Scenario record (n, k, m) with the exact derived quantities."""

    n: int
    k: int
    m: int
    q: int = field(init=False)
    d: Fraction = field(init=False)
    mu: Fraction = field(init=False)
    alpha: Fraction = field(init=False)

    def __post_init__(self):
        if not 2 <= self.k <= self.n:
            raise ParameterError(f"need 2 <= k <= n, got k={self.k}, n={self.n}")
        if not 0 <= self.m <= math.comb(self.n, self.k):
            raise ParameterError(f"m={self.m} outside [0, C({self.n},{self.k})]")
        object.__setattr__(self, "q", self.k - 1)
        object.__setattr__(self, "d", Fraction(self.k * self.m, self.n))
        object.__setattr__(self, "mu", Fraction(self.m, math.comb(self.n, self.k)))
        # alpha is undefined for n == 1, which k >= 2 already rules out
        object.__setattr__(self, "alpha", Fraction(self.k - 1, self.n - 1))

    @property
    def edge_slots(self) -> int:
        """``C(n-1, k-1)``: number of k-sets through a fixed vertex."""
        return math.comb(self.n - 1, self.k - 1)

    @property
    def n_ksets(self) -> int:
        return math.comb(self.n, self.k)

    @classmethod
    def for_sequence(cls, d, k: int) -> "Params":
        degs = as_tuple(d)
        total = sum(degs)
        if total % k:
            raise ParameterError(f"degree sum {total} not divisible by k={k}")
        return cls(len(degs), k, total // k)

    def to_json(self) -> dict:
        return {
            "n": self.n, "k": self.k, "m": self.m, "q": self.q,
            "d": fraction_str(self.d), "mu": fraction_str(self.mu),
            "alpha": fraction_str(self.alpha),
        }


def fraction_str(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(s: str) -> Fraction:
    return Fraction(s)


# ──────────────────────────────────────────────────────────────────────────────
# Edges
# ──────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class EdgeSet:
    """A simple k-uniform hypergraph on ``range(n)``."""

    n: int
    k: int
    edges: frozenset

    def __init__(self, n: int, k: int, edges: Iterable[Iterable[int]]):
        es = set()
        for e in edges:
            t = tuple(sorted(e))
            if len(t) != k or len(set(t)) != k:
                raise ParameterError(f"edge {t} is not a {k}-set")
            if t[0] < 0 or t[-1] >= n:
                raise ParameterError(f"edge {t} outside vertex set [0, {n})")
            if t in es:
                raise ParameterError(f"repeated edge {t}")
            es.add(t)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "edges", frozenset(es))

    def degrees(self) -> DegreeSequence:
        degs = [0] * self.n
        for e in self.edges:
            for v in e:
                degs[v] += 1
        return DegreeSequence(degs)


def ksets(vertices: Iterable[int], k: int) -> Iterator[tuple[int, ...]]:
    """All k-subsets of *vertices* as sorted tuples, in lexicographic order."""
    return combinations(sorted(vertices), k)


def normalize_edge(e: Iterable[int]) -> tuple[int, ...]:
    t = tuple(sorted(int(x) for x in e))
    if len(set(t)) != len(t):
        raise ParameterError(f"edge {t} has repeated vertices")
    return t


# ──────────────────────────────────────────────────────────────────────────────
# Log-space values
# ──────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class LogValue:
    """A real number stored as ``sign * exp(ln)``; zero has ``sign == 0`` and ``ln = -inf``."""

    sign: int
    ln: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ParameterError(f"bad sign {self.sign}")
        if (self.sign == 0) != (self.ln == -math.inf):
            raise ParameterError("sign 0 requires ln == -inf and vice versa")

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(0, -math.inf)

    @classmethod
    def from_log(cls, ln: float) -> "LogValue":
        return cls(1, float(ln))

    @classmethod
    def from_value(cls, x) -> "LogValue":
        """Exact ints/Fractions are logged without overflow."""
        if x == 0:
            return cls.zero()
        sign = 1 if x > 0 else -1
        x = abs(x)
        if isinstance(x, Fraction):
            return cls(sign, math.log(x.numerator) - math.log(x.denominator))
        return cls(sign, math.log(x))

    def __mul__(self, other: "LogValue") -> "LogValue":
        if self.sign == 0 or other.sign == 0:
            return LogValue.zero()
        return LogValue(self.sign * other.sign, self.ln + other.ln)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        if other.sign == 0:
            raise ZeroDivisionError("division by LogValue zero")
        if self.sign == 0:
            return LogValue.zero()
        return LogValue(self.sign * other.sign, self.ln - other.ln)

    def __add__(self, other: "LogValue") -> "LogValue":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other) if self.ln >= other.ln else (other, self)
        t = math.exp(lo.ln - hi.ln)
        if hi.sign == lo.sign:
            return LogValue(hi.sign, hi.ln + math.log1p(t))
        if t == 1.0:
            return LogValue.zero()
        return LogValue(hi.sign, hi.ln + math.log1p(-t))

    def __neg__(self) -> "LogValue":
        return LogValue(-self.sign, self.ln)

    def __sub__(self, other: "LogValue") -> "LogValue":
        return self + (-other)

    def exp(self, power: float) -> "LogValue":
        """``self ** power`` for positive values."""
        if self.sign < 0:
            raise ParameterError("power of a negative LogValue")
        if self.sign == 0:
            return self
        return LogValue(1, self.ln * power)

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.ln)

    def to_json(self) -> dict:
        ln = None if self.sign == 0 else self.ln
        return {"sign": self.sign, "ln": ln}


def log_binom(a, b) -> float:
    """``ln C(a, b)`` for real a >= b >= 0 via log-gamma; ``-inf`` outside the support."""
    if b < 0 or b > a:
        return -math.inf
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)
