"""Degree-sequence laws on Omega = {d : sum(d) = km}.

* ``D``: degrees of a uniform k-graph with m edges (exact via the oracle).
* ``B``: n binomials Bin(C(n-1,k-1), p) conditioned on summing to km.  The
  conditioned law does not depend on p, so p never appears.
* ``T``: n hypergeometrics (C(n,k), m, C(n-1,k-1)) conditioned the same way.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from .core import BudgetExceeded, LogValue, ParameterError, Params, as_tuple, budget_override
from .exact import ExactCounter, count_exact

HYPERGEOM_TERM_CAP = 10**8


class Model(enum.Enum):
    EXACT_D = "exact"
    BINOMIAL_B = "binomial"
    HYPERGEOM_T = "hypergeom"


@dataclass(frozen=True)
class ModelSpec:
    params: Params
    model: Model


def _in_omega(degs: tuple[int, ...], p: Params) -> bool:
    if len(degs) != p.n:
        raise ParameterError(f"sequence length {len(degs)} != n={p.n}")
    cap = p.edge_slots
    return sum(degs) == p.k * p.m and all(0 <= x <= cap for x in degs)


# ── B: conditioned binomials ─────────────────────────────────────────────────

def prob_binomial_model(d, p: Params) -> Fraction:
    """``C(n C(n-1,k-1), km)^{-1} prod_v C(C(n-1,k-1), d_v)``; zero outside Omega."""
    degs = as_tuple(d)
    if not _in_omega(degs, p):
        return Fraction(0)
    cap = p.edge_slots
    num = 1
    for x in degs:
        num *= math.comb(cap, x)
    return Fraction(num, math.comb(p.n * cap, p.k * p.m))


def log_prob_binomial_model(d, p: Params) -> LogValue:
    """Log-space twin of :func:`prob_binomial_model`, via log-gamma."""
    degs = as_tuple(d)
    if not _in_omega(degs, p):
        return LogValue.zero()
    cap = p.edge_slots
    ln = sum(_lgbinom(cap, x) for x in degs) - _lgbinom(p.n * cap, p.k * p.m)
    return LogValue.from_log(ln)


def _lgbinom(a: int, b: int) -> float:
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


# ── T: conditioned hypergeometrics ───────────────────────────────────────────

def _hyper_weights(p: Params) -> list[int]:
    """Unnormalized hypergeometric pmf ``C(K, j) C(N-K, m-j)``; the common ``C(N, m)`` cancels."""
    big_n, big_k = p.n_ksets, p.edge_slots
    return [math.comb(big_k, j) * math.comb(big_n - big_k, p.m - j) if j <= p.m else 0
            for j in range(big_k + 1)]


@lru_cache(maxsize=64)
def _hyper_normalizer(n: int, k: int, m: int, term_cap: int) -> int:
    p = Params(n, k, m)
    w = _hyper_weights(p)
    target = k * m
    if n * (target + 1) * len(w) > term_cap:
        raise BudgetExceeded(f"hypergeometric normalization needs ~{n * (target + 1) * len(w)} terms")
    # poly[s] = sum over partial sequences with sum s of prod h(d_v)
    poly = [1] + [0] * target
    for _ in range(n):
        nxt = [0] * (target + 1)
        for s, acc in enumerate(poly):
            if acc:
                for j, wj in enumerate(w):
                    if s + j > target:
                        break
                    if wj:
                        nxt[s + j] += acc * wj
        poly = nxt
    return poly[target]


def prob_hypergeom_model(d, p: Params, *, term_cap: int | None = None) -> Fraction:
    """``prod_v h(d_v) / Z`` with ``Z`` the exact convolution over Omega."""
    degs = as_tuple(d)
    if not _in_omega(degs, p):
        return Fraction(0)
    cap = term_cap if term_cap is not None else budget_override(HYPERGEOM_TERM_CAP)
    w = _hyper_weights(p)
    num = 1
    for x in degs:
        num *= w[x]
    return Fraction(num, _hyper_normalizer(p.n, p.k, p.m, cap))


# ── D: the true law ──────────────────────────────────────────────────────────

def prob_degseq_exact(d, p: Params, *, counter: ExactCounter | None = None) -> Fraction:
    """``N(d) / C(C(n,k), m)``."""
    degs = as_tuple(d)
    if not _in_omega(degs, p):
        return Fraction(0)
    return Fraction(count_exact(degs, p.k, counter=counter), math.comb(p.n_ksets, p.m))


def prob(model: Model | str, d, p: Params) -> Fraction:
    model = Model(model)
    if model is Model.EXACT_D:
        return prob_degseq_exact(d, p)
    if model is Model.BINOMIAL_B:
        return prob_binomial_model(d, p)
    return prob_hypergeom_model(d, p)


# ── Omega enumeration ────────────────────────────────────────────────────────

def omega(n: int, total: int, cap: int | None = None) -> Iterator[tuple[int, ...]]:
    """All length-n nonnegative integer sequences with the given sum, entries <= cap."""
    cap = total if cap is None else min(cap, total)

    def rec(i: int, left: int):
        if i == n - 1:
            if left <= cap:
                yield (left,)
            return
        for x in range(min(cap, left), -1, -1):
            for tail in rec(i + 1, left - x):
                yield (x,) + tail

    if n == 0:
        return
    yield from rec(0, total)


def omega_partitions(n: int, total: int, cap: int | None = None) -> Iterator[tuple[tuple[int, ...], int]]:
    """Nonincreasing representatives of Omega with the number of distinct rearrangements."""
    cap = total if cap is None else min(cap, total)

    def rec(slots: int, left: int, top: int):
        if slots == 0:
            if left == 0:
                yield ()
            return
        for x in range(min(top, left), -1, -1):
            if x * slots < left:
                break
            for tail in rec(slots - 1, left - x, x):
                yield (x,) + tail

    for part in rec(n, total, cap):
        mult = math.factorial(n)
        for v in set(part):
            mult //= math.factorial(part.count(v))
        yield part, mult


# ── Samplers ─────────────────────────────────────────────────────────────────

def trial_rng(seed: int, trial: int = 0) -> np.random.Generator:
    """Independent stream per (seed, trial) so trials can be split across workers."""
    return np.random.default_rng([seed, trial])


@lru_cache(maxsize=32)
def _binom_table(n: int, k: int) -> np.ndarray:
    tab = np.zeros((k + 1, n + 1), dtype=np.int64)
    for i in range(k + 1):
        for c in range(n + 1):
            tab[i, c] = math.comb(c, i)
    return tab


def unrank_ksets(ranks: np.ndarray, n: int, k: int) -> np.ndarray:
    """Map lexicographic ranks in ``[0, C(n,k))`` to k-sets, one row per rank.

    Lex rank r of S equals ``C(n,k) - 1 - colex(n-1-S)``, and colex ranks
    unrank greedily with one ``searchsorted`` per coordinate.
    """
    total = math.comb(n, k)
    r = (total - 1) - np.asarray(ranks, dtype=np.int64)
    tab = _binom_table(n, k)
    out = np.empty((r.size, k), dtype=np.int64)
    for i in range(k, 0, -1):
        # largest c with C(c, i) <= r
        c = np.searchsorted(tab[i], r, side="right") - 1
        out[:, k - i] = c
        r = r - tab[i, c]
    return (n - 1) - out


def sample_hypergraph_degrees(p: Params, rng_seed: int, trial: int = 0) -> tuple[int, ...]:
    """Degrees of a uniform m-subset of the k-sets of ``[n]``."""
    if p.n_ksets >= 2**62:
        raise ParameterError("C(n,k) too large for int64 ranks")
    rng = trial_rng(rng_seed, trial)
    if p.m == 0:
        return (0,) * p.n
    ranks = rng.choice(p.n_ksets, size=p.m, replace=False)
    edges = unrank_ksets(ranks, p.n, p.k)
    return tuple(int(x) for x in np.bincount(edges.ravel(), minlength=p.n))


def sample_conditioned_binomials(p: Params, rng_seed: int, trial: int = 0) -> tuple[int, ...]:
    """A draw from B: km successes spread over n cells of capacity C(n-1,k-1)."""
    rng = trial_rng(rng_seed, trial)
    cap = p.edge_slots
    if p.k * p.m > p.n * cap:
        raise ParameterError("km exceeds n C(n-1,k-1)")
    draw = rng.multivariate_hypergeometric([cap] * p.n, p.k * p.m)
    return tuple(int(x) for x in draw)


def sample_many(model: str, p: Params, trials: int, seed: int) -> np.ndarray:
    """``trials x n`` array of samples from ``"hypergraph"`` or ``"binomial"``."""
    fn = {"hypergraph": sample_hypergraph_degrees, "binomial": sample_conditioned_binomials}.get(model)
    if fn is None:
        raise ParameterError(f"unknown sampler {model!r}")
    out = np.empty((trials, p.n), dtype=np.int64)
    for t in range(trials):
        out[t] = fn(p, seed, t)
    return out
