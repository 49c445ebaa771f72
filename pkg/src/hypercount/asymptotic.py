"""Closed-form estimates, their error terms, and the P*/R*/Y* approximants.

Probability estimates are returned as :class:`LogValue` because the binomials
overflow doubles almost immediately.  The ratio and star formulas are
rational functions of the degrees, so they are evaluated exactly as
``Fraction`` values; callers wanting floats can convert.

Conventions:

* ``log`` is the natural logarithm in every error term.
* Absolute constants hidden in the O-terms are taken as 1; each error term
  accepts a ``multiplier``.
* In P*, R*, Y*, the symbols d, mu and eps_v are computed from the argument
  sequence itself (its own average), not from a fixed ``m``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import LogValue, ParameterError, Params, as_tuple, normalize_edge, sigma_sq
from .models import log_prob_binomial_model


def _k_of(p) -> int:
    return p.k if isinstance(p, Params) else int(p)


def _check_sum(degs: tuple[int, ...], p: Params) -> None:
    if len(degs) != p.n:
        raise ParameterError(f"sequence length {len(degs)} != n={p.n}")
    if sum(degs) != p.k * p.m:
        raise ParameterError(f"degree sum {sum(degs)} != km={p.k * p.m}")


def _lgbinom(a, b) -> float:
    if b < 0 or b > a:
        return -math.inf
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


# ──────────────────────────────────────────────────────────────────────────────
# Counting and probability estimates
# ──────────────────────────────────────────────────────────────────────────────

def regular_count_estimate(n: int, k: int, d: int) -> LogValue:
    """Estimated number of d-regular k-graphs on n vertices."""
    if not 2 <= k <= n:
        raise ParameterError(f"need 2 <= k <= n, got k={k}, n={n}")
    slots = math.comb(n - 1, k - 1)
    if d < 0 or d > slots:
        raise ParameterError(f"d={d} outside [0, C(n-1,k-1)={slots}]")
    if (d * n) % k:
        raise ParameterError(f"dn={d * n} not divisible by k={k}")
    ln = (
        _lgbinom(math.comb(n, k), d * n // k)
        - _lgbinom(n * slots, d * n)
        + n * _lgbinom(slots, d)
        + (k - 1) / 2
    )
    return LogValue.from_log(ln)


def dense_prob_estimate(d, p: Params) -> LogValue:
    """``Pr_B(d) exp((k-1)/2 - (k-1) n sigma^2 / (2 d (n-k)(1-mu)))``."""
    degs = as_tuple(d)
    _check_sum(degs, p)
    if p.n == p.k or p.mu == 1 or p.m == 0:
        raise ParameterError("dense estimate needs n > k, 0 < mu < 1")
    s2 = sigma_sq(degs)
    expo = Fraction(p.k - 1, 2) - (p.k - 1) * p.n * s2 / (2 * p.d * (p.n - p.k) * (1 - p.mu))
    return log_prob_binomial_model(degs, p) * LogValue.from_log(float(expo))


def sparse_prob_estimate(d, p: Params) -> LogValue:
    """``Pr_B(d) exp((k-1)/2 (1 - n sigma^2 / (km)))``."""
    degs = as_tuple(d)
    _check_sum(degs, p)
    if p.m == 0:
        raise ParameterError("sparse estimate needs m > 0")
    expo = Fraction(p.k - 1, 2) * (1 - p.n * sigma_sq(degs) / (p.k * p.m))
    return log_prob_binomial_model(degs, p) * LogValue.from_log(float(expo))


def h_correction(d, p: Params, regime: str) -> float:
    """The exponential factor ``H~(d)`` multiplying ``Pr_B`` in each regime.

    The mean used is ``km/n`` from *p*, as in the enumeration formulas.
    """
    degs = as_tuple(d)
    if p.d <= 0:
        raise ParameterError("h_correction needs d > 0")
    s2 = sigma_sq(degs, p.d)
    if regime == "sparse":
        expo = Fraction(p.k - 1, 2) * (1 - s2 / p.d)
    elif regime == "dense":
        if p.mu >= 1 or p.alpha >= 1:
            raise ParameterError("dense H~ needs mu < 1 and alpha < 1")
        an = p.alpha * p.n
        expo = an / 2 - an * s2 / (2 * p.d * (1 - p.mu) * (1 - p.alpha))
    else:
        raise ParameterError(f"unknown regime {regime!r}")
    return math.exp(float(expo))


def h_composite(d, p: Params, regime: str) -> LogValue:
    """``H(d) = Pr_B(d) H~(d)``; defined for any sequence of length n and sum km."""
    degs = as_tuple(d)
    cap = p.edge_slots
    if any(x < 0 or x > cap for x in degs):
        return LogValue.zero()
    # Pr_B's normalizer depends only on the sum, so compute it from the actual sum
    ln = sum(_lgbinom(cap, x) for x in degs) - _lgbinom(p.n * cap, sum(degs))
    return LogValue.from_log(ln + math.log(h_correction(degs, p, regime)))


# ──────────────────────────────────────────────────────────────────────────────
# Moment sums
# ──────────────────────────────────────────────────────────────────────────────

def moment_sum(d, j: int, exclude: Iterable[int] = ()) -> int:
    """Elementary symmetric polynomial ``e_j`` of the degrees outside *exclude*."""
    degs = as_tuple(d)
    ex = set(exclude)
    if len(ex) > 2:
        raise ParameterError("at most two excluded vertices")
    if not 0 <= j <= len(degs):
        raise ParameterError(f"j={j} outside [0, n]")
    e = [1] + [0] * j
    for v, x in enumerate(degs):
        if v in ex:
            continue
        for i in range(j, 0, -1):
            e[i] += e[i - 1] * x
    return e[j]


# ──────────────────────────────────────────────────────────────────────────────
# Edge probabilities and ratios
# ──────────────────────────────────────────────────────────────────────────────

def edge_prob_dense_estimate(d, p, K) -> Fraction:
    """``C(n-1,k-1)^{-1} (d + (n-1)/(n-k) sum_{v in K} (d_v - d))``."""
    degs = as_tuple(d)
    k = _k_of(p)
    K = normalize_edge(K)
    n = len(degs)
    if len(K) != k:
        raise ParameterError(f"K must be a {k}-set")
    if n == k:
        raise ParameterError("needs n > k")
    mean = Fraction(sum(degs), n)
    dev = sum((degs[v] - mean for v in K), Fraction(0))
    return (mean + Fraction(n - 1, n - k) * dev) / math.comb(n - 1, k - 1)


def edge_prob_sparse_estimate(d, p, K, v: int | None = None) -> Fraction:
    """``prod_{u in K} d_u / M~_{k-1}(d; v)`` with ``v = max(K)`` unless given."""
    degs = as_tuple(d)
    k = _k_of(p)
    K = normalize_edge(K)
    if len(K) != k:
        raise ParameterError(f"K must be a {k}-set")
    if v is None:
        v = K[-1]
    if v not in K:
        raise ParameterError("designated v must lie in K")
    num = math.prod(degs[u] for u in K)
    den = moment_sum(degs, k - 1, exclude=[v])
    if den == 0:
        raise ParameterError("moment sum is zero")
    return Fraction(num, den)


def edge_prob_sparse_spread(d, p, K) -> tuple[Fraction, Fraction]:
    """Min and max of the sparse estimate over the choice of ``v`` in ``K``."""
    vals = [edge_prob_sparse_estimate(d, p, K, v) for v in normalize_edge(K)]
    return min(vals), max(vals)


def ratio_sparse_estimate(d, p, a: int, b: int) -> Fraction:
    """``(d_a/d_b)(1 + (d_a - d_b)(k-1)/M_1)``."""
    degs = as_tuple(d)
    k = _k_of(p)
    if degs[b] < 1:
        raise ParameterError("d_b must be positive")
    return Fraction(degs[a], degs[b]) * (1 + Fraction((degs[a] - degs[b]) * (k - 1), sum(degs)))


def ratio_dense_estimate(d, p, a: int, b: int) -> Fraction:
    """Binomial-ratio factor times ``1 + (d_a - d_b) q / (d_0 (1 - mu_0)(n-1-q))``."""
    degs = as_tuple(d)
    q = _k_of(p) - 1
    n = len(degs)
    if a == b:
        return Fraction(1)
    slots = math.comb(n - 1, q)
    da, db = degs[a], degs[b]
    if db < 1 or da >= slots or db >= slots:
        raise ParameterError("need d_b >= 1 and d_a, d_b < C(n-1,q)")
    d0 = Fraction(sum(degs), n)
    mu0 = d0 / slots
    if d0 == 0 or mu0 == 1 or n - 1 - q == 0:
        raise ParameterError("degenerate parameters")
    lead = Fraction(da * (slots - db), db * (slots - da))
    return lead * (1 + (da - db) * q / (d0 * (1 - mu0) * (n - 1 - q)))


# ──────────────────────────────────────────────────────────────────────────────
# P*, R*, Y*
# ──────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class StarContext:
    """Per-sequence quantities shared by the star formulas."""

    n: int
    q: int
    d: Fraction
    mu: Fraction
    alpha: Fraction
    eps: tuple[Fraction, ...]

    @classmethod
    def of(cls, d, k: int) -> "StarContext":
        degs = as_tuple(d)
        n = len(degs)
        q = k - 1
        mean = Fraction(sum(degs), n)
        if mean <= 0:
            raise ParameterError("star formulas need a positive average degree")
        mu = mean / math.comb(n - 1, q)
        alpha = Fraction(q, n - 1)
        if mu == 1 or alpha == 1:
            raise ParameterError("star formulas need mu < 1 and alpha < 1")
        eps = tuple((x - mean) / mean for x in degs)
        return cls(n, q, mean, mu, alpha, eps)


def pstar(d, p, K) -> Fraction:
    """Approximate edge probability ``P*_K(d)``."""
    k = _k_of(p)
    K = normalize_edge(K)
    if len(K) != k:
        raise ParameterError(f"K must be a {k}-set")
    c = StarContext.of(d, k)
    one_a = 1 - c.alpha
    if c.q >= 3:
        return c.mu * (1 + sum(c.eps[v] for v in K) / one_a)
    a, u, v = (c.eps[x] for x in K)
    prod = (1 + a / one_a) * (1 + u / one_a) * (1 + v / one_a)
    return c.mu * prod * (1 - c.mu * (a * u + u * v + v * a) / (1 - c.mu))


def rstar(d, p, a: int, b: int) -> Fraction:
    """Approximate ratio ``R*_ab(d)``."""
    k = _k_of(p)
    if a == b:
        return Fraction(1)
    c = StarContext.of(d, k)
    base = (1 - c.mu) * (1 - c.alpha)
    ea, eb = c.eps[a], c.eps[b]
    if c.q >= 3:
        return (base + ea) / (base + eb)
    shift = c.mu * (ea + eb)
    return (base + ea - shift) / (base + eb - shift)


def ystar(d, p, a: int, K, b: int) -> Fraction:
    """Approximate two-edge path probability ``Y*_{a,K,b}(d)``."""
    k = _k_of(p)
    K = normalize_edge(K)
    if len(K) != k - 1:
        raise ParameterError(f"K must have {k - 1} vertices")
    if a in K or b in K:
        raise ParameterError("a and b must lie outside K")
    if a == b:
        raise ParameterError("ystar needs a != b")
    c = StarContext.of(d, k)
    ea, eb = c.eps[a], c.eps[b]
    if c.q >= 3:
        eJ = sum(c.eps[v] for v in K)
        return c.mu ** 2 * (1 + (ea + eb + 2 * eJ) / (1 - c.alpha))
    if 3 * c.mu == 1:
        raise ParameterError("q=2 Y* is undefined at mu = 1/3")
    eu, ev = (c.eps[v] for v in K)
    mu = c.mu
    first = mu ** 2 * (
        1 - 2 * (1 - mu) / c.d
        + (1 + c.alpha) * (ea + eb + 2 * eu + 2 * ev)
        + ea * eb + eu ** 2 + ev ** 2
    )
    second = mu ** 2 * (2 - 3 * mu) / (1 - 3 * mu) * (
        ea * eu + ea * ev + eb * eu + eb * ev + 2 * eu * ev + eu ** 2 + ev ** 2
    )
    return first + second


# ──────────────────────────────────────────────────────────────────────────────
# Symmetric sums
# ──────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SumIdentityReport:
    lhs: tuple[Fraction, Fraction, Fraction]
    rhs: tuple[Fraction, Fraction, Fraction]
    fourth_lhs: Fraction | None
    fourth_main: Fraction | None
    fourth_residual: Fraction | None
    fourth_scale: Fraction | None

    @property
    def exact_ok(self) -> bool:
        return self.lhs == self.rhs

    @property
    def measured_constant(self) -> float | None:
        if self.fourth_residual is None or not self.fourth_scale:
            return None
        return float(abs(self.fourth_residual) / self.fourth_scale)


def symmetric_sum_identities_check(
    epsilons: Sequence, alpha, coefficients, a: int = 0, b: int = 1,
) -> SumIdentityReport:
    """Evaluate both sides of the averaging identities over subsets avoiding a and b.

    *coefficients* is either ``c`` or ``(c, c00, c01, c02, c11)``.  The first
    three identities are exact.  The fourth, over pairs with ``alpha`` fixed at
    ``2/(n-1)``, is reported as lhs, main terms and residual, together with the
    scale ``(|c01|+|c02|+|c11|)(eps alpha^2 + eps^2 alpha)`` the residual is
    bounded by.  Its square-sum term carries the factor ``c02``.
    """
    eps = [Fraction(x) for x in epsilons]
    n = len(eps)
    if sum(eps) != 0:
        raise ParameterError("epsilons must sum to zero")
    if a == b:
        raise ParameterError("a and b must differ")
    alpha = Fraction(alpha)
    q = alpha * (n - 1)
    if q.denominator != 1 or not 1 <= q <= n - 2:
        raise ParameterError("alpha must equal q/(n-1) for an integer 1 <= q <= n-2")
    q = int(q)
    if isinstance(coefficients, (tuple, list)):
        c, c00, c01, c02, c11 = (Fraction(x) for x in coefficients)
        fourth = True
    else:
        c = Fraction(coefficients)
        fourth = False
    w = Fraction(1, n - 1)
    norm = math.comb(n - 1, q)
    rest = [v for v in range(n) if v != a]
    rest2 = [v for v in range(n) if v not in (a, b)]

    from itertools import combinations

    def avg(pool, size):
        return sum((c + sum((eps[v] for v in K), Fraction(0)) for K in combinations(pool, size)),
                   Fraction(0)) / norm

    ea, eb = eps[a], eps[b]
    lhs = (avg(rest, q), avg(rest2, q), avg(rest2, q - 1))
    rhs = (
        c - alpha * ea,
        (1 - alpha) * c - (ea + eb) * alpha * (1 - alpha) / (1 - w),
        alpha * c - (ea + eb) * alpha * (alpha - w) / (1 - w),
    )
    f_lhs = f_main = f_res = f_scale = None
    if fourth:
        a2 = Fraction(2, n - 1)
        total = Fraction(0)
        for u, v in combinations(rest2, 2):
            total += c00 + c01 * (eps[u] + eps[v]) + c02 * (eps[u] ** 2 + eps[v] ** 2) + c11 * eps[u] * eps[v]
        f_lhs = total / math.comb(n - 1, 2)
        f_main = (1 - a2) * c00 - a2 * c01 * (ea + eb) + c02 * a2 * sum(x * x for x in eps)
        f_res = f_lhs - f_main
        e = max(abs(x) for x in eps)
        f_scale = (abs(c01) + abs(c02) + abs(c11)) * (e * a2 ** 2 + e ** 2 * a2)
    return SumIdentityReport(lhs, rhs, f_lhs, f_main, f_res, f_scale)


# ──────────────────────────────────────────────────────────────────────────────
# Error terms and regime predicates
# ──────────────────────────────────────────────────────────────────────────────

def _check_varphi(varphi: float) -> None:
    if not 4 / 9 < varphi < 1 / 2:
        raise ParameterError("varphi must lie in (4/9, 1/2)")


def error_eta_k(p: Params, varphi: float, multiplier: float = 1.0) -> float:
    _check_varphi(varphi)
    n, k, d = p.n, p.k, float(p.d)
    ln = math.log(n)
    if k == 3:
        val = ln ** 2 / math.sqrt(n) + d ** (2 - 4 * varphi) / n + d ** (1 - 3 * varphi)
    else:
        val = k * k * ln ** 2 / math.sqrt(n) + (float(p.mu) * n + k) * k * k * d ** (1 - 3 * varphi)
    return multiplier * val


def error_psi_k(p: Params, delta_star: int, multiplier: float = 1.0) -> float:
    n, k, m = p.n, p.k, p.m
    if m <= 0:
        raise ParameterError("psi_k needs m > 0")
    ln = math.log(n)
    if k == 3:
        val = (delta_star ** 3 + ln ** 9) / m
    else:
        val = k * k / m * (delta_star ** 2 + k * delta_star * ln ** 4 + k * k * ln ** 9)
    return multiplier * val


def error_xi_sparse(p: Params, multiplier: float = 1.0) -> float:
    n, k, d = p.n, p.k, float(p.d)
    ln = math.log(n)
    return multiplier * (k * ln ** 2 / math.sqrt(n) + math.sqrt(k ** 3 * ln ** 5 / (n * d)))


def error_xi_dense(p: Params, multiplier: float = 1.0) -> float:
    return multiplier * p.k * math.log(p.n) ** 2 / math.sqrt(p.n)


def error_zeta(q: int, mu0: float, alpha: float, eps: float, multiplier: float = 1.0) -> float:
    if q == 2:
        val = mu0 * eps ** 3 + alpha * eps ** 2 + alpha ** 2 * eps + alpha ** 3
    else:
        val = q * q * (mu0 + alpha) * eps ** 2
    return multiplier * val


def error_theta(q: int, alpha: float, eps: float, multiplier: float = 1.0) -> float:
    if q == 2:
        val = eps ** 3 + alpha * eps ** 2 + alpha ** 2 * eps + alpha ** 3
    else:
        val = q * q * eps ** 2
    return multiplier * val


def error_delta_dense(p: Params, varphi: float, multiplier: float = 1.0) -> float:
    _check_varphi(varphi)
    d, mu, alpha, k = float(p.d), float(p.mu), float(p.alpha), p.k
    if k == 3:
        val = mu * d ** (-3 * varphi) + alpha * d ** (-2 * varphi)
    else:
        val = (mu + alpha) * k * k * d ** (-2 * varphi)
    return multiplier * val


def error_delta_sparse(p: Params, delta_star: int, multiplier: float = 1.0) -> float:
    delta1 = 2 * delta_star + math.log(p.n) ** 3
    if p.k == 3:
        val = delta1 ** 3 / p.m ** 2
    else:
        val = p.k * delta1 ** 2 / p.m ** 2
    return multiplier * val


@dataclass(frozen=True)
class ErrorTerms:
    eta_k: float
    psi_k: float
    xi_sparse: float
    xi_dense: float
    zeta: float
    theta: float
    delta_dense: float
    delta_sparse: float


def error_terms(p: Params, varphi: float, delta_star: int, eps: float, multiplier: float = 1.0) -> ErrorTerms:
    """All error terms at once; ``eps`` is the relative spread used by zeta and theta."""
    q = p.k - 1
    return ErrorTerms(
        eta_k=error_eta_k(p, varphi, multiplier),
        psi_k=error_psi_k(p, delta_star, multiplier),
        xi_sparse=error_xi_sparse(p, multiplier),
        xi_dense=error_xi_dense(p, multiplier),
        zeta=error_zeta(q, float(p.mu), float(p.alpha), eps, multiplier),
        theta=error_theta(q, float(p.alpha), eps, multiplier),
        delta_dense=error_delta_dense(p, varphi, multiplier),
        delta_sparse=error_delta_sparse(p, delta_star, multiplier),
    )


def dense_regime_holds(p: Params, varphi: float, c: float) -> bool:
    """The checkable dense-regime conditions: ``k^2 log^2 n/sqrt n < c``, ``k^3 d^{1-3 phi} < c``, ``k mu < c``."""
    _check_varphi(varphi)
    n, k, d = p.n, p.k, float(p.d)
    return (
        k * k * math.log(n) ** 2 / math.sqrt(n) < c
        and d > 0 and k ** 3 * d ** (1 - 3 * varphi) < c
        and k * float(p.mu) < c
    )


def sparse_regime_holds(p: Params, delta_star: int) -> bool:
    """``psi_k < 1``."""
    return p.m > 0 and error_psi_k(p, delta_star) < 1


def in_dense_set(d, p: Params, varphi: float) -> bool:
    """Sum ``dn`` and spread at most ``d^{1-varphi}``."""
    degs = as_tuple(d)
    if sum(degs) != p.k * p.m:
        return False
    bound = float(p.d) ** (1 - varphi)
    return all(abs(float(x - p.d)) <= bound for x in degs)
