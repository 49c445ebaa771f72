import math
import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import assume, given, strategies as st

from hypercount import asymptotic as A
from hypercount.core import LogValue, ParameterError, Params, sigma_sq
from hypercount.exact import (
    count_exact, edge_probability_exact, path_probability_exact, ratio_exact,
)
from hypercount.models import log_prob_binomial_model, prob_binomial_model, prob_degseq_exact
from strategies import degree_list


# ── counting and probability estimates ───────────────────────────────────────

def test_regular_estimate_zero_degree():
    assert A.regular_count_estimate(6, 3, 0).ln == pytest.approx(1.0)


@pytest.mark.parametrize("n,k,d,exact", [(6, 3, 1, 10), (9, 3, 2, 122220)])
def test_regular_estimate_vs_exact(n, k, d, exact):
    est = A.regular_count_estimate(n, k, d)
    assert count_exact((d,) * n, k) == exact
    assert abs(math.log(exact) - est.ln) < 0.1


def test_regular_estimate_complete_graph():
    # every binomial is 1, so only the e^{(k-1)/2} factor remains
    assert count_exact((3,) * 4, 3) == 1
    assert A.regular_count_estimate(4, 3, 3).ln == pytest.approx(1.0)


def test_regular_estimate_errors():
    with pytest.raises(ParameterError):
        A.regular_count_estimate(5, 3, 1)
    with pytest.raises(ParameterError):
        A.regular_count_estimate(5, 3, 7)


def test_dense_and_sparse_at_regular_sequence():
    d, p = (2,) * 6, Params(6, 3, 4)
    base = log_prob_binomial_model(d, p).ln
    assert A.dense_prob_estimate(d, p).ln == pytest.approx(base + 1.0)
    assert A.sparse_prob_estimate(d, p).ln == pytest.approx(base + 1.0)
    exact = prob_degseq_exact(d, p)
    assert abs(math.log(exact) - A.dense_prob_estimate(d, p).ln) < 0.1


def test_sparse_estimate_unit_factor_when_variance_equals_mean():
    d, p = (2, 0, 0, 2), Params(4, 2, 2)
    assert sigma_sq(d) == p.d
    assert A.sparse_prob_estimate(d, p).ln == pytest.approx(log_prob_binomial_model(d, p).ln)
    assert A.h_correction(d, p, "sparse") == 1.0


def test_sparse_estimate_small_instance():
    d, p = (1,) * 6, Params(6, 3, 2)
    est = A.sparse_prob_estimate(d, p)
    assert math.isfinite(est.ln)
    assert abs(math.log(prob_degseq_exact(d, p)) - est.ln) < 0.5


@given(st.integers(4, 9), st.data())
def test_dense_exponent_formula(n, data):
    k = 3
    m = data.draw(st.integers(1, math.comb(n, k) - 1))
    p = Params(n, k, m)
    d = [0] * n
    for v in data.draw(st.lists(st.integers(0, n - 1), min_size=k * m, max_size=k * m)):
        d[v] += 1
    assume(max(d) <= p.edge_slots)
    expo = (k - 1) / 2 - (k - 1) * n * float(sigma_sq(d)) / (2 * float(p.d) * (n - k) * (1 - float(p.mu)))
    got = A.dense_prob_estimate(d, p).ln - log_prob_binomial_model(d, p).ln
    assert got == pytest.approx(expo, rel=1e-9, abs=1e-9)


def test_dense_estimate_errors():
    with pytest.raises(ParameterError):
        A.dense_prob_estimate((1, 1, 1), Params(3, 3, 1))
    with pytest.raises(ParameterError):
        A.sparse_prob_estimate((0,) * 4, Params(4, 2, 0))
    with pytest.raises(ParameterError):
        A.dense_prob_estimate((1, 1, 0, 1), Params(4, 3, 2))


def test_h_correction_regular_and_dense_cancellation():
    p = Params(6, 3, 4)
    assert A.h_correction((2,) * 6, p, "sparse") == pytest.approx(math.e)
    assert A.h_correction((2,) * 6, p, "dense") == pytest.approx(math.exp(float(p.alpha * p.n) / 2))
    # dense exponent vanishes when sigma^2 = d (1 - mu)(1 - alpha)
    p = Params(9, 3, 12)
    target = p.d * (1 - p.mu) * (1 - p.alpha)
    an = p.alpha * p.n
    assert an / 2 - an * target / (2 * p.d * (1 - p.mu) * (1 - p.alpha)) == 0
    with pytest.raises(ParameterError):
        A.h_correction((2,) * 6, Params(6, 3, 4), "medium")


def test_h_composite_matches_binomial_times_correction():
    d, p = (3, 2, 2, 1, 2, 2), Params(6, 3, 4)
    comp = A.h_composite(d, p, "sparse")
    assert comp.ln == pytest.approx(math.log(prob_binomial_model(d, p)) + math.log(A.h_correction(d, p, "sparse")))


# ── moment sums ──────────────────────────────────────────────────────────────

def test_moment_sum_examples():
    assert A.moment_sum((1, 2, 3), 2) == 11
    assert A.moment_sum((1, 2, 3), 0) == 1
    assert A.moment_sum((1, 2, 3), 2, exclude=[2]) == 2
    with pytest.raises(ParameterError):
        A.moment_sum((1, 2, 3), 1, exclude=[0, 1, 2])


@given(degree_list(n_min=1, n_max=8, d_max=9), st.integers(0, 8))
def test_moment_sum_matches_brute_force(d, j):
    assume(j <= len(d))
    brute = sum(math.prod(d[v] for v in K) for K in combinations(range(len(d)), j))
    assert A.moment_sum(d, j) == brute


@given(degree_list(n_min=2, n_max=9, d_max=9), st.integers(1, 6))
def test_moment_inequalities(d, j):
    assume(j <= len(d))
    top = max(d)
    m1, prev, cur = A.moment_sum(d, 1), A.moment_sum(d, j - 1), A.moment_sum(d, j)
    assert j * cur <= prev * m1
    assert prev * m1 - j * cur <= j * top * prev


@given(degree_list(n_min=3, n_max=9, d_max=9), st.integers(1, 6), st.data())
def test_moment_exclusion_bound(d, j, data):
    assume(j <= len(d) - 2)
    a, b = data.draw(st.sampled_from(list(combinations(range(len(d)), 2))))
    assert A.moment_sum(d, j) - A.moment_sum(d, j, exclude=[a, b]) <= 2 * max(d) * A.moment_sum(d, j - 1)


# ── edge probabilities and ratios ────────────────────────────────────────────

def test_edge_prob_dense_examples():
    assert A.edge_prob_dense_estimate((2,) * 6, 3, (0, 1, 2)) == Fraction(2, 10)
    # deviations cancelling inside K
    assert A.edge_prob_dense_estimate((3, 1, 2, 2, 2, 2), 3, (0, 1, 2)) == Fraction(2, 10)
    d = (3, 2, 2, 2, 2, 1)
    est = A.edge_prob_dense_estimate(d, 3, (0, 1, 2))
    assert abs(est / edge_probability_exact(d, 3, (0, 1, 2)) - 1) < 0.5
    with pytest.raises(ParameterError):
        A.edge_prob_dense_estimate((1, 1, 1), 3, (0, 1, 2))


def test_edge_prob_sparse_examples():
    d = (1,) * 6
    assert A.edge_prob_sparse_estimate(d, 3, (0, 1, 2)) == Fraction(1, 10)
    assert edge_probability_exact(d, 3, (0, 1, 2)) == Fraction(1, 10)
    assert A.edge_prob_sparse_estimate((0, 1, 1, 1, 1, 2), 3, (0, 1, 2)) == 0
    lo, hi = A.edge_prob_sparse_spread((3, 2, 2, 1, 2, 2), 3, (0, 1, 3))
    assert lo <= A.edge_prob_sparse_estimate((3, 2, 2, 1, 2, 2), 3, (0, 1, 3)) <= hi
    assert lo < hi
    with pytest.raises(ParameterError):
        A.edge_prob_sparse_estimate(d, 3, (0, 1, 2), v=4)


def test_ratio_sparse_examples():
    assert A.ratio_sparse_estimate((2, 2, 3), 3, 0, 1) == 1
    d = (3, 2, 2, 2, 2, 2, 2, 1)
    exact = ratio_exact(d, 3, 0, 7)
    assert abs(A.ratio_sparse_estimate(d, 3, 0, 7) / exact - 1) < 0.5
    with pytest.raises(ParameterError):
        A.ratio_sparse_estimate((1, 0, 2), 3, 0, 1)


@given(degree_list(n_min=2, n_max=10, d_max=20), st.integers(2, 5), st.data())
def test_ratio_sparse_swap_symmetry(d, k, data):
    a, b = data.draw(st.sampled_from(list(combinations(range(len(d)), 2))))
    assume(d[a] >= 1 and d[b] >= 1)
    m1 = sum(d)
    prod = A.ratio_sparse_estimate(d, k, a, b) * A.ratio_sparse_estimate(d, k, b, a)
    bound = 4 * Fraction((k - 1) * max(d), m1) ** 2
    assert 1 - bound <= prod <= 1 + bound


def test_ratio_dense_examples():
    d = (3, 3, 2, 2, 2, 2, 2)
    assert A.ratio_dense_estimate(d, 3, 0, 1) == 1
    assert A.ratio_dense_estimate(d, 3, 4, 4) == 1
    exact = ratio_exact(d, 3, 0, 2)
    assert abs(A.ratio_dense_estimate(d, 3, 0, 2) / exact - 1) < 0.5


@given(st.integers(5, 10), st.data())
def test_ratio_dense_product(n, data):
    q = 2
    slots = math.comb(n - 1, q)
    d = data.draw(st.lists(st.integers(1, slots - 1), min_size=n, max_size=n))
    a, b = data.draw(st.sampled_from(list(combinations(range(n), 2))))
    prod = A.ratio_dense_estimate(d, 3, a, b) * A.ratio_dense_estimate(d, 3, b, a)
    d0 = Fraction(sum(d), n)
    mu0 = d0 / slots
    x = (d[a] - d[b]) * q / (d0 * (1 - mu0) * (n - 1 - q))
    assert prod == 1 - x * x
    assert abs(prod - 1) <= x * x


# ── star formulas ────────────────────────────────────────────────────────────

@pytest.mark.parametrize("n,k,dv", [(8, 3, 6), (9, 3, 2), (9, 4, 8), (10, 5, 6)])
def test_star_at_regular_sequence(n, k, dv):
    d = (dv,) * n
    mu = Fraction(dv, math.comb(n - 1, k - 1))
    assert A.pstar(d, k, tuple(range(k))) == mu
    assert A.rstar(d, k, 0, 1) == 1
    y = A.ystar(d, k, 0, tuple(range(1, k)), k)
    if k == 3:
        assert y == mu ** 2 * (1 - 2 * (1 - mu) / dv)
    else:
        assert y == mu ** 2


def test_rstar_diagonal_and_errors():
    assert A.rstar((5, 1, 2, 3), 3, 2, 2) == 1
    with pytest.raises(ParameterError):
        A.pstar((0, 0, 0, 0), 3, (0, 1, 2))
    with pytest.raises(ParameterError):
        A.ystar((2,) * 6, 3, 0, (1, 2), 0)
    with pytest.raises(ParameterError):
        A.ystar((2,) * 6, 3, 0, (0, 2), 1)


def test_star_near_regular_errors_are_small():
    d = (7, 6, 6, 6, 6, 6, 6, 5)
    P = edge_probability_exact(d, 3, (0, 1, 2))
    assert abs(A.pstar(d, 3, (0, 1, 2)) / P - 1) < 0.05
    Y = path_probability_exact(d, 3, 0, (1, 2), 7)
    assert abs(A.ystar(d, 3, 0, (1, 2), 7) / Y - 1) < 0.1
    x = (7, 6, 6, 6, 6, 6, 6, 6)
    R = ratio_exact(x, 3, 0, 7)
    assert abs(A.rstar(x, 3, 0, 7) / R - 1) < abs(Fraction(7, 6) / R - 1)


# ── symmetric sums ───────────────────────────────────────────────────────────

def _zero_sum(rnd, n):
    eps = [Fraction(rnd.randint(-9, 9), rnd.randint(1, 9)) for _ in range(n - 1)]
    return eps + [-sum(eps)]


def test_sum_identities_all_zero():
    rep = A.symmetric_sum_identities_check([0] * 7, Fraction(3, 6), 5)
    assert rep.exact_ok and rep.lhs[0] == 5


@given(st.integers(5, 9), st.integers(0, 2**32), st.data())
def test_sum_identities_exact(n, seed, data):
    rnd = random.Random(seed)
    eps = _zero_sum(rnd, n)
    q = data.draw(st.integers(1, n - 2))
    c = Fraction(rnd.randint(-5, 5), 3)
    rep = A.symmetric_sum_identities_check(eps, Fraction(q, n - 1), c)
    assert rep.lhs == rep.rhs


def test_sum_identity_n7_q3():
    rnd = random.Random(7)
    rep = A.symmetric_sum_identities_check(_zero_sum(rnd, 7), Fraction(3, 6), Fraction(2, 3))
    assert rep.exact_ok


def test_fourth_identity_residual_is_bounded():
    rnd = random.Random(11)
    worst = 0.0
    for n in range(6, 12):
        for _ in range(5):
            eps = [Fraction(rnd.randint(-3, 3), 10) for _ in range(n - 1)]
            eps.append(-sum(eps))
            coeffs = tuple(Fraction(rnd.randint(-4, 4), 2) for _ in range(5))
            rep = A.symmetric_sum_identities_check(eps, Fraction(2, n - 1), coeffs)
            if rep.measured_constant is not None:
                worst = max(worst, rep.measured_constant)
    assert worst < 10


def test_sum_identity_errors():
    with pytest.raises(ParameterError):
        A.symmetric_sum_identities_check([1, 0, 0], Fraction(1, 2), 1)
    with pytest.raises(ParameterError):
        A.symmetric_sum_identities_check([0] * 5, Fraction(1, 3), 1)


# ── error terms and regimes ──────────────────────────────────────────────────

def test_eta_k3_branch():
    p = Params(100, 3, 200)
    phi = 0.45
    n, d = 100, 6.0
    expected = math.log(n) ** 2 / math.sqrt(n) + d ** (2 - 4 * phi) / n + d ** (1 - 3 * phi)
    assert A.error_eta_k(p, phi) == pytest.approx(expected)
    assert A.error_eta_k(p, phi, multiplier=2) == pytest.approx(2 * expected)
    with pytest.raises(ParameterError):
        A.error_eta_k(p, 0.3)


def test_psi_k4_decreases_in_m():
    vals = [A.error_psi_k(Params(60, 4, m), 1) for m in (10, 100, 1000, 10000)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_error_terms_spot_values():
    p = Params(64, 3, 128)
    ln = math.log(64)
    assert A.error_xi_dense(p) == pytest.approx(3 * ln * ln / 8)
    assert A.error_xi_sparse(p) == pytest.approx(3 * ln * ln / 8 + math.sqrt(27 * ln ** 5 / (64 * 6)))
    assert A.error_psi_k(p, 5) == pytest.approx((125 + ln ** 9) / 128)
    assert A.error_delta_sparse(p, 5) == pytest.approx((10 + ln ** 3) ** 3 / 128 ** 2)
    assert A.error_zeta(2, 0.1, 0.2, 0.3) == pytest.approx(0.1 * 0.027 + 0.2 * 0.09 + 0.04 * 0.3 + 0.008)
    assert A.error_theta(3, 0.2, 0.3) == pytest.approx(9 * 0.09)
    et = A.error_terms(p, 0.45, 5, 0.3)
    assert all(v >= 0 for v in vars(et).values())


def test_regime_predicates():
    assert not A.dense_regime_holds(Params(100, 3, 200), 0.45, 1.0)
    assert A.dense_regime_holds(Params(10**6, 3, 10**9), 0.45, 50.0)
    assert A.sparse_regime_holds(Params(10**4, 3, 10**9), 2)
    assert not A.sparse_regime_holds(Params(30, 3, 40), 4)
    p = Params(9, 3, 12)
    assert A.in_dense_set((4,) * 9, p, 0.45)
    assert not A.in_dense_set((12,) + (3,) * 8, p, 0.45)
