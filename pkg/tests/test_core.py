import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hypercount.core import (
    DegreeSequence, EdgeSet, LogValue, ParameterError, Params, degree_stats,
    fraction_str, lambda_k_distance, log_binom, minus, normalize_edge, parse_fraction,
    plus, sigma_sq,
)
from strategies import degree_list


def test_params_derived_quantities():
    p = Params(6, 3, 4)
    assert p.q == 2
    assert p.d == 2
    assert p.mu == Fraction(4, 20)
    assert p.alpha == Fraction(2, 5)
    assert p.edge_slots == 10 and p.n_ksets == 20


def test_params_json_uses_rational_strings():
    js = Params(6, 3, 4).to_json()
    assert js["mu"] == "1/5" and js["d"] == "2/1"


@pytest.mark.parametrize("n,k,m", [(3, 4, 0), (5, 1, 1), (4, 2, 7), (4, 2, -1)])
def test_params_rejects_bad_input(n, k, m):
    with pytest.raises(ParameterError):
        Params(n, k, m)


def test_for_sequence_needs_divisible_sum():
    assert Params.for_sequence((2, 2, 2, 3), 3) == Params(4, 3, 3)
    with pytest.raises(ParameterError):
        Params.for_sequence((1, 1), 3)


def test_degree_sequence_validation():
    with pytest.raises(ParameterError):
        DegreeSequence([])
    with pytest.raises(ParameterError):
        DegreeSequence([1, -1])
    d = DegreeSequence([3, 1, 2])
    assert d.n == 3 and d.total == 6 and d.mean == 2


def test_edge_set_degrees_and_validation():
    g = EdgeSet(5, 3, [(0, 1, 2), (2, 3, 4)])
    assert g.degrees().degrees == (1, 1, 2, 1, 1)
    with pytest.raises(ParameterError):
        EdgeSet(5, 3, [(0, 1, 2), (2, 1, 0)])
    with pytest.raises(ParameterError):
        EdgeSet(5, 3, [(0, 1, 1)])
    with pytest.raises(ParameterError):
        EdgeSet(3, 3, [(0, 1, 3)])


def test_sigma_and_stats():
    assert sigma_sq((1, 2, 3)) == Fraction(2, 3)
    assert sigma_sq((2, 2, 2)) == 0
    st_ = degree_stats((4, 2, 3))
    assert (st_.sum, st_.max, st_.min, st_.spread) == (9, 4, 2, 1)


def test_lambda_distance():
    assert lambda_k_distance((1, 0, 0), (0, 1, 0), 3) == 1
    assert lambda_k_distance((3, 0, 0, 0), (0, 1, 1, 1), 2) == 3
    with pytest.raises(ParameterError):
        lambda_k_distance((1,), (1, 2), 2)


def test_normalize_and_fraction_io():
    assert normalize_edge([3, 1, 2]) == (1, 2, 3)
    with pytest.raises(ParameterError):
        normalize_edge([1, 1])
    assert fraction_str(Fraction(6, 4)) == "3/2"
    assert fraction_str(5) == "5/1"
    assert parse_fraction("3/2") == Fraction(3, 2)


@given(degree_list(), st.lists(st.integers(0, 7), max_size=4))
def test_plus_inverts_minus(d, vs):
    vs = [v % len(d) for v in vs]
    assert plus(minus(d, vs), vs) == d
    assert sum(minus(d, vs)) == sum(d) - len(vs)


@given(degree_list(n_min=2))
def test_sigma_nonnegative_and_shift_invariant(d):
    s = sigma_sq(d)
    assert s >= 0
    assert sigma_sq(tuple(x + 5 for x in d)) == s


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_logvalue_multiplication(a, b):
    prod = LogValue.from_value(a) * LogValue.from_value(b)
    assert prod.ln == pytest.approx(math.log(a * b), rel=1e-12, abs=1e-12)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_logvalue_addition_matches_float(a, b):
    s = LogValue.from_value(a) + LogValue.from_value(b)
    assert s.to_float() == pytest.approx(a + b, rel=1e-9, abs=1e-6)


def test_logvalue_huge_fraction_without_overflow():
    x = Fraction(math.comb(3000, 1500), math.comb(3000, 1400))
    lv = LogValue.from_value(x)
    assert lv.ln == pytest.approx(log_binom(3000, 1500) - log_binom(3000, 1400), rel=1e-10)


def test_logvalue_zero_and_errors():
    z = LogValue.zero()
    assert z.to_float() == 0.0
    assert z.to_json() == {"sign": 0, "ln": None}
    assert (z * LogValue.from_value(3)).sign == 0
    with pytest.raises(ZeroDivisionError):
        LogValue.from_value(1) / z
    with pytest.raises(ParameterError):
        LogValue(0, 1.0)
    assert (LogValue.from_value(2) - LogValue.from_value(2)).sign == 0


def test_log_binom_support():
    assert log_binom(5, 7) == -math.inf
    assert log_binom(10, 3) == pytest.approx(math.log(120))
