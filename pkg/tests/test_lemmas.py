import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wtl import transfer as tr
from wtl import verify as vf
from wtl.errors import DomainError

# sums and incomplete gamma values below were evaluated with mpmath (30 digits)
TAIL_A1_B1_N9 = 2.33415079373915411535e-4
TAIL_A1_B2_N10 = 1.4856054171850697873
BOUND_A1_B1_N9 = 5.55344118390057972739e-4
BOUND_A1_B2_N10 = 2.5397531773922998602
GAMMA_HALF_4 = 8.29106938067266736321e-3
GAMMA_3_4 = 0.476206611107088687637


def test_tail_sum_direct_values():
    assert tr.tail_sum_direct(1, 1, 9) == pytest.approx(TAIL_A1_B1_N9, rel=1e-13)
    assert tr.tail_sum_direct(1, 2, 10) == pytest.approx(TAIL_A1_B2_N10, rel=1e-13)


def test_tail_sum_direct_large_n():
    n = 200
    value = tr.tail_sum_direct(1, 1, n)
    first = math.sqrt(n + 1) * math.exp(-(n + 1))
    assert value < first / (1 - math.exp(-1)) * 2


def test_tail_sum_direct_underflow():
    assert tr.tail_sum_direct(1, 1, 2000) == 0.0


def test_tail_sum_bound_values():
    assert tr.tail_sum_bound(1, 1, 9) == pytest.approx(BOUND_A1_B1_N9, rel=1e-13)
    assert tr.tail_sum_bound(1, 2, 10) == pytest.approx(BOUND_A1_B2_N10, rel=1e-13)
    assert tr.tail_sum_bound(1, 1, 9) >= tr.tail_sum_direct(1, 1, 9)
    assert tr.tail_sum_bound(1, 2, 10) >= tr.tail_sum_direct(1, 2, 10)


def test_tail_sum_bound_thresholds():
    assert tr.integral_bound_threshold(1, 2) == 9
    tr.tail_sum_bound(1, 2, 9)
    with pytest.raises(DomainError, match="max\\(3B/2,1\\)"):
        tr.tail_sum_bound(1, 2, 8)
    # B = 3: series lemma needs n >= 1.5^3 = 3.375 and the integral lemma n >= 4.5^3
    with pytest.raises(DomainError, match="\\(B/2\\)\\^B"):
        tr.tail_sum_bound(1, 3, 3)


def test_tail_sum_matches_integral_form():
    """The integral equals A^(3/2) B Gamma(3B/2, (n/A)^(1/B)); check against quadrature."""
    from scipy import integrate

    A, B, n = 2.0, 1.3, 40
    integral, _ = integrate.quad(lambda t: math.sqrt(t) * math.exp(-((t / A) ** (1 / B))), n, math.inf, epsrel=1e-12)
    via_gamma = A ** 1.5 * B * vf.upper_gamma_oracle(1.5 * B, (n / A) ** (1 / B))
    assert via_gamma == pytest.approx(integral, rel=1e-8)
    assert tr.tail_sum_direct(A, B, n) <= integral <= tr.tail_sum_bound(A, B, n)


def test_incomplete_gamma_upper_examples():
    assert tr.incomplete_gamma_upper(1, 2) == pytest.approx(math.exp(-2), rel=1e-15)
    assert vf.upper_gamma_oracle(1, 2) == pytest.approx(math.exp(-2), rel=1e-15)
    assert tr.incomplete_gamma_upper(3, 4) == pytest.approx(48 * math.exp(-4), rel=1e-15)
    assert vf.upper_gamma_oracle(3, 4) == pytest.approx(GAMMA_3_4, rel=1e-14)
    assert tr.incomplete_gamma_upper(0.5, 4) == pytest.approx(0.5 * math.exp(-4), rel=1e-15)
    assert vf.upper_gamma_oracle(0.5, 4) == pytest.approx(GAMMA_HALF_4, rel=1e-13)
    assert tr.incomplete_gamma_upper(0.5, 4) >= vf.upper_gamma_oracle(0.5, 4)


def test_incomplete_gamma_domain():
    with pytest.raises(DomainError):
        tr.incomplete_gamma_upper(3, 3)
    with pytest.raises(DomainError):
        tr.incomplete_gamma_upper(0.5, 1.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 15), st.floats(1e-6, 40))
def test_gamma_oracle_routes_agree(a, excess):
    """Closed forms / quadrature agree with the library implementation."""
    x = max(a, 1) + excess
    assert vf.upper_gamma_oracle(a, x) == pytest.approx(vf.upper_gamma_scipy(a, x), rel=1e-8, abs=1e-300)


@pytest.mark.parametrize("a", [1, 2, 5, 0.5, 1.5, 4.5, 0.3, 2.7])
def test_gamma_closed_form_vs_quadrature(a):
    from scipy import integrate

    x = max(a, 1) * 1.7
    q, _ = integrate.quad(lambda v: v ** (a - 1) * math.exp(-v), x, math.inf, epsrel=1e-12)
    assert vf.upper_gamma_oracle(a, x) == pytest.approx(q, rel=1e-9)


def test_power_exp_examples():
    lhs, rhs = tr.power_exp_bound(1, 1, 1, 1, 2)
    assert lhs == pytest.approx(2 * math.exp(-2)) and rhs == pytest.approx(1.0)
    lhs, rhs = tr.power_exp_bound(1, 1, 1, 1, 1)
    assert lhs == pytest.approx(math.exp(-1)) and rhs == pytest.approx(1.0)


def test_power_exp_strict_at_substitution_point():
    u, delta, A, B = 0.7, 0.8, 2.0, 1.5
    n = A * delta ** (-B)  # x = delta (n/A)^(1/B) = 1
    lhs, rhs = tr.power_exp_bound(u, delta, A, B, n)
    # ln x <= x is strict at x = 1, gap factor exp(u B (x - ln x)) = exp(u B)
    assert rhs / lhs == pytest.approx(math.exp(u * B), rel=1e-12)
    assert lhs < rhs


def test_power_exp_domain():
    with pytest.raises(DomainError):
        tr.power_exp_bound(0, 1, 1, 1, 1)


@given(
    st.floats(0.01, 5),
    st.floats(0.01, 10),
    st.floats(0.01, 1e3),
    st.floats(0.05, 8),
    st.floats(1e-3, 1e6),
)
def test_power_exp_property(u, delta, A, B, n):
    lhs, rhs = tr.power_exp_bound(u, delta, A, B, n, log=True)
    assert lhs <= rhs + 1e-9 * max(1.0, abs(rhs))


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 4), st.floats(0.25, 3), st.integers(0, 20))
def test_tail_lemma_property(A, B, offset):
    n = math.ceil(max(tr.decreasing_summand_threshold(A, B), tr.integral_bound_threshold(A, B))) + offset
    assert tr.holds(tr.tail_sum_direct(A, B, n), tr.tail_sum_bound(A, B, n))


def test_suites_pass_and_detect_faults():
    ok = vf.run_all(seed=3, samples=200)
    assert all(r.passed for r in ok)
    bad = vf.run_all(seed=3, samples=200, fault_scale=0.9)
    assert not all(r.passed for r in bad)
