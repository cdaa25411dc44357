import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wtl import transfer as tr
from wtl.errors import DivergenceError, DomainError, UnsupportedError
from wtl.model_spaces import Geometric, WidthSequence, univariate_eigenvalues, widths_from_eigenvalues

P11 = tr.ComplexityProfile(1, 1)
K1 = tr.BoundConstants()

# 6 ln 36 and 12 ln 72 evaluated with mpmath at 30 digits
SIX_LN36 = 21.5011136307366600097
TWELVE_LN72 = 51.3199934281926637325


def test_profile_validation():
    with pytest.raises(DomainError):
        tr.ComplexityProfile(0.5, 1)
    with pytest.raises(DomainError):
        tr.ComplexityProfile(1, 0)


@pytest.mark.parametrize("kw", [{"b": 0}, {"b": 1.5}, {"r": 2}, {"r": 0}, {"D": 0}])
def test_constants_validation(kw):
    with pytest.raises(DomainError):
        tr.BoundConstants(**kw)


@pytest.mark.parametrize(
    "A,B,n,expected",
    [(1, 1, 1, 1.0), (1, 1, 3, math.e * math.exp(-3)), (2, 2, 8, math.e * math.exp(-2))],
)
def test_gelfand_bound(A, B, n, expected):
    assert tr.gelfand_bound_from_profile(tr.ComplexityProfile(A, B), n) == pytest.approx(expected, rel=1e-15)


def test_gelfand_bound_values():
    assert tr.gelfand_bound_from_profile(tr.ComplexityProfile(1, 1), 3) == pytest.approx(0.135335, abs=1e-6)
    assert tr.gelfand_bound_from_profile(tr.ComplexityProfile(2, 2), 8) == pytest.approx(0.367879, abs=1e-6)


def test_gelfand_bound_domain():
    with pytest.raises(DomainError):
        tr.gelfand_bound_from_profile(tr.ComplexityProfile(2, 1), 1.5)


def test_complexity_bound_from_gelfand():
    assert tr.complexity_bound_from_gelfand(P11, math.exp(-1)) == 3
    assert tr.complexity_bound_from_gelfand(P11, 1.0) == 2
    assert tr.complexity_bound_from_gelfand(tr.ComplexityProfile(2, 2), math.exp(-1)) == 9
    with pytest.raises(DomainError):
        tr.complexity_bound_from_gelfand(P11, 0.0)


@given(st.floats(1, 50), st.floats(0.1, 4), st.floats(0.0, 30))
def test_gelfand_profile_round_trip(A, B, L):
    """The Gelfand bound at n = complexity_bound - 1 is already <= eps (the '+1' equivalence)."""
    p = tr.ComplexityProfile(A, B)
    n = tr.complexity_bound_from_gelfand(p, log_inv_eps=L) - 1
    assert tr.holds(tr.gelfand_bound_from_profile(p, n), math.exp(-L))


def test_pietsch():
    assert tr.pietsch_bound(0.5, 4) == 1.5
    assert tr.pietsch_bound(0.0, 100) == 0.0
    assert tr.pietsch_bound(1.0, 2) == pytest.approx(1 + math.sqrt(2), rel=1e-15)
    with pytest.raises(DomainError):
        tr.pietsch_bound(-1.0, 1)


def test_dku_bound_callable_and_stored():
    a = lambda k: 2.0 ** -np.asarray(k, dtype=float)
    assert tr.dku_bound(a, 4, K1) == (4, pytest.approx(0.03125, rel=1e-14))
    idx, val = tr.dku_bound(a, 4, tr.BoundConstants(b=3))
    assert idx == 12 and val == pytest.approx(0.03125, rel=1e-14)
    stored = 2.0 ** -np.arange(120)
    assert tr.dku_bound(stored, 4, K1)[1] == pytest.approx(0.03125, rel=1e-14)


def test_dku_bound_scalar_only_callable():
    idx, val = tr.dku_bound(lambda k: 2.0 ** -k if isinstance(k, int) else None, 4, K1)
    assert val == pytest.approx(0.03125, rel=1e-14)


def test_dku_zero_sequence():
    assert tr.dku_bound(lambda k: 0.0 * k, 5, tr.BoundConstants(b=2)) == (10, 0.0)
    assert tr.dku_bound(np.zeros(10), 5, K1) == (5, 0.0)


def test_dku_r_half():
    # r = 1/2: ((1/n) sum 4^-k ^ 1/2)^2 = ((1/n) sum 2^-k)^2
    idx, val = tr.dku_bound(lambda k: 4.0 ** -np.asarray(k, float), 4, tr.BoundConstants(r=0.5))
    assert val == pytest.approx((1 / 32) ** 2, rel=1e-13)


def test_dku_unconverged_stored_tail():
    with pytest.raises(DivergenceError):
        tr.dku_bound(np.full(50, 0.5), 4, K1)
    with pytest.raises(DomainError):
        tr.dku_bound(np.zeros(10), 1, K1)


def test_dku_divergent_callable_hits_cap(monkeypatch):
    monkeypatch.setattr(tr, "TAIL_TERM_CAP", 10_000)
    with pytest.raises(DivergenceError):
        tr.dku_bound(lambda k: 1.0 / np.asarray(k, float), 2, K1)


def test_dku_monotone_in_n():
    widths = widths_from_eigenvalues(univariate_eigenvalues(Geometric(0.3), 200))
    vals = [tr.dku_bound(widths, n, K1)[1] for n in range(2, 60)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_main_constant():
    assert tr.theorem_main1_constant(P11, K1) == pytest.approx(SIX_LN36, rel=1e-12)
    assert tr.theorem_main1_constant(P11, tr.BoundConstants(b=2)) == pytest.approx(2 * SIX_LN36, rel=1e-12)
    assert tr.theorem_main1_constant(tr.ComplexityProfile(2, 1), K1) == pytest.approx(TWELVE_LN72, rel=1e-12)
    with pytest.raises(UnsupportedError):
        tr.theorem_main1_constant(P11, tr.BoundConstants(r=0.5))


def test_n_std_bound():
    assert tr.n_std_bound(P11, K1, math.exp(-1)) == 44
    assert tr.n_std_bound(P11, K1, 1 - 1e-12) == 22
    assert tr.n_std_bound(P11, K1, math.exp(-3)) == 87
    with pytest.raises(DomainError):
        tr.n_std_bound(P11, K1, 1.0)


def test_log_versions_agree():
    p = tr.ComplexityProfile(3.7, 2.2)
    for L in (0.5, 3.0, 17.0):
        assert tr.log_n_std_bound(p, K1, log_inv_eps=L) == pytest.approx(
            math.log(tr.n_std_bound_real(p, K1, log_inv_eps=L)), rel=1e-13
        )


def test_proof_constants():
    p = tr.ComplexityProfile(1, 1)
    assert tr.proof_threshold_n0(p) == 2.5
    assert tr.proof_B0(p) == 1.0
    assert tr.proof_R(p) == pytest.approx(math.log(36))
    p = tr.ComplexityProfile(10, 4)
    assert tr.proof_threshold_n0(p) == 10 * 6.0 ** 4 + 1
    assert tr.proof_B0(p) == 2.0


@given(st.floats(1, 1e6), st.floats(0.01, 20))
def test_R_bound(A, B):
    p = tr.ComplexityProfile(A, B)
    assert tr.holds(tr.proof_R(p), math.log(36 * A) * tr.proof_B0(p) ** 2)


@given(st.floats(1, 1e4), st.floats(0.05, 6), st.floats(0.01, 50))
def test_dominance(A, B, L):
    p = tr.ComplexityProfile(A, B)
    assert tr.n_std_bound(p, K1, log_inv_eps=L) >= tr.complexity_bound_from_gelfand(p, log_inv_eps=L) - 1


def test_transfer_report():
    rep = tr.transfer_report(P11, K1, [1.0, 2.0, 3.0])
    assert rep.C == pytest.approx(SIX_LN36, rel=1e-12)
    assert rep.n0 == 2.5 and rep.B0 == 1.0
    assert [r["n_std_bound"] for r in rep.bound_table] == [44, 65, 87]
    assert [r["n_all_bound"] for r in rep.bound_table] == [3, 4, 5]
    assert rep.n_std_lin(log_inv_eps=1.0) == pytest.approx(2 * SIX_LN36)
    doc = rep.to_document()
    assert set(doc) >= {"profile", "constants", "n0", "B0", "R", "C", "bound_table"}


# -- polynomial / quasi-polynomial ---------------------------------------


def test_corollary_examples():
    v = tr.corollary_main_bound(1, 1, 0, K1, 1, math.exp(-1))
    assert v == tr.n_std_bound(tr.ComplexityProfile(2, 1), K1, math.exp(-1)) == math.ceil(TWELVE_LN72 * 2) == 103
    assert tr.corollary_main_bound(1, 1, 1, K1, 1, math.exp(-1)) == 103


@given(st.floats(0.1, 10), st.floats(0.1, 3), st.floats(0.01, 3), st.integers(1, 100), st.floats(0.1, 30))
def test_corollary_monotone_in_d(c, p, q, d, L):
    a = tr.corollary_main_bound(c, p, q, K1, d, log_inv_eps=L)
    b = tr.corollary_main_bound(c, p, q, K1, d + 1, log_inv_eps=L)
    assert b >= a


def test_corollary_display_constant_dominates():
    c, p, q = 2.0, 1.5, 1.0
    Cp = tr.corollary_display_constant(c, p, q, K1)
    for d in range(1, 33):
        for L in range(0, 21):
            if L == 0:
                exact = math.ceil(tr.theorem_main1_constant(tr.corollary_profile(c, p, q, d), K1))
            else:
                exact = math.ceil(tr.corollary_main_bound_real(c, p, q, K1, d, log_inv_eps=float(L)))
            shape = d ** q * (1 + math.log(d)) ** p * (1 + L) ** p
            assert tr.holds(exact, Cp * shape)


def test_qpt_threshold_and_domain():
    assert tr.qpt_threshold(1, 1) == pytest.approx((math.e + 1) / math.e)
    assert tr.qpt_threshold(1, 1) == pytest.approx(1.36788, abs=1e-5)
    with pytest.raises(DomainError, match="1.36788"):
        tr.qpt_transfer_bound(1, 1, K1, 1, math.exp(-1))


def test_qpt_reduction_example():
    expected = tr.n_std_bound(tr.ComplexityProfile(2 * math.e, 1 + math.log(2)), K1, math.exp(-1))
    assert tr.qpt_transfer_bound(1, 1, K1, 2, math.exp(-1)) == expected


@given(st.floats(0.05, 5), st.floats(0.1, 3))
def test_qpt_profile_has_A_B_at_least_one(c, t):
    d = math.floor(tr.qpt_threshold(c, t)) + 1
    prof = tr.qpt_profile(c, t, d)
    assert prof.A >= 1 and prof.B >= 1


def test_qpt_display_form_dominates_after_calibration():
    c, t = 1.0, 1.0
    C = tr.qpt_display_constant(c, t, K1)
    for d in range(2, 33):
        for L in range(1, 21):
            exact = tr.qpt_transfer_bound(c, t, K1, d, log_inv_eps=float(L))
            assert tr.holds(math.log(exact), tr.log_qpt_display_bound(c, t, d, C, log_inv_eps=float(L)))


def test_weak_transfer_bound():
    assert tr.weak_transfer_bound(1 / 16, 1, 1, 1, K1, 1, math.exp(-1)) == 3
    assert tr.weak_transfer_bound_real(1 / 16, 1, 1, 1, K1, 1, math.exp(-1)) == pytest.approx(math.exp(0.75))
    assert tr.weak_transfer_bound_real(1e-12, 1, 1, 1, tr.BoundConstants(D=5), 3, 0.5) == pytest.approx(5, rel=1e-10)
    r1 = tr.weak_transfer_bound_real(0.01, 3, 0.5, 0.5, tr.BoundConstants(D=1.5), 4, 0.01)
    r2 = tr.weak_transfer_bound_real(0.01, 3, 0.5, 0.5, tr.BoundConstants(D=3.0), 4, 0.01)
    assert r2 == pytest.approx(2 * r1, rel=1e-15)
    with pytest.raises(DomainError):
        tr.weak_transfer_bound(0.07, 1, 1, 1, K1, 1, 0.5)
    assert tr.weak_transfer_threshold(0.05, 10, 1.0, 3) == pytest.approx(max(math.exp(0.5), math.exp(0.3)))
