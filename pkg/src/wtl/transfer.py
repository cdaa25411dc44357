"""From linear-information complexity to standard-information complexity.

The chain implemented here:

* a poly-log complexity profile ``n_all(eps) <= A (1 + ln 1/eps)^B`` is
  equivalent (up to ``+1``) to ``c_n <= e exp(-(n/A)^(1/B))``;
* Pietsch: ``a_n <= (1 + sqrt n) c_n``;
* the DKU inequality ``e_{bn} <= ((1/n) sum_{k>=n} a_k^r)^(1/r)``;
* the resulting explicit bound ``n_std_lin(eps) <= C (1 + ln 1/eps)^B`` with
  ``C = 3 b A (ln(36 A)(1 + B^3))^B`` and its specialisations to polynomial
  and quasi-polynomial families, plus the weak-tractability bound.

Universal constants (``b``, ``D``, ``r``) are never hidden inside functions;
they travel in :class:`BoundConstants`.

Functions taking an accuracy ``eps`` also accept ``log_inv_eps`` (that is
``ln(1/eps)``) so that very small accuracies such as ``e^-1024`` stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DivergenceError, DomainError, UnsupportedError

# relative tolerance used by every "does the inequality hold" check
REL_TOL = 1e-9
TAIL_REL_CUTOFF = 1e-17
TAIL_TERM_CAP = 10 ** 8
_CHUNK = 1 << 16


@dataclass(frozen=True)
class ComplexityProfile:
    """``n_all(eps) <= A (1 + ln 1/eps)^B``."""

    A: float
    B: float

    def __post_init__(self):
        if not self.A >= 1:
            raise DomainError(f"profile needs A >= 1, got A={self.A}")
        if not self.B > 0:
            raise DomainError(f"profile needs B > 0, got B={self.B}")


@dataclass(frozen=True)
class BoundConstants:
    """Constants the theory only asserts to exist.

    ``b`` is the index multiplier of the DKU inequality (for ``r``), ``D`` the
    absolute constant of the weak-tractability bound. The defaults are
    idealized placeholders, not known values.
    """

    b: int = 1
    r: float = 1.0
    D: float = 1.0

    def __post_init__(self):
        if int(self.b) != self.b or self.b < 1:
            raise DomainError(f"b must be a positive integer, got {self.b}")
        object.__setattr__(self, "b", int(self.b))
        if not 0 < self.r < 2:
            raise DomainError(f"r must lie in (0, 2), got {self.r}")
        if not self.D > 0:
            raise DomainError(f"D must be positive, got {self.D}")


def holds(lhs: float, rhs: float, rel_tol: float = REL_TOL) -> bool:
    """``lhs <= rhs`` up to relative rounding slack."""
    return lhs <= rhs * (1 + rel_tol) if rhs >= 0 else lhs <= rhs * (1 - rel_tol)


def log_inv(eps: float | None = None, log_inv_eps: float | None = None, *, closed: bool = False) -> float:
    """``ln(1/eps)`` after checking ``eps`` in (0, 1) (or (0, 1] if ``closed``)."""
    if log_inv_eps is not None:
        L = float(log_inv_eps)
        if L < 0 or (L == 0 and not closed):
            raise DomainError(f"ln(1/eps) must be {'>=' if closed else '>'} 0, got {L}")
        return L
    if eps is None:
        raise DomainError("an accuracy eps (or log_inv_eps) is required")
    hi_ok = eps <= 1.0 if closed else eps < 1.0
    if not (eps > 0.0 and hi_ok):
        raise DomainError(f"eps must lie in (0, {'1]' if closed else '1)'}, got {eps}")
    return -math.log(eps)


# -- linear information ------------------------------------------------------


def gelfand_bound_from_profile(p: ComplexityProfile, n: float) -> float:
    """``e exp(-(n/A)^(1/B))``, valid for ``n >= A``."""
    if n < p.A:
        raise DomainError(f"Gelfand bound is only claimed for n >= A = {p.A}, got n={n}")
    return math.e * math.exp(-((n / p.A) ** (1.0 / p.B)))


def complexity_bound_from_gelfand(p: ComplexityProfile, eps: float | None = None, *, log_inv_eps=None) -> int:
    """``ceil(A (1 + ln 1/eps)^B + 1)``, valid for ``eps`` in (0, 1]."""
    L = log_inv(eps, log_inv_eps, closed=True)
    return math.ceil(p.A * (1.0 + L) ** p.B + 1.0)


def pietsch_bound(c_value: float, n: int) -> float:
    """``(1 + sqrt n) c_n``: an upper bound on the linear width ``a_n``."""
    if c_value < 0:
        raise DomainError(f"width must be nonnegative, got {c_value}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return (1.0 + math.sqrt(n)) * c_value


# -- tail sums ---------------------------------------------------------------


def _vectorised(f: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def g(k: np.ndarray) -> np.ndarray:
        try:
            out = np.asarray(f(k), dtype=float)
            if out.shape == k.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([float(f(int(i))) for i in k])

    return g


def truncated_tail_sum(term: Callable[[np.ndarray], np.ndarray], start: int) -> float:
    """``sum_{k >= start} term(k)`` stopping once a term is below 1e-17 x the partial sum."""
    total = 0.0
    k0 = start
    while k0 - start < TAIL_TERM_CAP:
        size = min(_CHUNK, start + TAIL_TERM_CAP - k0)
        ks = np.arange(k0, k0 + size, dtype=float)
        terms = term(ks)
        if np.any(~np.isfinite(terms)):
            raise DivergenceError(f"non-finite term in tail sum starting at k={start}")
        partial = total + np.cumsum(terms)
        prev = np.concatenate(([total], partial[:-1]))
        stop = np.nonzero(terms <= TAIL_REL_CUTOFF * prev)[0]
        if stop.size:
            j = stop[0]
            return float(prev[j])
        total = float(partial[-1])
        k0 += size
    raise DivergenceError(f"tail sum from k={start} did not settle within {TAIL_TERM_CAP} terms")


def dku_bound(a_tail, n: int, consts: BoundConstants) -> tuple[int, float]:
    """``(b n, ((1/n) sum_{k>=n} a_k^r)^(1/r))``: an upper bound on ``e_{bn}``.

    ``a_tail`` is either a callable ``k -> a_k`` or a stored sequence indexed
    from 0 (e.g. a :class:`~wtl.model_spaces.WidthSequence`). A stored
    sequence must already have decayed to the truncation cutoff, otherwise the
    tail is considered unresolved.
    """
    if n < 2:
        raise DomainError(f"DKU bound needs n >= 2, got {n}")
    r = consts.r
    if callable(a_tail):
        f = _vectorised(a_tail)
        tail = truncated_tail_sum(lambda k: f(k) ** r, n)
    else:
        vals = np.asarray(getattr(a_tail, "values", a_tail), dtype=float)
        if vals.size <= n:
            raise DivergenceError(f"stored sequence has {vals.size} entries, tail from {n} is empty")
        powered = vals[n:] ** r
        tail = float(np.sum(powered))
        if powered[-1] > TAIL_REL_CUTOFF * tail:
            raise DivergenceError(
                f"stored tail has not converged: last term {powered[-1]:.3e} vs sum {tail:.3e}"
            )
    return consts.b * n, (tail / n) ** (1.0 / r)


# -- the main explicit bound -------------------------------------------------


def proof_threshold_n0(p: ComplexityProfile) -> float:
    """``A max(3B/2, 1)^B + 1``."""
    return p.A * max(1.5 * p.B, 1.0) ** p.B + 1.0


def proof_B0(p: ComplexityProfile) -> float:
    return max(p.B / 2.0, 1.0)


def proof_R(p: ComplexityProfile) -> float:
    """``ln 36 + (ln A)/2 + (B0 + 1) ln B0``; never exceeds ``ln(36 A) B0^2``."""
    B0 = proof_B0(p)
    return math.log(36.0) + math.log(p.A) / 2.0 + (B0 + 1.0) * math.log(B0)


def _require_r1(consts: BoundConstants) -> None:
    if consts.r != 1:
        raise UnsupportedError(f"the explicit constant is stated for r = 1, got r = {consts.r}")


def theorem_main1_constant(p: ComplexityProfile, consts: BoundConstants) -> float:
    """``C = 3 b A (ln(36 A)(1 + B^3))^B``."""
    _require_r1(consts)
    return 3.0 * consts.b * p.A * (math.log(36.0 * p.A) * (1.0 + p.B ** 3)) ** p.B


def log_theorem_main1_constant(p: ComplexityProfile, consts: BoundConstants) -> float:
    _require_r1(consts)
    return math.log(3.0 * consts.b * p.A) + p.B * math.log(math.log(36.0 * p.A) * (1.0 + p.B ** 3))


def n_std_bound_real(p: ComplexityProfile, consts: BoundConstants, eps=None, *, log_inv_eps=None) -> float:
    """Un-ceiled ``C (1 + ln 1/eps)^B``."""
    L = log_inv(eps, log_inv_eps)
    return theorem_main1_constant(p, consts) * (1.0 + L) ** p.B


def log_n_std_bound(p: ComplexityProfile, consts: BoundConstants, eps=None, *, log_inv_eps=None) -> float:
    """``ln`` of :func:`n_std_bound_real`, finite where the value itself would overflow."""
    L = log_inv(eps, log_inv_eps)
    return log_theorem_main1_constant(p, consts) + p.B * math.log1p(L)


def n_std_bound(p: ComplexityProfile, consts: BoundConstants, eps=None, *, log_inv_eps=None) -> int:
    """Upper bound on ``n_std_lin(eps)`` (and hence ``n_std(eps)``)."""
    return math.ceil(n_std_bound_real(p, consts, eps, log_inv_eps=log_inv_eps))


@dataclass(frozen=True)
class TransferReport:
    profile: ComplexityProfile
    constants: BoundConstants
    gelfand_bound: dict
    linear_bound: dict
    n0: float
    B0: float
    R: float
    C: float
    bound_table: tuple = field(default=())

    def n_std_lin(self, eps=None, *, log_inv_eps=None) -> float:
        L = log_inv(eps, log_inv_eps)
        return self.C * (1.0 + L) ** self.profile.B

    def to_document(self) -> dict:
        return {
            "profile": {"A": self.profile.A, "B": self.profile.B},
            "constants": {"b": self.constants.b, "r": self.constants.r, "D": self.constants.D},
            "gelfand_bound": self.gelfand_bound,
            "linear_bound": self.linear_bound,
            "n0": self.n0,
            "B0": self.B0,
            "R": self.R,
            "C": self.C,
            "bound_table": [dict(row) for row in self.bound_table],
        }


def transfer_report(p: ComplexityProfile, consts: BoundConstants, log_inv_grid: Sequence[float] = ()) -> TransferReport:
    """Every intermediate quantity of the chain for one profile, plus a bound table.

    ``log_inv_grid`` holds values of ``ln(1/eps)``.
    """
    C = theorem_main1_constant(p, consts)
    rows = []
    for L in log_inv_grid:
        rows.append(
            {
                "epsilon": math.exp(-L),
                "log_inv_epsilon": float(L),
                "n_std_bound": n_std_bound(p, consts, log_inv_eps=L),
                "n_std_bound_real": C * (1.0 + L) ** p.B,
                "n_all_bound": complexity_bound_from_gelfand(p, log_inv_eps=L),
            }
        )
    return TransferReport(
        profile=p,
        constants=consts,
        gelfand_bound={"form": "e*exp(-(n/A)^(1/B))", "valid_from_n": p.A},
        linear_bound={
            "form": "2e*sqrt(n)*exp(-(n/A)^(1/B))",
            "prefactor": 2.0 * math.e,
            "valid_from_n": max(p.A, 1.0),
        },
        n0=proof_threshold_n0(p),
        B0=proof_B0(p),
        R=proof_R(p),
        C=C,
        bound_table=tuple(rows),
    )


# -- polynomial and quasi-polynomial families ------------------------------


def corollary_profile(c: float, p_exp: float, q: float, d: int) -> ComplexityProfile:
    if not (c > 0 and p_exp > 0 and q >= 0):
        raise DomainError(f"need c > 0, p > 0, q >= 0; got c={c}, p={p_exp}, q={q}")
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    return ComplexityProfile(A=c * d ** q + 1.0, B=p_exp)


def corollary_main_bound_real(c, p_exp, q, consts, d, eps=None, *, log_inv_eps=None) -> float:
    return n_std_bound_real(corollary_profile(c, p_exp, q, d), consts, eps, log_inv_eps=log_inv_eps)


def corollary_main_bound(c, p_exp, q, consts, d, eps=None, *, log_inv_eps=None) -> int:
    """Bound on ``n_std_lin`` when ``n_all <= c d^q (1 + ln 1/eps)^p``."""
    return math.ceil(corollary_main_bound_real(c, p_exp, q, consts, d, eps, log_inv_eps=log_inv_eps))


REFERENCE_D = tuple(range(1, 33))
REFERENCE_LOG_INV = tuple(float(k) for k in range(0, 21))


def corollary_display_constant(c, p_exp, q, consts, d_grid=REFERENCE_D, log_inv_grid=REFERENCE_LOG_INV) -> float:
    """Smallest ``C'`` with ``bound <= C' d^q (1+ln d)^p (1+ln 1/eps)^p`` on the grid.

    The grid includes ``eps = 1`` (``ln 1/eps = 0``); there the bound is
    evaluated by its closed form.
    """
    best = 0.0
    for d in d_grid:
        prof = corollary_profile(c, p_exp, q, d)
        C = theorem_main1_constant(prof, consts)
        for L in log_inv_grid:
            bound = math.ceil(C * (1.0 + L) ** p_exp)
            shape = d ** q * (1.0 + math.log(d)) ** p_exp * (1.0 + L) ** p_exp
            best = max(best, bound / shape)
    return best


def qpt_threshold(c: float, t: float) -> float:
    """Dimensions strictly above ``(e + 1/c)^(1/t) / e`` are admissible."""
    if not (c > 0 and t > 0):
        raise DomainError(f"need c > 0 and t > 0, got c={c}, t={t}")
    return (math.e + 1.0 / c) ** (1.0 / t) / math.e


def qpt_profile(c: float, t: float, d: int) -> ComplexityProfile:
    threshold = qpt_threshold(c, t)
    if not d > threshold:
        raise DomainError(
            f"quasi-polynomial transfer needs d > (e + 1/c)^(1/t)/e = {threshold:.6g}, got d={d}"
        )
    return ComplexityProfile(A=c * math.exp(t) * d ** t, B=t * (1.0 + math.log(d)))


def qpt_transfer_bound_real(c, t, consts, d, eps=None, *, log_inv_eps=None) -> float:
    return n_std_bound_real(qpt_profile(c, t, d), consts, eps, log_inv_eps=log_inv_eps)


def log_qpt_transfer_bound(c, t, consts, d, eps=None, *, log_inv_eps=None) -> float:
    return log_n_std_bound(qpt_profile(c, t, d), consts, eps, log_inv_eps=log_inv_eps)


def qpt_transfer_bound(c, t, consts, d, eps=None, *, log_inv_eps=None) -> int:
    """Exact proof-path bound on ``n_std_lin`` for ``n_all <= c exp(t ln+d ln+ln+ 1/eps)``."""
    return math.ceil(qpt_transfer_bound_real(c, t, consts, d, eps, log_inv_eps=log_inv_eps))


def log_qpt_display_bound(c, t, d, C, eps=None, *, log_inv_eps=None) -> float:
    """``ln`` of ``c exp(t ln+d (ln+ ln+ 1/eps + 4 ln(t ln+d) + C))``."""
    L = log_inv(eps, log_inv_eps)
    lnd = 1.0 + math.log(d)
    return math.log(c) + t * lnd * (1.0 + math.log1p(L) + 4.0 * math.log(t * lnd) + C)


def qpt_display_bound(c, t, d, C, eps=None, *, log_inv_eps=None) -> float:
    return math.exp(log_qpt_display_bound(c, t, d, C, eps, log_inv_eps=log_inv_eps))


def qpt_display_constant(c, t, consts, d_grid=REFERENCE_D, log_inv_grid=REFERENCE_LOG_INV[1:]) -> float:
    """Smallest ``C`` making the display form dominate the exact path on the grid.

    Dimensions at or below the validity threshold are skipped.
    """
    threshold = qpt_threshold(c, t)
    best = -math.inf
    for d in d_grid:
        if not d > threshold:
            continue
        lnd = 1.0 + math.log(d)
        for L in log_inv_grid:
            exact = math.ceil(qpt_transfer_bound_real(c, t, consts, d, log_inv_eps=L))
            need = (math.log(exact) - math.log(c)) / (t * lnd) - (1.0 + math.log1p(L)) - 4.0 * math.log(t * lnd)
            best = max(best, need)
    if best == -math.inf:
        raise DomainError("no grid dimension lies above the validity threshold")
    return best


# -- weak tractability -------------------------------------------------------


def weak_transfer_threshold(h: float, v0: int, alpha: float, d: int) -> float:
    """Sample counts from which the decay estimate is in force: ``max(exp(h v0), exp(2 h d^alpha))``."""
    return max(math.exp(h * v0), math.exp(2.0 * h * d ** alpha))


def weak_transfer_bound_real(h, v0, alpha, beta, consts, d, eps=None, *, log_inv_eps=None) -> float:
    if not 0 < h <= 1.0 / 16.0:
        raise DomainError(f"h must lie in (0, 1/16], got {h}")
    if int(v0) != v0 or v0 < 1:
        raise DomainError(f"v0 must be a positive integer, got {v0}")
    if not (0 < alpha <= 1 and 0 < beta <= 1):
        raise DomainError(f"alpha and beta must lie in (0, 1], got {alpha}, {beta}")
    L = log_inv(eps, log_inv_eps)
    return consts.D * math.exp(4.0 * h * ((1.0 + L) ** beta + d ** alpha))


def weak_transfer_bound(h, v0, alpha, beta, consts, d, eps=None, *, log_inv_eps=None) -> int:
    """``ceil(D exp(4 h ((1 + ln 1/eps)^beta + d^alpha)))``."""
    return math.ceil(weak_transfer_bound_real(h, v0, alpha, beta, consts, d, eps, log_inv_eps=log_inv_eps))


# -- appendix lemmas -------------------------------------------------------


def _summand(A: float, B: float):
    def term(k: np.ndarray) -> np.ndarray:
        return np.sqrt(k) * np.exp(-((k / A) ** (1.0 / B)))

    return term


def tail_sum_direct(A: float, B: float, n: int) -> float:
    """Brute-force ``sum_{k >= n+1} sqrt(k) exp(-(k/A)^(1/B))``."""
    if not (A > 0 and B > 0):
        raise DomainError(f"need A > 0 and B > 0, got A={A}, B={B}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return truncated_tail_sum(_summand(A, B), n + 1)


def decreasing_summand_threshold(A: float, B: float) -> float:
    """Summand is decreasing beyond ``A (B/2)^B``."""
    return A * (B / 2.0) ** B


def integral_bound_threshold(A: float, B: float) -> float:
    """The integral bound holds from ``A max(3B/2, 1)^B`` on."""
    return A * max(1.5 * B, 1.0) ** B


def tail_sum_bound(A: float, B: float, n: float) -> float:
    """``A^(1/B) B max(3B/2, 1) n^(3/2 - 1/B) exp(-(n/A)^(1/B))`` >= the tail from ``n+1``."""
    if not (A > 0 and B > 0):
        raise DomainError(f"need A > 0 and B > 0, got A={A}, B={B}")
    t_sum = decreasing_summand_threshold(A, B)
    if n < t_sum:
        raise DomainError(f"series-vs-integral lemma needs n >= A (B/2)^B = {t_sum:.6g}, got n={n}")
    t_int = integral_bound_threshold(A, B)
    if n < t_int:
        raise DomainError(f"integral-vs-exponential lemma needs n >= A max(3B/2,1)^B = {t_int:.6g}, got n={n}")
    return A ** (1.0 / B) * B * max(1.5 * B, 1.0) * n ** (1.5 - 1.0 / B) * math.exp(-((n / A) ** (1.0 / B)))


def incomplete_gamma_upper(a: float, x: float) -> float:
    """``max(a, 1) x^(a-1) e^-x``, an upper bound on ``Gamma(a, x)`` for ``x > max(a, 1)``."""
    if not a > 0:
        raise DomainError(f"a must be positive, got {a}")
    if not x > max(a, 1.0):
        raise DomainError(f"incomplete gamma bound needs x > max(a, 1) = {max(a, 1.0)}, got x={x}")
    return max(a, 1.0) * math.exp((a - 1.0) * math.log(x) - x)


def power_exp_bound(u, delta, A, B, n, *, log: bool = False) -> tuple[float, float]:
    """``(n^u exp(-(n/A)^(1/B)), A^u delta^(-uB) exp((u B delta - 1)(n/A)^(1/B)))``.

    With ``log=True`` both sides are returned as natural logarithms, which
    stays finite for extreme parameters.
    """
    for name, v in (("u", u), ("delta", delta), ("A", A), ("B", B), ("n", n)):
        if not v > 0:
            raise DomainError(f"{name} must be positive, got {v}")
    s = (n / A) ** (1.0 / B)
    log_lhs = u * math.log(n) - s
    log_rhs = u * math.log(A) - u * B * math.log(delta) + (u * B * delta - 1.0) * s
    if log:
        return log_lhs, log_rhs
    return math.exp(log_lhs), math.exp(log_rhs)
