"""Exponential tractability classes, profile fitting and weak-notion diagnostics."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DomainError, FitError
from .transfer import ComplexityProfile

# a tabulated family fits a form if every predicted A_d, B_d is within 5 %
FORM_TOLERANCE = 0.05


class TractabilityClass(enum.IntEnum):
    """Ordered from strongest to weakest; ``UNCLASSIFIED`` sits outside the chain."""

    EXP_SPT = 1
    EXP_PT = 2
    EXP_QPT = 3
    EXP_UWT = 4
    EXP_WT = 5
    UNCLASSIFIED = 99

    @property
    def label(self) -> str:
        return self.name.replace("_", "-")

    @classmethod
    def from_label(cls, label: str) -> "TractabilityClass":
        return cls[label.strip().upper().replace("-", "_")]

    def __str__(self) -> str:
        return self.label


CHAIN = (
    TractabilityClass.EXP_SPT,
    TractabilityClass.EXP_PT,
    TractabilityClass.EXP_QPT,
    TractabilityClass.EXP_UWT,
    TractabilityClass.EXP_WT,
)


def implied_classes(cls: TractabilityClass) -> tuple[TractabilityClass, ...]:
    """All strictly weaker classes, in chain order."""
    if cls is TractabilityClass.UNCLASSIFIED:
        raise DomainError("UNCLASSIFIED implies nothing")
    return tuple(c for c in CHAIN if c > cls)


def _ln_plus(x):
    return 1.0 + np.log(x)


# -- profile families --------------------------------------------------------


@dataclass(frozen=True)
class ConstantFamily:
    """``n(eps, d) <= A (1 + ln 1/eps)^B`` for every d."""

    A: float
    B: float

    def __post_init__(self):
        if not (self.A > 0 and self.B > 0):
            raise DomainError(f"constant family needs A > 0 and B > 0, got {self.A}, {self.B}")

    def log_bound(self, d, log_inv_eps):
        return math.log(self.A) + self.B * math.log1p(log_inv_eps)

    def describe(self) -> dict:
        return {"form": "constant", "A": self.A, "B": self.B}


@dataclass(frozen=True)
class PolynomialFamily:
    """``n(eps, d) <= c d^q (1 + ln 1/eps)^p``."""

    c: float
    q: float
    p: float

    def __post_init__(self):
        if not (self.c > 0 and self.p > 0 and self.q >= 0):
            raise DomainError(f"polynomial family needs c > 0, p > 0, q >= 0, got {self.c}, {self.q}, {self.p}")

    def log_bound(self, d, log_inv_eps):
        return math.log(self.c) + self.q * math.log(d) + self.p * math.log1p(log_inv_eps)

    def describe(self) -> dict:
        return {"form": "poly", "c": self.c, "q": self.q, "p": self.p}


@dataclass(frozen=True)
class QuasiPolyFamily:
    """``n(eps, d) <= c exp(t ln+(d) ln+(ln+(1/eps)))`` with ``ln+ = 1 + ln``."""

    c: float
    t: float

    def __post_init__(self):
        if not (self.c > 0 and self.t > 0):
            raise DomainError(f"quasi-polynomial family needs c > 0 and t > 0, got {self.c}, {self.t}")

    def log_bound(self, d, log_inv_eps):
        return math.log(self.c) + self.t * (1.0 + math.log(d)) * (1.0 + math.log1p(log_inv_eps))

    def describe(self) -> dict:
        return {"form": "quasi-poly", "c": self.c, "t": self.t}


@dataclass(frozen=True)
class TabulatedFamily:
    """Per-dimension profiles ``(d, A_d, B_d)``."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(sorted((int(d), float(A), float(B)) for d, A, B in self.rows))
        if not rows:
            raise DomainError("tabulated family is empty")
        if any(d < 1 or A <= 0 or B <= 0 for d, A, B in rows):
            raise DomainError("tabulated rows need d >= 1, A > 0, B > 0")
        if len({d for d, _, _ in rows}) != len(rows):
            raise DomainError("tabulated family repeats a dimension")
        object.__setattr__(self, "rows", rows)

    def log_bound(self, d, log_inv_eps):
        for dd, A, B in self.rows:
            if dd == d:
                return math.log(A) + B * math.log1p(log_inv_eps)
        raise DomainError(f"dimension {d} is not tabulated")

    def describe(self) -> dict:
        return {"form": "tabulated", "rows": [list(r) for r in self.rows]}


ProfileFamily = Union[ConstantFamily, PolynomialFamily, QuasiPolyFamily, TabulatedFamily]


# -- classification ----------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    family: ProfileFamily
    cls: TractabilityClass
    fitted: dict = field(default_factory=dict)
    residual: float | None = None

    @property
    def implied(self) -> tuple:
        if self.cls is TractabilityClass.UNCLASSIFIED:
            return ()
        return implied_classes(self.cls)


def _max_rel(pred, actual) -> float:
    pred, actual = np.asarray(pred, float), np.asarray(actual, float)
    return float(np.max(np.abs(pred - actual) / np.abs(actual)))


def _fit_tabulated(rows) -> tuple[TractabilityClass, dict, float]:
    d = np.array([r[0] for r in rows], dtype=float)
    A = np.array([r[1] for r in rows])
    B = np.array([r[2] for r in rows])
    tried = {}

    # constant: A_d, B_d flat (geometric mean for A, mean for B)
    A0, B0 = float(np.exp(np.mean(np.log(A)))), float(np.mean(B))
    res = max(_max_rel(np.full_like(A, A0), A), _max_rel(np.full_like(B, B0), B))
    tried["EXP-SPT"] = res
    if res <= FORM_TOLERANCE:
        return TractabilityClass.EXP_SPT, {"A": A0, "B": B0}, res

    # polynomial: ln A_d = ln c + q ln d, B_d flat
    if np.unique(d).size >= 2:
        q, lnc = np.polyfit(np.log(d), np.log(A), 1)
        q = max(float(q), 0.0)
        lnc = float(np.mean(np.log(A) - q * np.log(d)))
        res = max(_max_rel(np.exp(lnc) * d ** q, A), _max_rel(np.full_like(B, B0), B))
        tried["EXP-PT"] = res
        if res <= FORM_TOLERANCE:
            return TractabilityClass.EXP_PT, {"c": float(np.exp(lnc)), "q": q, "p": B0}, res

    # quasi-polynomial: B_d = t ln+(d), A_d = c e^t d^t
    lp = _ln_plus(d)
    t = float(np.dot(lp, B) / np.dot(lp, lp))
    if t > 0:
        lnc = float(np.mean(np.log(A) - t * lp))
        res = max(_max_rel(np.exp(lnc + t * lp), A), _max_rel(t * lp, B))
        tried["EXP-QPT"] = res
        if res <= FORM_TOLERANCE:
            return TractabilityClass.EXP_QPT, {"c": float(np.exp(lnc)), "t": t}, res
    return TractabilityClass.UNCLASSIFIED, {"residuals": tried}, min(tried.values())


def classify(family: ProfileFamily) -> Classification:
    """Strongest class whose defining bound the declared form satisfies.

    A polynomial family with ``q = 0`` is dimension-free and therefore EXP-SPT.
    Tabulated families are matched against the constant, polynomial and
    quasi-polynomial forms in that order.
    """
    if isinstance(family, ConstantFamily):
        return Classification(family, TractabilityClass.EXP_SPT, {"C": family.A, "p": family.B})
    if isinstance(family, PolynomialFamily):
        if family.q == 0:
            return Classification(family, TractabilityClass.EXP_SPT, {"C": family.c, "p": family.p})
        return Classification(family, TractabilityClass.EXP_PT, {"C": family.c, "q": family.q, "p": family.p})
    if isinstance(family, QuasiPolyFamily):
        return Classification(family, TractabilityClass.EXP_QPT, {"C": family.c, "t": family.t})
    if isinstance(family, TabulatedFamily):
        cls, fitted, res = _fit_tabulated(family.rows)
        return Classification(family, cls, fitted, res)
    raise DomainError(f"not a profile family: {family!r}")


def satisfies(cls: TractabilityClass, log_bound: Callable, params: dict, d_grid, log_inv_grid) -> bool:
    """Does ``log_bound(d, L)`` obey the defining inequality of ``cls`` with ``params`` on the grid?

    Only the three explicit forms are checkable pointwise; the weak notions are
    implied by any of them and are checked with :func:`uwt_diagnostic`.
    """
    for d in d_grid:
        for L in log_inv_grid:
            v = log_bound(d, L)
            if cls is TractabilityClass.EXP_SPT:
                rhs = math.log(params["C"]) + params["p"] * math.log1p(L)
            elif cls is TractabilityClass.EXP_PT:
                rhs = math.log(params["C"]) + params["q"] * math.log(d) + params["p"] * math.log1p(L)
            elif cls is TractabilityClass.EXP_QPT:
                rhs = math.log(params["C"]) + params["t"] * (1 + math.log(d)) * (1 + math.log1p(L))
            else:
                raise DomainError(f"{cls} has no pointwise form")
            if v > rhs + 1e-9 * max(1.0, abs(rhs)):
                return False
    return True


def lift_params(cls: TractabilityClass, params: dict, target: TractabilityClass) -> dict:
    """Constants witnessing ``target`` from constants witnessing the stronger ``cls``."""
    if target < cls:
        raise DomainError(f"{cls} does not imply {target}")
    C, out = params["C"], dict(params)
    if cls is TractabilityClass.EXP_SPT:
        out.setdefault("q", 0.0)
    if target is TractabilityClass.EXP_QPT and cls < TractabilityClass.EXP_QPT:
        # d^q (1+L)^p <= exp(t ln+d ln+ln+(1/eps)) with t = max(q, p)
        out = {"C": C, "t": max(out["q"], out["p"])}
    return out


# -- fitting -----------------------------------------------------------------


@dataclass(frozen=True)
class ProfileFit:
    profile: ComplexityProfile
    A_raw: float
    B: float
    max_rel_residual: float
    clamped: bool


def fit_profile(points: Sequence[tuple[float, float]], *, log_inv: bool = False) -> ProfileFit:
    """Least-squares fit of ``ln n = ln A + B ln(1 + ln 1/eps)``.

    ``points`` are ``(eps, n)`` pairs, or ``(ln 1/eps, n)`` pairs with
    ``log_inv=True``. ``A`` is clamped up to 1 (flagged) so the result is a
    valid profile.
    """
    pts = list(points)
    if len(pts) < 3:
        raise FitError(f"need at least 3 points, got {len(pts)}")
    L = np.array([float(p[0]) if log_inv else -math.log(p[0]) for p in pts])
    n = np.array([float(p[1]) for p in pts])
    if np.any(n < 1):
        raise FitError("every n must be >= 1")
    if np.any(L < 0):
        raise FitError("eps must lie in (0, 1]")
    x = np.log1p(L)
    if np.unique(x).size < 2:
        raise FitError("degenerate design: all eps equal")
    if np.unique(x).size < 3:
        raise FitError("need at least 3 distinct eps")
    B, lnA = np.polyfit(x, np.log(n), 1)
    B, A = float(B), float(math.exp(lnA))
    if not B > 0:
        raise FitError(f"fitted exponent B={B} is not positive")
    pred = A * (1.0 + L) ** B
    residual = float(np.max(np.abs(pred - n) / n))
    clamped = A < 1.0
    return ProfileFit(ComplexityProfile(max(A, 1.0), B), A, B, residual, clamped)


def fit_polynomial_table(rows: Sequence[tuple[float, float, float]], *, log_inv: bool = True) -> dict:
    """Fit ``ln n = ln C + q ln d + p ln(1 + L)`` to ``(d, L, n)`` rows."""
    arr = np.asarray(rows, dtype=float)
    if arr.shape[0] < 3:
        raise FitError("need at least 3 rows")
    d, L, n = arr[:, 0], arr[:, 1], arr[:, 2]
    if not log_inv:
        L = -np.log(L)
    X = np.column_stack([np.ones_like(d), np.log(d), np.log1p(L)])
    if np.linalg.matrix_rank(X) < 3:
        raise FitError("degenerate design: need distinct d and eps values")
    coef, *_ = np.linalg.lstsq(X, np.log(n), rcond=None)
    return {"C": float(np.exp(coef[0])), "q": float(coef[1]), "p": float(coef[2])}


def tabulate_from_data(rows: Sequence[tuple[float, float, float]], *, log_inv: bool = False) -> TabulatedFamily:
    """Group ``(d, eps, n)`` rows by d and fit a profile per dimension."""
    by_d: dict[int, list] = {}
    for d, e, n in rows:
        by_d.setdefault(int(d), []).append((e, n))
    table = []
    for d, pts in sorted(by_d.items()):
        fit = fit_profile(pts, log_inv=log_inv)
        table.append((d, fit.A_raw, fit.B))
    return TabulatedFamily(tuple(table))


# -- weak notions ------------------------------------------------------------


@dataclass(frozen=True)
class UWTDiagnostic:
    alpha: float
    beta: float
    grid: tuple
    ratios: tuple
    verdict: bool

    @property
    def label(self) -> str:
        return "decreasing-to-zero trend" if self.verdict else "no decreasing-to-zero trend"


def _trend(ratios: Sequence[float]) -> bool:
    first = ratios[0]
    last3 = ratios[-3:]
    if not all(r <= first / 2.0 for r in last3):
        return False
    tail = ratios[len(ratios) - max(2, math.ceil(len(ratios) / 3)):]
    return all(b <= a for a, b in zip(tail, tail[1:]))


def uwt_diagnostic(log_bound: Callable[[int, float], float], alpha: float, beta: float, grid) -> UWTDiagnostic:
    """Ratios ``ln n / (d^alpha + (1 + ln 1/eps)^beta)`` along a divergent grid.

    ``log_bound(d, L)`` returns ``ln n`` at dimension ``d`` and ``L = ln 1/eps``;
    ``grid`` is a sequence of ``(d, L)``. The verdict is a heuristic: the last
    three ratios are at most half the first and the final third is
    nonincreasing. A finite grid cannot prove a limit.
    """
    if not (alpha > 0 and beta > 0):
        raise DomainError(f"alpha and beta must be positive, got {alpha}, {beta}")
    grid = tuple((int(d), float(L)) for d, L in grid)
    if len(grid) < 8:
        raise DomainError(f"grid needs at least 8 points, got {len(grid)}")
    # d + 1/eps in log space, so huge 1/eps stays comparable
    size = [np.logaddexp(math.log(d), L) for d, L in grid]
    if any(b <= a for a, b in zip(size, size[1:])):
        raise DomainError("d + 1/eps must increase strictly along the grid")
    ratios = tuple(
        float(log_bound(d, L) / (d ** alpha + (1.0 + L) ** beta)) for d, L in grid
    )
    return UWTDiagnostic(alpha, beta, grid, ratios, _trend(ratios))


def wt_diagnostic(log_bound, grid) -> UWTDiagnostic:
    """Weak tractability is the ``alpha = beta = 1`` case of the same ratio."""
    return uwt_diagnostic(log_bound, 1.0, 1.0, grid)


def dyadic_grid(j_max: int = 10, j_min: int = 1) -> list[tuple[int, float]]:
    """``d = 2^j`` with ``ln 1/eps = 2^j``."""
    return [(2 ** j, float(2 ** j)) for j in range(j_min, j_max + 1)]
