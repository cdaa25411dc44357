"""Randomised inequality suites for the appendix lemmas and the transfer chain.

Every suite compares a closed-form bound against an oracle computed by a
different route (direct summation, closed forms or quadrature for the upper
incomplete gamma function, direct evaluation) and counts violations at the
package-wide relative tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, special

from . import transfer as tr
from .model_spaces import Geometric, ModelSpace, tensor_top_eigenvalues, widths_from_eigenvalues


def upper_gamma_oracle(a: float, x: float) -> float:
    """``Gamma(a, x)`` by closed form for integer and half-integer ``a``, else quadrature."""
    if a <= 0 or x < 0:
        raise ValueError("need a > 0 and x >= 0")
    twice = 2.0 * a
    if twice == round(twice) and a <= 60:
        if a == round(a):
            # (a-1)! e^-x sum_{k<a} x^k / k!
            k = int(a)
            term, total = 1.0, 1.0
            for j in range(1, k):
                term *= x / j
                total += term
            return math.factorial(k - 1) * math.exp(-x) * total
        # Gamma(1/2, x) = sqrt(pi) erfc(sqrt x), then Gamma(s+1, x) = s Gamma(s, x) + x^s e^-x
        s = 0.5
        value = math.sqrt(math.pi) * math.erfc(math.sqrt(x))
        while s < a:
            value = s * value + math.exp(s * math.log(x) - x) if x > 0 else s * value
            s += 1.0
        return value
    # e^-x * int_0^inf (x + s)^(a-1) e^-s ds
    integrand = lambda s: math.exp((a - 1.0) * math.log(x + s) - s)
    value, _ = integrate.quad(integrand, 0.0, math.inf, epsrel=1e-10, epsabs=0.0, limit=200)
    return math.exp(-x) * value


def upper_gamma_scipy(a: float, x: float) -> float:
    """Library cross-check of :func:`upper_gamma_oracle`."""
    return float(special.gammaincc(a, x) * special.gamma(a))


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.checked} checked, {len(self.violations)} violations"


# fault injection hook for harness self-tests: scales every bound under test
_identity = lambda v: v


def lemma_tail_suite(rng: np.random.Generator, count: int = 200, n_per: int = 5, fault=_identity) -> SuiteResult:
    """Series-vs-integral and integral-vs-exponential lemmas, chained."""
    res = SuiteResult("tail-sum (series <= integral <= closed form)")
    for _ in range(count):
        A = float(rng.uniform(0.5, 4.0))
        B = float(rng.uniform(0.25, 3.0))
        first = math.ceil(max(tr.decreasing_summand_threshold(A, B), tr.integral_bound_threshold(A, B)))
        for n in range(first, first + n_per):
            direct = tr.tail_sum_direct(A, B, n)
            bound = fault(tr.tail_sum_bound(A, B, n))
            res.checked += 1
            if not tr.holds(direct, bound):
                res.violations.append({"A": A, "B": B, "n": n, "direct": direct, "bound": bound})
    return res


def incomplete_gamma_suite(rng: np.random.Generator, count: int = 200, fault=_identity) -> SuiteResult:
    res = SuiteResult("incomplete-gamma (Gamma(a,x) <= max(a,1) x^(a-1) e^-x)")
    for i in range(count):
        # mix in integer and half-integer orders so the closed forms are exercised
        if i % 4 == 0:
            a = float(rng.integers(1, 12))
        elif i % 4 == 1:
            a = float(rng.integers(0, 12)) + 0.5
        else:
            a = float(rng.uniform(0.05, 12.0))
        lo = max(a, 1.0) * (1.0 + 1e-6)
        x = float(lo * (1.0 + rng.exponential(1.0)))
        exact = upper_gamma_oracle(a, x)
        bound = fault(tr.incomplete_gamma_upper(a, x))
        res.checked += 1
        if not tr.holds(exact, bound):
            res.violations.append({"a": a, "x": x, "gamma": exact, "bound": bound})
    return res


def power_exp_suite(rng: np.random.Generator, count: int = 1000, fault=_identity) -> SuiteResult:
    res = SuiteResult("power-exponential (n^u e^-(n/A)^(1/B) <= rhs)")
    shift = math.log(fault(1.0))
    for _ in range(count):
        u = float(rng.uniform(0.01, 3.0))
        delta = float(np.exp(rng.uniform(math.log(0.05), math.log(5.0))))
        A = float(np.exp(rng.uniform(math.log(0.1), math.log(100.0))))
        B = float(rng.uniform(0.1, 5.0))
        n = float(np.exp(rng.uniform(math.log(0.1), math.log(1e4))))
        lhs, rhs = tr.power_exp_bound(u, delta, A, B, n, log=True)
        rhs += shift
        res.checked += 1
        # logs: lhs <= rhs * (1 + tol) in the original scale
        if not lhs <= rhs + math.log1p(tr.REL_TOL):
            res.violations.append({"u": u, "delta": delta, "A": A, "B": B, "n": n, "log_lhs": lhs, "log_rhs": rhs})
    return res


def chain_suite(rng: np.random.Generator, count: int = 50, fault=_identity) -> SuiteResult:
    """Transfer-chain invariants on geometric Hilbert spaces and random profiles."""
    res = SuiteResult("transfer chain (Gelfand profile, Pietsch, dominance)")
    log_grid = [float(k) for k in range(1, 21)]
    for _ in range(count):
        omega = float(rng.uniform(0.05, 0.9))
        d = int(rng.integers(1, 4))
        eigs = tensor_top_eigenvalues(ModelSpace(d, Geometric(omega)), 400)
        widths = widths_from_eigenvalues(eigs, "gelfand")
        # smallest A for which the profile covers n_all(eps) for every eps just
        # below a stored width: there n_all jumps to n + 1
        B = float(rng.uniform(0.5, 3.0))
        c = widths.values
        inner = (c < 1.0) & (c > 0.0)
        idx = np.nonzero(inner)[0]
        A = max([1.0] + list((idx + 1) / (1.0 - np.log(c[idx])) ** B))
        A = float(A)
        prof = tr.ComplexityProfile(A, B)
        for n in range(math.ceil(A), widths.length):
            res.checked += 1
            bound = fault(tr.gelfand_bound_from_profile(prof, n))
            if not tr.holds(float(widths.values[n]), bound):
                res.violations.append({"kind": "gelfand", "omega": omega, "d": d, "n": n, "A": A, "B": B})
            res.checked += 1
            if not tr.holds(float(widths.values[n]), fault(tr.pietsch_bound(float(widths.values[n]), max(n, 1)))):
                res.violations.append({"kind": "pietsch", "omega": omega, "d": d, "n": n})
        consts = tr.BoundConstants()
        for L in log_grid:
            res.checked += 1
            lhs = tr.complexity_bound_from_gelfand(prof, log_inv_eps=L) - 1
            rhs = fault(tr.n_std_bound(prof, consts, log_inv_eps=L))
            if not lhs <= rhs:
                res.violations.append({"kind": "dominance", "A": A, "B": B, "log_inv_eps": L})
    return res


SUITES: dict[str, Callable] = {
    "tail": lemma_tail_suite,
    "gamma": incomplete_gamma_suite,
    "power": power_exp_suite,
    "chain": chain_suite,
}


def run_all(seed: int = 0, samples: int = 1000, fault_scale: float | None = None) -> list[SuiteResult]:
    """Run every suite.

    ``samples`` is the tuple count of the power-exponential suite; the costlier
    suites scale with it (``samples/5`` for the tail-sum and incomplete-gamma
    suites, ``samples/20`` for the chain), so the default reproduces 200, 200,
    1000 and 50 tuples.
    """
    rng = np.random.default_rng(seed)
    fault = _identity if fault_scale is None else (lambda v: v * fault_scale)
    return [
        lemma_tail_suite(rng, count=max(1, samples // 5), fault=fault),
        incomplete_gamma_suite(rng, count=max(1, samples // 5), fault=fault),
        power_exp_suite(rng, count=samples, fault=fault),
        chain_suite(rng, count=max(1, samples // 20), fault=fault),
    ]
