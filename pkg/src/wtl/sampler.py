"""Weighted least-squares recovery from i.i.d. random point evaluations.

Points are drawn from the Christoffel density
``rho_m(x) = (1/m) sum_{k<m} |b_k(x)|^2`` of the first ``m`` orthonormal basis
functions, weighted by ``1/rho_m``, and the first ``m`` coefficients are fitted
by least squares. The rule is linear in the samples, so its worst-case error
over the unit ball of a (truncated) Hilbert model space is the spectral norm
of a finite matrix and can be evaluated exactly.

Random streams: numpy's PCG64 seeded from ``SeedSequence(seed)``; trial ``t``
of a curve uses ``SeedSequence(seed, spawn_key=(t,))``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import legendre as npleg

from . import transfer as tr
from .errors import DomainError, SamplingError, SingularDesignError
from .model_spaces import ModelSpace, tensor_enumerate

# condition numbers above this are treated as rank deficient
MAX_CONDITION = 1e12
REJECTION_BUDGET = 10_000


class OrthonormalSystem:
    """Orthonormal functions on a product domain with a probability measure.

    ``index[k]`` is the multi-index (one univariate index per coordinate) of
    the k-th basis function. Univariate factors are evaluated by
    :meth:`univariate` and multiplied.
    """

    name = "abstract"
    interval = (0.0, 1.0)
    uniform_density = False

    def __init__(self, d: int, index: Sequence[tuple]):
        self.d = d
        self.index = [tuple(i) for i in index]
        if any(len(i) != d for i in self.index):
            raise DomainError("multi-index length does not match the dimension")

    def __len__(self) -> int:
        return len(self.index)

    def univariate(self, j: np.ndarray, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, points: np.ndarray, m: int | None = None) -> np.ndarray:
        """``(n, m)`` matrix of ``b_k(x_i)`` for the first ``m`` functions."""
        m = len(self) if m is None else m
        if m > len(self):
            raise DomainError(f"system has {len(self)} functions, {m} requested")
        pts = np.asarray(points, dtype=float).reshape(-1, self.d)
        idx = np.array(self.index[:m]).reshape(m, self.d)
        out = np.ones((pts.shape[0], m), dtype=self.dtype)
        for c in range(self.d):
            out = out * self.univariate(idx[:, c][None, :], pts[:, c][:, None])
        return out

    @property
    def dtype(self):
        return float

    def reference_draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        lo, hi = self.interval
        return rng.uniform(lo, hi, size=(size, self.d))

    def quadrature(self, order: int) -> tuple[np.ndarray, np.ndarray]:
        """Tensor quadrature nodes and weights (summing to 1) for the reference measure."""
        nodes, weights = self._univariate_quadrature(order)
        grids = np.meshgrid(*([nodes] * self.d), indexing="ij")
        wgrids = np.meshgrid(*([weights] * self.d), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        w = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
        return pts, w

    def max_abs_squared(self, m: int) -> float:
        """Upper bound on ``|b_k(x)|^2`` over the domain for ``k < m``."""
        raise NotImplementedError


class TrigonometricSystem(OrthonormalSystem):
    """``exp(2 pi i k x)`` on the torus ``[0, 1)^d`` with Lebesgue measure.

    Univariate index ``j`` maps to frequency 0, 1, -1, 2, -2, ...
    """

    name = "trig"
    interval = (0.0, 1.0)
    uniform_density = True

    @property
    def dtype(self):
        return complex

    def univariate(self, j, x):
        freq = np.where(j % 2 == 1, (j + 1) // 2, -(j // 2))
        return np.exp(2j * np.pi * freq * x)

    def _univariate_quadrature(self, order):
        nodes = np.arange(order) / order
        return nodes, np.full(order, 1.0 / order)

    def max_abs_squared(self, m):
        return 1.0


class LegendreSystem(OrthonormalSystem):
    """``sqrt(2j+1) P_j(x)`` on ``[-1, 1]^d`` with the uniform probability measure."""

    name = "legendre"
    interval = (-1.0, 1.0)

    def univariate(self, j, x):
        j = np.broadcast_to(j, np.broadcast_shapes(j.shape, x.shape))
        xb = np.broadcast_to(x, j.shape)
        out = np.empty(j.shape)
        for deg in np.unique(j):
            coef = np.zeros(int(deg) + 1)
            coef[-1] = 1.0
            mask = j == deg
            out[mask] = math.sqrt(2 * deg + 1) * npleg.legval(xb[mask], coef)
        return out

    def _univariate_quadrature(self, order):
        nodes, weights = npleg.leggauss(order)
        return nodes, weights / 2.0

    def max_abs_squared(self, m):
        degree = max(max(i) for i in self.index[:m])
        return float((2 * degree + 1) ** self.d)


SYSTEMS = {"trig": TrigonometricSystem, "legendre": LegendreSystem}


def system_for(space: ModelSpace, length: int) -> tuple[OrthonormalSystem, np.ndarray]:
    """Basis ordered like the tensor eigenvalue enumeration, and the matching ``sigma_k``."""
    if space.basis not in SYSTEMS:
        raise DomainError(f"space has no usable basis (got {space.basis!r})")
    values, index = tensor_enumerate(space, length)
    return SYSTEMS[space.basis](space.d, index), np.sqrt(values)


# -- densities and plans ---------------------------------------------------


def christoffel_density(system: OrthonormalSystem, m: int) -> Callable[[np.ndarray], np.ndarray]:
    """``x -> (1/m) sum_{k<m} |b_k(x)|^2``, a probability density for the reference measure."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if m > len(system):
        raise DomainError(f"system has {len(system)} functions, m={m} requested")

    def rho(points: np.ndarray) -> np.ndarray:
        vals = system.evaluate(points, m)
        return np.sum(np.abs(vals) ** 2, axis=1) / m

    return rho


@dataclass(frozen=True, eq=False)
class SamplingPlan:
    points: np.ndarray
    weights: np.ndarray
    m: int
    seed: object = None
    system: OrthonormalSystem | None = field(default=None, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        w = np.array(self.weights, dtype=float)
        if pts.shape[0] < 1:
            raise DomainError("a plan needs at least one point")
        if w.shape != (pts.shape[0],) or np.any(w <= 0):
            raise DomainError("weights must be positive, one per point")
        if self.m < 1:
            raise DomainError(f"m must be >= 1, got {self.m}")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def to_document(self) -> dict:
        return {
            "seed": self.seed,
            "m": self.m,
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
        }


def _rng(seed, stream: int | None = None) -> np.random.Generator:
    if stream is None:
        ss = np.random.SeedSequence(seed)
    else:
        ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(ss))


def draw_plan(system: OrthonormalSystem, m: int, n: int, seed: int, stream: int | None = None) -> SamplingPlan:
    """``n`` i.i.d. points from the Christoffel density with weights ``1/rho_m``.

    Uniform densities are sampled directly; otherwise rejection sampling with
    the reference measure as proposal. ``n < m`` is allowed here and surfaces
    as a singular design when the plan is used.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    rho = christoffel_density(system, m)
    rng = _rng(seed, stream)
    if system.uniform_density:
        pts = system.reference_draw(rng, n)
    else:
        bound = system.max_abs_squared(m)
        accepted = []
        have = 0
        for _ in range(REJECTION_BUDGET):
            batch = max(64, 2 * (n - have) * int(math.ceil(bound)))
            cand = system.reference_draw(rng, batch)
            keep = cand[rng.uniform(0.0, bound, size=batch) <= rho(cand)]
            accepted.append(keep)
            have += keep.shape[0]
            if have >= n:
                break
        else:
            raise SamplingError(f"rejection sampling produced {have} of {n} points within budget")
        pts = np.concatenate(accepted)[:n]
    weights = 1.0 / rho(pts)
    seed_record = seed if stream is None else [seed, stream]
    return SamplingPlan(pts, weights, m, seed=seed_record, system=system)


# -- recovery ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RecoveryOperator:
    """Least-squares solve map ``samples -> coefficients`` for one plan."""

    design: np.ndarray
    sqrt_weights: np.ndarray
    solve_matrix: np.ndarray
    condition: float

    @classmethod
    def from_plan(cls, plan: SamplingPlan, system: OrthonormalSystem | None = None) -> "RecoveryOperator":
        system = system or plan.system
        if system is None:
            raise DomainError("plan carries no orthonormal system")
        if plan.n < plan.m:
            raise SingularDesignError(f"{plan.n} points cannot determine {plan.m} coefficients")
        design = system.evaluate(plan.points, plan.m)
        sw = np.sqrt(plan.weights)
        weighted = design * sw[:, None]
        u, s, vh = np.linalg.svd(weighted, full_matrices=False)
        condition = float(s[0] / s[-1]) if s[-1] > 0 else math.inf
        if not condition <= MAX_CONDITION:
            raise SingularDesignError(
                f"weighted design is rank deficient (condition {condition:.3e})", condition
            )
        # pinv(weighted) @ diag(sw)
        solve = (vh.conj().T / s) @ u.conj().T * sw[None, :]
        return cls(design, sw, solve, condition)

    def apply(self, samples) -> np.ndarray:
        return self.solve_matrix @ np.asarray(samples)


def solve_weighted_ls(plan: SamplingPlan, samples, system: OrthonormalSystem | None = None) -> np.ndarray:
    """Coefficients minimising ``sum_i w_i |f(x_i) - sum_k c_k b_k(x_i)|^2``."""
    samples = np.asarray(samples)
    if samples.shape[0] != plan.n:
        raise DomainError(f"expected {plan.n} samples, got {samples.shape[0]}")
    return RecoveryOperator.from_plan(plan, system).apply(samples)


def empirical_worst_case_error(
    space: ModelSpace, plan: SamplingPlan, M: int | None = None, system: OrthonormalSystem | None = None
) -> float:
    """Exact worst-case L2 error of the plan's rule over the unit ball of the M-truncated space.

    ``f = sum_{j<M} a_j sigma_j b_j`` with ``|a| <= 1``; the error operator is
    ``(I - [P Phi_M; 0]) diag(sigma)`` and its spectral norm is returned. The
    unresolved remainder ``sigma_{M+1}`` is available from
    :func:`truncation_remainder`.
    """
    M = 4 * plan.m if M is None else M
    if M < plan.m:
        raise DomainError(f"evaluation truncation M={M} is below m={plan.m}")
    full_system, sigma = system_for(space, M)
    system = system or plan.system or full_system
    op = RecoveryOperator.from_plan(plan, system)
    phi = full_system.evaluate(plan.points, M)
    err = -(op.solve_matrix @ phi)
    E = np.zeros((M, M), dtype=complex)
    E[: plan.m, :] = err
    E += np.eye(M)
    E = E * sigma[None, :]
    return float(np.linalg.norm(E, 2))


def truncation_remainder(space: ModelSpace, M: int) -> float:
    """``sigma_{M+1}``: the part of the supremum the M-truncation cannot see."""
    values, _ = tensor_enumerate(space, M + 1)
    return float(math.sqrt(values[M]))


# -- curves ------------------------------------------------------------------


def oversampled_n(m: int, factor: float = 2.0) -> int:
    """``ceil(factor * m * ln(m + 1))``."""
    return math.ceil(factor * m * math.log(m + 1))


def basis_size_for(n: int, factor: float = 2.0) -> int:
    """Largest ``m >= 1`` with ``oversampled_n(m) <= n`` (1 if none)."""
    m = 1
    while oversampled_n(m + 1, factor) <= n:
        m += 1
    return m


def dku_ceiling(sigma_tail: Callable[[int], float], n: int, consts: tr.BoundConstants) -> float:
    """Pietsch then DKU: bound on the error with ``n`` points, ``nan`` where ``n // b < 2``.

    ``sigma_tail(k)`` must return ``c_k`` (0-based).
    """
    n_inner = n // consts.b
    if n_inner < 2:
        return math.nan
    _, value = tr.dku_bound(lambda k: tr_pietsch_vec(sigma_tail, k), n_inner, consts)
    return value


def tr_pietsch_vec(c, k):
    k = np.asarray(k, dtype=float)
    return (1.0 + np.sqrt(k)) * c(k)


@dataclass(frozen=True)
class CurveRow:
    n: int
    m: int
    median_error: float
    best_error: float
    floor_sigma: float
    ceiling_bound: float
    remainder: float


def _gelfand_function(space: ModelSpace, count: int):
    values, _ = tensor_enumerate(space, count)
    c = np.sqrt(values)
    fam = space.families[0]
    if space.d == 1 and hasattr(fam, "omega"):
        # closed form so the tail sum is never cut short by the storage
        return lambda k: np.sqrt(fam.omega) ** np.asarray(k, dtype=float)

    def stored(k):
        k = np.asarray(k, dtype=int)
        out = np.zeros(k.shape)
        inside = k < c.size
        out[inside] = c[k[inside]]
        return out

    return stored


def e_n_empirical_curve(
    space: ModelSpace,
    n_grid: Sequence[int],
    trials: int,
    seed: int,
    *,
    m: int | None = None,
    factor: float = 2.0,
    M: int | None = None,
    consts: tr.BoundConstants = tr.BoundConstants(),
    workers: int | None = None,
) -> list[CurveRow]:
    """Worst-case error of random plans along ``n_grid``.

    For each ``n`` (number of points) the basis size is ``m`` if given, else
    the largest ``m`` whose oversampled budget fits in ``n``. Trial ``t`` at
    grid position ``i`` draws from stream ``i * trials + t``; rows report the
    median and best error over trials, the floor ``sigma_{n+1}`` and the
    Pietsch/DKU ceiling for ``consts``.
    """
    grid = [int(n) for n in n_grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("n grid must be nonempty and strictly increasing")
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if workers is None:
        workers = int(os.environ.get("WTL_THREADS", "1") or 1)
    sizes = [m if m is not None else basis_size_for(n, factor) for n in grid]
    Ms = [M if M is not None else 4 * s for s in sizes]
    top = max(max(grid) + 2, max(Ms) + 2)
    system, sigma = system_for(space, top)
    c_of = _gelfand_function(space, max(top, 4096) if space.d == 1 else top)

    jobs = []
    for i, (n, size, Mi) in enumerate(zip(grid, sizes, Ms)):
        for t in range(trials):
            jobs.append((i, n, size, Mi, i * trials + t))

    def run(job):
        i, n, size, Mi, stream = job
        plan = draw_plan(system, size, n, seed, stream=stream)
        return empirical_worst_case_error(space, plan, Mi, system=system)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            errors = list(pool.map(run, jobs))
    else:
        errors = [run(j) for j in jobs]

    rows = []
    for i, (n, size, Mi) in enumerate(zip(grid, sizes, Ms)):
        errs = errors[i * trials:(i + 1) * trials]
        rows.append(
            CurveRow(
                n=n,
                m=size,
                median_error=float(np.median(errs)),
                best_error=float(min(errs)),
                floor_sigma=float(sigma[n]),
                ceiling_bound=dku_ceiling(c_of, n, consts),
                remainder=float(sigma[Mi]),
            )
        )
    return rows
