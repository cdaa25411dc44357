"""Hilbert model spaces with explicit spectra.

A model space is described by its squared singular values ``lambda_k``
(the eigenvalues of ``APP* APP``). For tensor-product spaces the d-variate
spectrum is the nonincreasing rearrangement of all products of univariate
eigenvalues, which :func:`tensor_top_eigenvalues` enumerates lazily with a
heap.

In the Hilbert case the linear and Gelfand widths coincide,
``a_n = c_n = sigma_{n+1}``, so widths and ``n_all`` are exact here.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DomainError, EnumerationRangeError, TruncationError, UnsupportedError

# below this a factor is treated as "underflow-prone" and products move to log space
LOG_SPACE_THRESHOLD = 1e-300

WIDTH_KINDS = ("linear", "gelfand", "sampling-linear")


@dataclass(frozen=True)
class Geometric:
    """``lambda_k = omega**(k-1)``, ``0 < omega < 1``."""

    omega: float

    def __post_init__(self):
        if not 0.0 < self.omega < 1.0:
            raise DomainError(f"geometric family needs 0 < omega < 1, got {self.omega}")

    max_length = None

    def describe(self) -> str:
        return f"geometric(omega={self.omega!r})"

    def values(self, count: int) -> np.ndarray:
        k = np.arange(count, dtype=float)
        return self.omega ** k


@dataclass(frozen=True)
class StretchedExponential:
    """``lambda_k = exp(-c * k**kappa)``, ``c > 0``, ``kappa > 0``."""

    c: float
    kappa: float

    def __post_init__(self):
        if not (self.c > 0 and self.kappa > 0):
            raise DomainError(
                f"stretched-exponential family needs c > 0 and kappa > 0, got c={self.c}, kappa={self.kappa}"
            )

    max_length = None

    def describe(self) -> str:
        return f"stretched-exponential(c={self.c!r}, kappa={self.kappa!r})"

    def values(self, count: int) -> np.ndarray:
        k = np.arange(1, count + 1, dtype=float)
        return np.exp(-self.c * k ** self.kappa)


@dataclass(frozen=True)
class Explicit:
    """A finite, user-supplied eigenvalue list. Ties are allowed."""

    eigenvalues: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.eigenvalues)
        object.__setattr__(self, "eigenvalues", vals)
        _check_eigen_invariants(np.asarray(vals))

    @property
    def max_length(self) -> int:
        return len(self.eigenvalues)

    def describe(self) -> str:
        return f"explicit(n={len(self.eigenvalues)})"

    def values(self, count: int) -> np.ndarray:
        if count > len(self.eigenvalues):
            raise TruncationError(
                f"explicit family stores {len(self.eigenvalues)} eigenvalues, {count} requested"
            )
        return np.asarray(self.eigenvalues[:count], dtype=float)


Family = Union[Geometric, StretchedExponential, Explicit]


def _check_eigen_invariants(values: np.ndarray) -> None:
    if values.size == 0:
        raise DomainError("eigenvalue sequence is empty")
    if not np.all(np.isfinite(values)):
        raise DomainError("eigenvalues must be finite")
    if values[0] <= 0:
        raise DomainError("leading eigenvalue must be positive")
    if np.any(values < 0):
        raise DomainError("eigenvalues must be nonnegative")
    if np.any(np.diff(values) > 0):
        raise DomainError("eigenvalues must be nonincreasing")


@dataclass(frozen=True, eq=False)
class EigenSequence:
    """Nonincreasing squared singular values, indexed from 1 via :meth:`at`."""

    values: np.ndarray
    source: str = ""

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        _check_eigen_invariants(vals)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size

    def at(self, k: int) -> float:
        """The k-th eigenvalue, ``k >= 1``."""
        if k < 1:
            raise IndexError("eigenvalues are indexed from 1")
        if k > self.values.size:
            raise TruncationError(f"eigenvalue {k} requested but only {self.values.size} stored")
        return float(self.values[k - 1])

    def sigma(self) -> np.ndarray:
        return np.sqrt(self.values)


@dataclass(frozen=True, eq=False)
class WidthSequence:
    """Widths indexed from 0: ``values[n]`` is the n-th width."""

    kind: str
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in WIDTH_KINDS:
            raise DomainError(f"unknown width kind {self.kind!r}")
        vals = np.array(self.values, dtype=float)
        if vals.size == 0:
            raise DomainError("width sequence is empty")
        if np.any(vals < 0) or np.any(np.diff(vals) > 0):
            raise DomainError("widths must be nonnegative and nonincreasing")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def length(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, n):
        return self.values[n]


@dataclass(frozen=True)
class ModelSpace:
    """Spectral description of ``F_d``: one univariate family per coordinate.

    ``families`` may be a single family (reused for every coordinate) or a
    tuple of length ``d``. ``basis`` names the orthonormal system the sampler
    pairs with the eigenvalues ("trig" or "legendre"), or None.
    """

    d: int
    families: Union[Family, tuple]
    basis: str | None = "trig"

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"d must be a positive integer, got {self.d}")
        fams = self.families
        if not isinstance(fams, tuple):
            fams = (fams,) * self.d
        if len(fams) != self.d:
            raise DomainError(f"need {self.d} univariate families, got {len(fams)}")
        object.__setattr__(self, "families", fams)

    def describe(self) -> str:
        fams = self.families
        if all(f == fams[0] for f in fams):
            return f"d={self.d} x {fams[0].describe()}"
        return f"d={self.d} [" + ", ".join(f.describe() for f in fams) + "]"


def univariate_eigenvalues(family: Family, count: int) -> EigenSequence:
    """First ``count`` eigenvalues of a univariate family."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    return EigenSequence(family.values(count), source=family.describe())


def _product(factors) -> float:
    out = 1.0
    for f in factors:
        out *= f
    return out


def tensor_enumerate(space: ModelSpace, N: int) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """The N largest d-fold products together with their 0-based multi-indices.

    Equal products are emitted in lexicographic order of the multi-index.
    """
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    tables = []
    for fam in space.families:
        length = N if fam.max_length is None else min(N, fam.max_length)
        tables.append(fam.values(length))
    grid_size = math.prod(t.size for t in tables)
    if N > grid_size:
        raise EnumerationRangeError(f"only {grid_size} products exist, {N} requested")

    use_logs = any(t.min() < LOG_SPACE_THRESHOLD for t in tables)
    if use_logs:
        with np.errstate(divide="ignore"):
            logs = [np.log(t) for t in tables]

        def key(idx):
            return sum(float(lg[i]) for lg, i in zip(logs, idx))

        def value(idx):
            return math.exp(key(idx))
    else:

        def key(idx):
            return _product(float(t[i]) for t, i in zip(tables, idx))

        value = key

    d = space.d
    start = (0,) * d
    heap = [(-key(start), start)]
    seen = {start}
    values, indices = [], []
    while len(values) < N:
        neg, idx = heapq.heappop(heap)
        values.append(value(idx))
        indices.append(idx)
        for j in range(d):
            if idx[j] + 1 < tables[j].size:
                nxt = idx[:j] + (idx[j] + 1,) + idx[j + 1:]
                if nxt not in seen:
                    seen.add(nxt)
                    heapq.heappush(heap, (-key(nxt), nxt))
    return np.array(values), indices


def tensor_top_eigenvalues(space: ModelSpace, N: int) -> EigenSequence:
    """The N largest eigenvalues of the d-fold tensor product, nonincreasing."""
    values, _ = tensor_enumerate(space, N)
    return EigenSequence(values, source=f"tensor({space.describe()})")


def widths_from_eigenvalues(eigs: EigenSequence, kind: str = "gelfand") -> WidthSequence:
    """Hilbert-case widths ``a_n = c_n = sqrt(lambda_{n+1})``."""
    if kind == "sampling-linear":
        raise UnsupportedError("sampling-linear widths have no closed form; use the sampler")
    if kind not in WIDTH_KINDS:
        raise DomainError(f"unknown width kind {kind!r}")
    return WidthSequence(kind, np.sqrt(eigs.values))


def n_all(widths: WidthSequence, eps: float) -> int:
    """Smallest stored n with ``c_n <= eps``."""
    if widths.kind != "gelfand":
        raise DomainError(f"n_all needs Gelfand widths, got {widths.kind!r}")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    hits = np.nonzero(widths.values <= eps)[0]
    if hits.size == 0:
        raise TruncationError(
            f"no stored width is <= {eps}; smallest of {widths.length} is {widths.values[-1]}"
        )
    return int(hits[0])


# -- plain-text descriptions -------------------------------------------------


def family_from_config(config: dict) -> Family:
    name = str(config.get("family", "geometric")).strip().lower()
    if name == "geometric":
        return Geometric(float(config["omega"]))
    if name in ("stretched-exponential", "stretched", "stretched_exponential"):
        return StretchedExponential(float(config["c"]), float(config["kappa"]))
    if name == "explicit":
        raw = config["values"]
        if isinstance(raw, str):
            raw = [v for v in raw.replace(";", " ").replace(",", " ").split()]
        return Explicit(tuple(float(v) for v in raw))
    raise DomainError(f"unknown family {name!r}")


def space_from_config(config: dict) -> tuple[ModelSpace, int]:
    """Build a space and the requested ``count`` from ``family``/``omega``/``c``/``kappa``/``d``/``count`` keys."""
    family = family_from_config(config)
    d = int(config.get("d", 1))
    count = int(config.get("count", 16))
    return ModelSpace(d, family, basis=config.get("basis", "trig")), count


def parse_key_value(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"config line is not key = value: {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def sequence_csv(values: Sequence[float], start: int = 0) -> str:
    from ._io import csv_text

    return csv_text(("index", "value"), ((start + i, float(v)) for i, v in enumerate(values)))
