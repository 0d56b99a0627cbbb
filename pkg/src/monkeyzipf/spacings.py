"""Random divisions of the unit interval (generalized broken stick)."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import rng as _rng

SUM_TOL = 1e-12
MAX_ATTEMPTS = 64


class Kind(enum.Enum):
    UNIFORM = "uniform"
    BETA32 = "beta32"
    TRIANGULAR = "triangular"
    EQUAL = "equal"
    EXPLICIT = "explicit"


CONTINUOUS = (Kind.UNIFORM, Kind.BETA32, Kind.TRIANGULAR)


@dataclass(frozen=True)
class SpacingDistribution:
    kind: Kind
    values: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind is Kind.EXPLICIT:
            if self.values is None:
                raise ValueError("explicit distribution needs a list of spacings")
            vals = tuple(float(v) for v in self.values)
            object.__setattr__(self, "values", vals)
            if len(vals) < 2:
                raise ValueError("explicit spacings need at least 2 values")
            if any(not v > 0 for v in vals):
                raise ValueError("explicit spacings must be strictly positive")
            total = math.fsum(vals)
            if abs(total - 1.0) > SUM_TOL:
                raise ValueError(f"explicit spacings sum to {total!r}, not 1")
        elif self.values is not None:
            raise ValueError(f"{self.kind.value} distribution takes no values")

    @classmethod
    def parse(cls, name: str) -> "SpacingDistribution":
        try:
            kind = Kind(name.lower())
        except ValueError:
            raise ValueError(f"unknown spacing distribution {name!r}") from None
        if kind is Kind.EXPLICIT:
            raise ValueError("explicit spacings must be loaded from a file")
        return cls(kind)

    @classmethod
    def explicit(cls, values: Sequence[float]) -> "SpacingDistribution":
        return cls(Kind.EXPLICIT, tuple(values))

    @property
    def is_continuous(self) -> bool:
        return self.kind in CONTINUOUS

    @property
    def name(self) -> str:
        return self.kind.value


UNIFORM = SpacingDistribution(Kind.UNIFORM)
BETA32 = SpacingDistribution(Kind.BETA32)
TRIANGULAR = SpacingDistribution(Kind.TRIANGULAR)
EQUAL = SpacingDistribution(Kind.EQUAL)


@dataclass(frozen=True, eq=False)
class Spacings:
    values: np.ndarray
    seed: int
    distribution: SpacingDistribution = field(default=UNIFORM)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or len(vals) < 2:
            raise ValueError("need at least K=2 spacings")
        if not np.all(vals > 0):
            raise ValueError("spacings must be strictly positive")
        total = math.fsum(vals)
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"spacings sum to {total!r}, not 1")

    @property
    def K(self) -> int:
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, Spacings):
            return NotImplemented
        return (self.seed == other.seed and self.distribution == other.distribution
                and np.array_equal(self.values, other.values))

    __hash__ = None


# -- densities --------------------------------------------------------------

def density(dist: SpacingDistribution, x):
    """Density h(x) on [0, 1] for a continuous kind."""
    x = np.asarray(x, dtype=float)
    if dist.kind is Kind.UNIFORM:
        return np.where((x >= 0) & (x <= 1), 1.0, 0.0)
    if dist.kind is Kind.BETA32:
        # Gamma(5) / (Gamma(3) Gamma(2)) = 12
        return np.where((x >= 0) & (x <= 1), 12.0 * x**2 * (1.0 - x), 0.0)
    if dist.kind is Kind.TRIANGULAR:
        return np.where(x <= 0.5, 4.0 * x, 4.0 * (1.0 - x)).clip(min=0.0)
    raise ValueError(f"{dist.name} has no density")


def cdf(dist: SpacingDistribution, x):
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    if dist.kind is Kind.UNIFORM:
        return x
    if dist.kind is Kind.BETA32:
        return x**3 * (4.0 - 3.0 * x)
    if dist.kind is Kind.TRIANGULAR:
        return np.where(x <= 0.5, 2.0 * x**2, 1.0 - 2.0 * (1.0 - x) ** 2)
    raise ValueError(f"{dist.name} has no cdf")


def _beta32_ppf(u: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    # F(x) = x^3 (4 - 3x) is strictly increasing on [0, 1]; plain bisection.
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    while True:
        mid = 0.5 * (lo + hi)
        below = mid**3 * (4.0 - 3.0 * mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.max(hi - lo, initial=0.0) <= tol:
            return 0.5 * (lo + hi)


def inverse_cdf(dist: SpacingDistribution, u):
    """Map uniform draws ``u`` in [0, 1) to draws from ``dist``."""
    u = np.asarray(u, dtype=float)
    if dist.kind is Kind.UNIFORM:
        return u.copy()
    if dist.kind is Kind.TRIANGULAR:
        return np.where(u < 0.5, np.sqrt(u / 2.0), 1.0 - np.sqrt((1.0 - u) / 2.0))
    if dist.kind is Kind.BETA32:
        return _beta32_ppf(u)
    raise ValueError(f"{dist.name} spacings have no i.i.d. sampling step")


def _draw(dist: SpacingDistribution, count: int, gen: np.random.Generator) -> np.ndarray:
    return inverse_cdf(dist, gen.random(count))


def sample_iid(dist: SpacingDistribution, count: int, seed: int) -> np.ndarray:
    if not dist.is_continuous:
        raise ValueError(f"{dist.name} spacings have no i.i.d. sampling step")
    if count < 1:
        raise ValueError("count must be >= 1")
    return _draw(dist, count, _rng.generator(seed, _rng.STREAM_IID))


def spacings_from_points(points) -> np.ndarray:
    """Gaps between 1, the points sorted descending, and 0.

    For points sorted as X(1) >= X(2) >= ... this returns
    ``1 - X(1), X(1) - X(2), ..., X(K-1)``.
    """
    x = np.sort(np.asarray(points, dtype=float))[::-1]
    edges = np.concatenate(([1.0], x, [0.0]))
    return edges[:-1] - edges[1:]


def make_spacings(dist: SpacingDistribution, K: int, seed: int) -> Spacings:
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    if dist.kind is Kind.EQUAL:
        return Spacings(np.full(K, 1.0 / K), seed, dist)
    if dist.kind is Kind.EXPLICIT:
        if len(dist.values) != K:
            raise ValueError(f"explicit list has {len(dist.values)} values, K={K}")
        return Spacings(np.array(dist.values), seed, dist)
    for attempt in range(MAX_ATTEMPTS):
        gen = _rng.generator(seed, _rng.STREAM_SPACINGS, K, attempt)
        d = spacings_from_points(_draw(dist, K - 1, gen))
        # tied points give a zero gap; redraw from the next substream
        if np.all(d > 0):
            return Spacings(d, seed, dist)
    raise RuntimeError(f"no tie-free draw in {MAX_ATTEMPTS} attempts (K={K})")


def load_spacings(path) -> SpacingDistribution:
    """Read a one-column text file of spacings (``#`` starts a comment)."""
    vals = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                vals.append(float(line))
    return SpacingDistribution.explicit(vals)
