"""Analyses of ranked probabilities, cutoff ensembles and samples."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ensemble import CutoffEnsemble, RankedEnsemble
from .keyboard import Keyboard, log_moments
from .spacings import Kind, SpacingDistribution, density

LN10 = math.log(10.0)


# -- rank/frequency tables ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class RankFrequencyTable:
    """Values by rank (1-based, consecutive), stored as log10.

    ``source`` is ``"model"`` for probabilities, ``"sample"`` or ``"corpus"``
    for counts.
    """
    log10_values: np.ndarray
    source: str = "model"
    labels: list | None = None

    def __post_init__(self):
        v = np.asarray(self.log10_values, dtype=float)
        object.__setattr__(self, "log10_values", v)
        if v.ndim != 1:
            raise ValueError("table values must be one-dimensional")
        if len(v) > 1 and np.any(np.diff(v) > 1e-12):
            raise ValueError("table values must be non-increasing in rank")
        if self.labels is not None and len(self.labels) != len(v):
            raise ValueError("labels and values differ in length")

    def __len__(self):
        return len(self.log10_values)

    @property
    def ranks(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)

    @property
    def values(self) -> np.ndarray:
        return 10.0 ** self.log10_values

    @classmethod
    def from_values(cls, values, source="sample", labels=None):
        return cls(np.log10(np.asarray(values, dtype=float)), source, labels)

    @classmethod
    def from_log_probs(cls, log_probs, source="model", labels=None):
        return cls(np.asarray(log_probs, dtype=float) / LN10, source, labels)

    @classmethod
    def from_ranked(cls, ens: RankedEnsemble):
        return cls.from_log_probs(ens.log_probs, "model")

    @classmethod
    def from_cutoff(cls, cut: CutoffEnsemble):
        return cls.from_log_probs(cut.sorted_desc(), "model")

    def rows(self):
        for r, v in zip(self.ranks, self.log10_values):
            yield int(r), repr(math.log10(r)), repr(float(v))


RANK_TABLE_HEADER = ("rank", "log10_rank", "log10_value")


@dataclass(frozen=True)
class TailFit:
    slope: float
    intercept: float
    r_squared: float
    fit_range: tuple[int, int]


def midranks(log10_values: np.ndarray) -> np.ndarray:
    """Average rank of each run of equal values (1-based)."""
    v = np.asarray(log10_values)
    brk = np.flatnonzero(v[1:] != v[:-1]) + 1
    starts = np.concatenate(([0], brk))
    ends = np.concatenate((brk, [len(v)]))
    return np.repeat((starts + 1 + ends) / 2.0, ends - starts)


def fit_tail_slope(t: RankFrequencyTable, lo: int = 10, hi: int = 100_000,
                   ties: str = "midrank") -> TailFit:
    """OLS of log10(value) on log10(rank) over table rows ``lo..hi`` inclusive.

    With ``ties="midrank"`` every member of a run of equal values is placed at
    the run's average rank, so the fit does not depend on how tied words were
    ordered; ``ties="ordinal"`` uses the row numbers as they stand.  Tied runs
    are resolved over the whole table before the ``lo..hi`` rows are selected.
    """
    if lo < 1 or hi > len(t) or hi - lo < 10:
        raise ValueError(f"degenerate fit range [{lo}, {hi}] for a table of {len(t)} rows")
    if ties == "midrank":
        ranks = midranks(t.log10_values)[lo - 1:hi]
    elif ties == "ordinal":
        ranks = np.arange(lo, hi + 1, dtype=float)
    else:
        raise ValueError(f"unknown ties mode {ties!r}")
    x = np.log10(ranks)
    y = t.log10_values[lo - 1:hi]
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0:
        raise ValueError(f"all rows in [{lo}, {hi}] are tied; no slope")
    sxy = np.sum((x - xm) * (y - ym))
    slope = sxy / sxx
    intercept = ym - slope * xm
    ss_res = np.sum((y - intercept - slope * x) ** 2)
    ss_tot = np.sum((y - ym) ** 2)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return TailFit(float(slope), float(intercept), float(r2), (lo, hi))


@dataclass(frozen=True)
class SandwichResult:
    C1: float
    C2: float
    holds: bool

    @property
    def ratio(self) -> float:
        return self.C2 / self.C1 if self.C1 > 0 else math.inf


def sandwich_check(t: RankFrequencyTable, beta: float, r_min: int = 1) -> SandwichResult:
    """Empirical constants with ``C1 r^-beta <= P_r <= C2 r^-beta`` for ranks >= r_min."""
    r = t.ranks[r_min - 1:]
    scaled = t.log10_values[r_min - 1:] + beta * np.log10(r)
    if len(scaled) == 0:
        return SandwichResult(math.nan, math.nan, False)
    c1 = 10.0 ** float(scaled.min())
    c2 = 10.0 ** float(scaled.max())
    return SandwichResult(c1, c2, bool(c1 > 0 and math.isfinite(c2 / c1)))


def tail_mass(cut: CutoffEnsemble, m: int) -> float:
    """Share of total cutoff mass held by the ``m`` largest probabilities."""
    if not 1 <= m <= cut.N:
        raise ValueError(f"m must lie in 1..{cut.N}")
    p = np.exp(cut.sorted_desc())
    return math.fsum(p[:m]) / math.fsum(p)


# -- normal quantiles -------------------------------------------------------

# Acklam's rational approximation (relative error < 1.15e-9), followed by one
# Halley step against math.erfc.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
                / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    if p > 1.0 - _P_LOW:
        return -_acklam(1.0 - p)
    q = p - 0.5
    r = q * q
    return ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))


def norm_ppf(p: float) -> float:
    """Inverse standard normal CDF."""
    if not 0.0 < p < 1.0:
        if p == 0.0:
            return -math.inf
        if p == 1.0:
            return math.inf
        raise ValueError(f"probability {p} outside [0, 1]")
    x = _acklam(p)
    e = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = e * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)


# -- central normality ----------------------------------------------------

DEFAULT_PERCENTILES = np.round(np.arange(1, 1000) / 1000.0, 3)


@dataclass(frozen=True, eq=False)
class NormalityReport:
    percentiles: np.ndarray
    theoretical_z: np.ndarray
    observed_z: np.ndarray
    band: tuple[float, float]
    deviation: float

    def rows(self):
        for p, t, o in zip(self.percentiles, self.theoretical_z, self.observed_z):
            yield repr(float(p)), repr(float(t)), repr(float(o))


QUANTILE_TABLE_HEADER = ("percentile", "theoretical_z", "observed_z")


def standardize(log_probs, n: int, mu1: float, sigma1_sq: float, log_space: float) -> np.ndarray:
    """``(ln P - ln s - n mu1) / sqrt(n sigma1^2)``: the letter part of ln P, centred and scaled."""
    return (np.asarray(log_probs) - log_space - n * mu1) / math.sqrt(n * sigma1_sq)


def normality_report(cut: CutoffEnsemble, kb: Keyboard, band=(0.25, 0.75),
                     percentiles: Sequence[float] | None = None) -> NormalityReport:
    if cut.fingerprint != kb.fingerprint():
        raise ValueError("cutoff ensemble was not built from this keyboard")
    mu1, var1 = log_moments(kb)
    if var1 <= 0:
        raise ValueError("letter probabilities are all equal (sigma1^2 = 0); "
                         "the log-probabilities are not spread")
    lo, hi = band
    if not 0.0 < lo < hi < 1.0:
        raise ValueError(f"bad band {band}")
    ps = np.asarray(DEFAULT_PERCENTILES if percentiles is None else percentiles, dtype=float)
    ps = np.union1d(ps, [lo, hi])
    observed = standardize(np.quantile(cut.log_probs, ps), cut.n, mu1, var1, kb.log_space)
    theoretical = np.array([norm_ppf(p) for p in ps])
    inside = (ps >= lo - 1e-12) & (ps <= hi + 1e-12)
    dev = float(np.max(np.abs(observed[inside] - theoretical[inside])))
    return NormalityReport(ps, theoretical, observed, (lo, hi), dev)


# -- length census ------------------------------------------------------------

@dataclass(frozen=True)
class LengthRow:
    length: int
    count: int
    expected_count: int
    mass: float
    expected_mass: float
    mean_prob: float
    expected_mean_prob: float

    @property
    def ok(self) -> bool:
        return (self.count == self.expected_count
                and abs(self.mass - self.expected_mass) <= 1e-9 * self.expected_mass)


LENGTH_TABLE_HEADER = ("length", "count", "mass", "mean_prob")


def length_law_check(cut: CutoffEnsemble) -> list[LengthRow]:
    s, K = cut.space, cut.K
    rows = []
    mass = cut.length_mass()
    for i in range(cut.n + 1):
        count = len(cut.length_slice(i))
        rows.append(LengthRow(
            length=i, count=count, expected_count=K**i,
            mass=float(mass[i]), expected_mass=(1.0 - s) ** i * s,
            mean_prob=float(mass[i]) / count,
            expected_mean_prob=((1.0 - s) / K) ** i * s,
        ))
    return rows


def length_distribution(K: int, n: int) -> np.ndarray:
    """Counting-measure law of word length over all words of at most n letters.

    ``Prob{len = i} = K^i / N_n`` for ``0 <= i <= n``.
    """
    counts = np.array([K**i for i in range(n + 1)], dtype=float)
    return counts / counts.sum()


# -- differential entropy ---------------------------------------------------

def _neg_h_log_h(dist):
    def f(x):
        h = float(density(dist, x))
        return -h * math.log(h) if h > 0 else 0.0
    return f


def _adaptive_simpson(f, a, b, tol, depth=50):
    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return (rec(a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(m, b, fm, frm, fb, right, tol / 2.0, depth - 1))

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, depth)


def entropy_oracle(dist: SpacingDistribution, tol: float = 1e-10) -> float:
    """Differential entropy ``-int_0^1 h ln h`` by adaptive Simpson quadrature."""
    if not dist.is_continuous:
        raise ValueError(f"{dist.name} spacings have no density")
    f = _neg_h_log_h(dist)
    # split at the triangular kink so each piece is smooth
    return _adaptive_simpson(f, 0.0, 0.5, tol / 2) + _adaptive_simpson(f, 0.5, 1.0, tol / 2)


def entropy_closed_form(dist: SpacingDistribution) -> float:
    if dist.kind is Kind.UNIFORM:
        return 0.0
    if dist.kind is Kind.TRIANGULAR:
        return 0.5 - math.log(2.0)
    if dist.kind is Kind.BETA32:
        # ln B(3,2) - 2 psi(3) - psi(2) + 3 psi(5), with psi(n) = -gamma + H_{n-1};
        # the gamma terms cancel
        h1, h2, h4 = 1.0, 1.5, 25.0 / 12.0
        return -math.log(12.0) - 2.0 * h2 - h1 + 3.0 * h4
    raise ValueError(f"{dist.name} spacings have no density")
