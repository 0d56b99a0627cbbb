"""Keyboards: letter probabilities plus a space probability.

All logarithms are natural; radix-K quantities are converted at the
boundary (``mean_log_letter``).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .spacings import Spacings

SUM_TOL = 1e-12
MAX_ITER = 200
EULER_GAMMA = 0.5772156649015329


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Keyboard:
    letters: np.ndarray
    space: float

    def __post_init__(self):
        q = np.array(self.letters, dtype=float)
        q.setflags(write=False)
        object.__setattr__(self, "letters", q)
        object.__setattr__(self, "space", float(self.space))
        if q.ndim != 1 or len(q) < 2:
            raise ValueError("a keyboard needs at least K=2 letters")
        if not np.all(q > 0):
            raise ValueError("letter probabilities must be strictly positive")
        if not 0.0 < self.space < 1.0:
            raise ValueError(f"space probability must lie in (0, 1), got {self.space}")
        total = math.fsum(q) + self.space
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"letters + space sum to {total!r}, not 1")
        lnq = np.log(q)
        lnq.setflags(write=False)
        object.__setattr__(self, "_log_letters", lnq)

    @property
    def K(self) -> int:
        return len(self.letters)

    @property
    def log_letters(self) -> np.ndarray:
        return self._log_letters

    @property
    def log_space(self) -> float:
        return math.log(self.space)

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(float(self.space).hex().encode())
        for v in self.letters:
            h.update(b"," + float(v).hex().encode())
        return h.hexdigest()[:16]

    def __eq__(self, other):
        if not isinstance(other, Keyboard):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.letters, other.letters)

    __hash__ = None

    @classmethod
    def equal(cls, K: int, s: float) -> "Keyboard":
        return cls(np.full(K, (1.0 - s) / K), s)

    @classmethod
    def from_letters(cls, letters, s: float | None = None) -> "Keyboard":
        """Build from letter probabilities, taking ``s = 1 - sum(letters)`` by default."""
        letters = [float(v) for v in letters]
        if s is None:
            s = 1.0 - math.fsum(letters)
        return cls(np.array(letters), s)


@dataclass(frozen=True)
class ExponentResult:
    beta: float
    residual: float
    iterations: int


def make_keyboard(spacings: Spacings, s: float) -> Keyboard:
    if not 0.0 < s < 1.0:
        raise ValueError(f"space probability must lie in (0, 1), got {s}")
    return Keyboard((1.0 - s) * spacings.values, s)


def solve_beta(kb: Keyboard, tol: float = 1e-12) -> ExponentResult:
    """Power-law exponent: the root beta > 1 of ``sum(q_i ** (1/beta)) = 1``.

    Bisection runs on ``t = 1/beta`` where ``g(t) = sum(q_i ** t) - 1`` is
    strictly decreasing with ``g(0+) = K - 1 > 0`` and ``g(1) = -s < 0``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    lnq = kb.log_letters

    def g(t):
        return math.fsum(np.exp(t * lnq)) - 1.0

    lo, hi = 0.0, 1.0
    g_lo, g_hi = kb.K - 1.0, -kb.space
    it = 0
    while it < MAX_ITER:
        it += 1
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        g_mid = g(mid)
        if g_mid == 0.0:
            lo = hi = mid
            g_lo = g_hi = 0.0
            break
        if g_mid > 0:
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    t, res = (lo, g_lo) if abs(g_lo) <= abs(g_hi) else (hi, g_hi)
    if abs(res) > tol:
        raise SolverError(f"bisection stopped at residual {res:.3e} after {it} iterations")
    return ExponentResult(beta=1.0 / t, residual=res, iterations=it)


def miller_beta(K: int, s: float) -> float:
    if K < 2 or not 0.0 < s < 1.0:
        raise ValueError("need K >= 2 and 0 < s < 1")
    return 1.0 - math.log(1.0 - s) / math.log(K)


def fibonacci_beta(q1: float) -> float:
    """Closed-form exponent for the two-letter keyboard ``(q1, q1**2)``."""
    if not 0.0 < q1 < (math.sqrt(5.0) - 1.0) / 2.0:
        raise ValueError("q1 must lie in (0, (sqrt(5) - 1) / 2)")
    return math.log(q1) / math.log((math.sqrt(5.0) - 1.0) / 2.0)


def mean_log_letter(kb: Keyboard) -> float:
    """Mean of ``log_K q_i`` over the K letters."""
    return math.fsum(kb.log_letters) / (kb.K * math.log(kb.K))


def log_moments(kb: Keyboard) -> tuple[float, float]:
    """Counting-measure mean and (population) variance of ``ln q_i``."""
    lnq = kb.log_letters
    mu = math.fsum(lnq) / kb.K
    var = math.fsum((lnq - mu) ** 2) / kb.K
    return mu, var


def shao_hahn_statistic(sp: Spacings) -> float:
    """``(1/K) * sum(ln(K * D_i))``."""
    K = sp.K
    return math.fsum(np.log(K * sp.values)) / K


def shao_hahn_limit(entropy: float) -> float:
    """Almost-sure limit of :func:`shao_hahn_statistic` for a density with the given differential entropy."""
    return entropy - EULER_GAMMA


def predicted_mean_log_letter(K: int, s: float, entropy: float) -> float:
    """Large-K approximation of ``mean_log_letter`` for broken-stick keyboards."""
    return -1.0 + (shao_hahn_limit(entropy) + math.log(1.0 - s)) / math.log(K)


# -- keyboard file format --------------------------------------------------

def dump_keyboard(kb: Keyboard, fh) -> None:
    fh.write(f"s={kb.space!r}\n")
    for q in kb.letters:
        fh.write(f"{float(q)!r}\n")


def load_keyboard(fh) -> Keyboard:
    lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or not lines[0].startswith("s="):
        raise ValueError("keyboard file must start with an 's=<value>' line")
    s = float(lines[0][2:])
    return Keyboard(np.array([float(v) for v in lines[1:]]), s)
