"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v``; the summary lines
are printed even under output capture.
"""

import json
import math
import statistics
import subprocess
import sys
import time

import numpy as np
import pytest

from monkeyzipf import twitter as tw
from monkeyzipf.cli import DEFAULT_SEED
from monkeyzipf.ensemble import brute_force_top, enumerate_cutoff, top_k
from monkeyzipf.keyboard import (Keyboard, fibonacci_beta, log_moments, make_keyboard,
                                 mean_log_letter, miller_beta, shao_hahn_limit,
                                 shao_hahn_statistic, solve_beta)
from monkeyzipf.spacings import BETA32, EQUAL, TRIANGULAR, UNIFORM, make_spacings
from monkeyzipf.stats import (entropy_oracle, fit_tail_slope, normality_report, tail_mass,
                              RankFrequencyTable)

S = 0.18


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n:>2}] {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def median_time(fn, repeats=200):
    fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def uniform_keyboard(K, seed=DEFAULT_SEED, s=S):
    return make_keyboard(make_spacings(UNIFORM, K, seed), s)


# 1 ---------------------------------------------------------------------------

def test_c01_miller_exponent(report):
    kb = Keyboard.equal(26, S)
    beta = solve_beta(kb).beta
    closed = 1 - math.log(0.82) / math.log(26)
    dt = median_time(lambda: solve_beta(kb))
    ok = abs(beta - 1.0609) <= 5e-3 and abs(beta - closed) <= 1e-10 and dt < 1e-3
    report(1, ok, f"beta={beta:.6f} closed form={closed:.6f} median time={dt * 1e3:.3f} ms")


# 2 ---------------------------------------------------------------------------

def test_c02_fibonacci_closed_form(report):
    errs, times = [], []
    for q1 in (0.3, 0.5, 0.6):
        kb = Keyboard(np.array([q1, q1 * q1]), 1 - q1 - q1 * q1)
        errs.append(abs(solve_beta(kb).beta - fibonacci_beta(q1)))
        times.append(median_time(lambda: solve_beta(kb)))
    ok = max(errs) <= 1e-9 and max(times) < 1e-3
    report(2, ok, f"max |error|={max(errs):.2e} slowest median time={max(times) * 1e3:.3f} ms")


# 3 ---------------------------------------------------------------------------

def test_c03_am_gm(report):
    kinds = [EQUAL, UNIFORM, BETA32, TRIANGULAR]
    Ks = np.random.default_rng(DEFAULT_SEED).integers(2, 65, size=100)
    t0 = time.perf_counter()
    worst_gap, worst_equal = -math.inf, 0.0
    for i, K in enumerate(Ks):
        kind = kinds[i % 4]
        kb = make_keyboard(make_spacings(kind, int(K), i), S)
        gap = mean_log_letter(kb) + solve_beta(kb).beta  # <= 0
        if kind is EQUAL:
            worst_equal = max(worst_equal, abs(gap), abs(mean_log_letter(kb) + miller_beta(int(K), S)))
        else:
            worst_gap = max(worst_gap, gap)
    dt = time.perf_counter() - t0
    ok = worst_gap < 0 and worst_equal <= 1e-10 and dt < 1.0
    report(3, ok, f"max(m_K + beta) over non-equal={worst_gap:.3e}; "
                  f"equal keyboards |m_K + beta| <= {worst_equal:.1e}; {dt:.3f} s")


# 4 ---------------------------------------------------------------------------

def test_c04_shao_hahn(report):
    targets = {UNIFORM: -0.5772, BETA32: -0.8121, TRIANGULAR: -0.7704}
    t0 = time.perf_counter()
    worst, parts = 0.0, []
    for dist, target in targets.items():
        limit = shao_hahn_limit(entropy_oracle(dist))
        assert abs(limit - target) < 1e-4
        for seed in range(5):
            v = shao_hahn_statistic(make_spacings(dist, 4096, seed))
            worst = max(worst, abs(v - target))
        parts.append(f"{dist.name}: limit {limit:+.4f}")
    dt = time.perf_counter() - t0
    ok = worst < 0.06 and dt < 1.0
    report(4, ok, f"{'; '.join(parts)}; max deviation over seeds 0-4={worst:.4f}; {dt:.3f} s")


# 5 ---------------------------------------------------------------------------

def test_c05_universality_trend(report):
    t0 = time.perf_counter()
    Ks = [8, 32, 128, 512, 2048]
    neg = [-solve_beta(uniform_keyboard(K)).beta for K in Ks]
    dt = time.perf_counter() - t0
    increasing = all(a < b < -1 for a, b in zip(neg, neg[1:]))
    ok = increasing and abs(neg[-1] + 1) < abs(neg[0] + 1) / 3 and dt < 10
    report(5, ok, "-beta = " + ", ".join(f"{v:.4f}" for v in neg) + f"; {dt:.2f} s")


# 6 ---------------------------------------------------------------------------

def exhaustive_top(kb, k):
    """Every word above a falling threshold; pruning is exact since letters only lower P."""
    lnq, ln_s = list(kb.log_letters), kb.log_space
    threshold = ln_s
    while True:
        out, stack = [], [()]
        while stack:
            w = stack.pop()
            lp = math.fsum([lnq[i - 1] for i in w]) + ln_s
            if lp >= threshold:
                out.append((lp, w))
                stack.extend(w + (i,) for i in range(1, kb.K + 1))
        if len(out) >= k:
            out.sort(key=lambda it: (-it[0], len(it[1]), it[1]))
            return out[:k]
        threshold -= 0.25


def test_c06_topk_oracle(report):
    t0 = time.perf_counter()
    mismatches, checked_prefix = 0, 0
    for K in (2, 3):
        for seed in range(5):
            kb = uniform_keyboard(K, seed)
            got = top_k(kb, 500)
            want = exhaustive_top(kb, 500)
            if got.words != [w for _, w in want] or \
                    not np.array_equal(got.log_probs, [lp for lp, _ in want]):
                mismatches += 1
            # the literal length <= 8 enumeration is complete above the best 9-letter word
            bound = 9 * max(kb.log_letters) + kb.log_space
            m = int(np.count_nonzero(got.log_probs > bound))
            bf = brute_force_top(kb, 500, max_len=8)
            if bf.words[:m] != got.words[:m]:
                mismatches += 1
            checked_prefix += m
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and dt < 5
    report(6, ok, f"10 keyboards, {mismatches} mismatches; "
                  f"{checked_prefix} ranks also matched the length<=8 enumeration; {dt:.2f} s")


# 7 ---------------------------------------------------------------------------

_FIG2_CHILD = """
import json, resource, time
from monkeyzipf.ensemble import top_k
from monkeyzipf.keyboard import make_keyboard, solve_beta
from monkeyzipf.spacings import SpacingDistribution, make_spacings
from monkeyzipf.stats import RankFrequencyTable, fit_tail_slope
out = {}
for name in ("equal", "uniform", "beta32", "triangular"):
    kb = make_keyboard(make_spacings(SpacingDistribution.parse(name), 26, %d), 0.18)
    t0 = time.perf_counter()
    top = top_k(kb, 475255)
    dt = time.perf_counter() - t0
    fit = fit_tail_slope(RankFrequencyTable.from_ranked(top), 100, 100000)
    out[name] = (dt, solve_beta(kb).beta, fit.slope)
out["maxrss"] = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024
print(json.dumps(out))
"""


@pytest.mark.slow
def test_c07_figure2_scale(report):
    res = json.loads(subprocess.run([sys.executable, "-c", _FIG2_CHILD % DEFAULT_SEED],
                                    check=True, capture_output=True, text=True).stdout)
    rss = res.pop("maxrss")
    worst_time = max(v[0] for v in res.values())
    offsets = {k: v[2] + v[1] for k, v in res.items()}
    ok = worst_time < 60 and rss < 2 * 1024**3 and all(abs(o) <= 0.08 for o in offsets.values())
    report(7, ok, f"slowest top_k={worst_time:.1f} s, peak RSS={rss / 2**20:.0f} MiB; slope + beta: "
                  + ", ".join(f"{k} {o:+.4f}" for k, o in offsets.items()))


# 8 ---------------------------------------------------------------------------

def test_c08_cutoff_conservation(report, cut_uniform26):
    cut = cut_uniform26
    counts = [len(cut.length_slice(i)) for i in range(5)]
    rel = max(abs(math.fsum(np.exp(cut.length_slice(i))) / ((1 - S) ** i * S) - 1) for i in range(5))
    total = abs(math.fsum(np.exp(cut.log_probs)) - (1 - 0.82**5))
    ok = counts == [1, 26, 676, 17576, 456976] and rel <= 1e-9 and total <= 1e-9
    report(8, ok, f"counts={counts}; max relative mass error={rel:.1e}; total error={total:.1e}")


# 9 ---------------------------------------------------------------------------

def test_c09_tail_mass(report, cut_uniform26):
    v = tail_mass(cut_uniform26, 100_000)
    report(9, abs(v - 0.974) <= 0.01, f"tail_mass(1e5)={v:.4f} at seed {DEFAULT_SEED}")


# 10 --------------------------------------------------------------------------

def test_c10_central_normality(report, uniform26, cut_uniform26):
    d4 = normality_report(cut_uniform26, uniform26).deviation
    kb10 = uniform_keyboard(10)
    d = {n: normality_report(enumerate_cutoff(kb10, n), kb10).deviation for n in (3, 4, 5)}
    ok = d4 <= 0.2 and d[5] < d[3]
    report(10, ok, f"K=26 n=4 deviation={d4:.4f}; K=10 n=3,4,5: "
                   + ", ".join(f"{d[n]:.4f}" for n in (3, 4, 5)))


# 11 --------------------------------------------------------------------------

def test_c11_moment_identities(report):
    worst = 0.0
    for K in (3, 10, 26):
        kb = uniform_keyboard(K)
        mu, var = log_moments(kb)
        cut = enumerate_cutoff(kb, 5)
        for n in range(1, 6):
            sl = cut.length_slice(n)
            worst = max(worst, abs(sl.mean() - (n * mu + kb.log_space)), abs(sl.var() - n * var))
    report(11, worst <= 1e-9, f"max moment error={worst:.2e}")


# 12 --------------------------------------------------------------------------

@pytest.mark.slow
def test_c12_twitter(report, uniform26):
    t0 = time.perf_counter()
    big = tw.run_experiment(tw.TwitterConfig(uniform26, 5, 1_000_000, seed=DEFAULT_SEED))
    dt = time.perf_counter() - t0
    words = top_k(uniform26, 10).words
    devs, violations = [], big.parse_violations
    for m in (1_000, 100_000, 10_000_000):
        res = tw.run_experiment(tw.TwitterConfig(uniform26, 5, m, seed=DEFAULT_SEED))
        violations += res.parse_violations
        devs.append(tw.max_share_deviation(res, uniform26, words))
    ok = dt < 60 and violations == 0 and devs[0] > devs[1] > devs[2]
    report(12, ok, f"1e6 messages in {dt:.2f} s; parse violations={violations}; max top-10 "
                   "deviation at 1e3/1e5/1e7: " + ", ".join(f"{v:.5f}" for v in devs))
