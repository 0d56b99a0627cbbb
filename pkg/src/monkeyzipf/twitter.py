"""Monkey Twitter: fixed-length random messages parsed into words.

Characters are coded 0 for the space and 1..K for letters.  Each message is
exactly ``message_length`` characters; a trailing run of letters with no
closing space is a non-word and is discarded.

Words are counted by an integer id: the letter indices read as a
bijective base-K numeral (empty word = 0), which is unique across lengths.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import budget
from . import rng as _rng
from .ensemble import CutoffEnsemble, sort_key
from .keyboard import Keyboard
from .stats import RankFrequencyTable

BATCH_MESSAGES = 250_000
COUNT_ENTRY_BYTES = 160


@dataclass(frozen=True, eq=False)
class TwitterConfig:
    keyboard: Keyboard
    message_length: int
    num_messages: int
    seed: int = 0
    shards: int = 1

    def __post_init__(self):
        if self.message_length < 1:
            raise ValueError("message_length must be >= 1")
        if self.num_messages < 1:
            raise ValueError("num_messages must be >= 1")
        if self.shards < 1:
            raise ValueError("shards must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def n(self) -> int:
        """Longest word that fits, in letters."""
        return self.message_length - 1


@dataclass(eq=False)
class SampleResult:
    counts: dict
    total_words: int
    discarded_nonwords: int
    num_messages: int
    message_length: int
    fingerprint: str
    seed: int
    parse_violations: int = 0
    nonword_chars: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def distinct_words(self) -> int:
        return len(self.counts)


# -- single-message reference parser -------------------------------------------

def parse_message(codes) -> tuple[list[tuple[int, ...]], tuple[int, ...]]:
    """Split one coded message into its words and its trailing non-word.

    >>> parse_message([1, 0, 2, 2])
    ([(1,)], (2, 2))
    >>> parse_message([0, 0])
    ([(), ()], ())
    """
    words, cur = [], []
    for c in codes:
        c = int(c)
        if c == 0:
            words.append(tuple(cur))
            cur = []
        else:
            cur.append(c)
    return words, tuple(cur)


# -- word ids -------------------------------------------------------------------

def word_id(word, K: int) -> int:
    i = 0
    for d in word:
        i = i * K + d
    return i


def decode_ids(ids: np.ndarray, K: int) -> list[tuple[int, ...]]:
    ids = np.asarray(ids, dtype=np.int64).copy()
    digits = []
    while np.any(ids > 0):
        d = np.where(ids > 0, (ids - 1) % K + 1, 0)
        digits.append(d)
        ids = (ids - d) // K
    if not digits:
        return [()] * len(ids)
    mat = np.stack(digits[::-1], axis=1)
    return [tuple(int(v) for v in row if v) for row in mat]


def _ids_fit(K: int, max_len: int) -> bool:
    # largest id has max_len digits equal to K
    return sum(K ** j for j in range(1, max_len + 1)) < 2**62


# -- generation and parsing -----------------------------------------------------

def _cumulative(kb: Keyboard) -> np.ndarray:
    cum = np.cumsum(np.concatenate(([kb.space], kb.letters)))
    cum[-1] = 1.0
    return cum


def draw_messages(kb: Keyboard, count: int, length: int, gen: np.random.Generator) -> np.ndarray:
    u = gen.random((count, length))
    codes = np.searchsorted(_cumulative(kb), u, side="right")
    np.minimum(codes, kb.K, out=codes)
    return codes.astype(np.int16 if kb.K < 2**15 else np.int32)


def _parse_batch(codes: np.ndarray, K: int):
    """Vectorised parse: returns (word ids, nonword count, nonword chars, violations)."""
    m, L = codes.shape
    acc = np.zeros(m, dtype=np.int64)
    run = np.zeros(m, dtype=np.int64)
    consumed = np.zeros(m, dtype=np.int64)
    emitted = []
    for j in range(L):
        c = codes[:, j]
        sp = c == 0
        emitted.append(acc[sp])
        consumed[sp] += run[sp] + 1
        acc = np.where(sp, 0, acc * K + c)
        run = np.where(sp, 0, run + 1)
    violations = int(np.count_nonzero(consumed + run != L))
    ids = np.concatenate(emitted) if emitted else np.zeros(0, dtype=np.int64)
    return ids, int(np.count_nonzero(run)), int(run.sum()), violations


def _parse_batch_slow(codes: np.ndarray):
    counter = Counter()
    nonwords = nonword_chars = violations = 0
    L = codes.shape[1]
    for row in codes:
        words, tail = parse_message(row)
        counter.update(words)
        if tail:
            nonwords += 1
            nonword_chars += len(tail)
        if sum(len(w) + 1 for w in words) + len(tail) != L:
            violations += 1
    return counter, nonwords, nonword_chars, violations


def _merge_ids(ids_list, counts_list):
    if not ids_list:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    ids = np.concatenate(ids_list)
    cnt = np.concatenate(counts_list)
    uniq, inv = np.unique(ids, return_inverse=True)
    return uniq, np.bincount(inv, weights=cnt, minlength=len(uniq)).astype(np.int64)


def _run_shard(args):
    kb, length, count, seed, shard = args
    gen = _rng.generator(seed, _rng.STREAM_TWITTER, shard)
    fast = _ids_fit(kb.K, length)
    ids_list, cnt_list = [], []
    counter = Counter()
    nonwords = nonword_chars = violations = 0
    done = 0
    while done < count:
        b = min(BATCH_MESSAGES, count - done)
        codes = draw_messages(kb, b, length, gen)
        if fast:
            ids, nw, nwc, viol = _parse_batch(codes, kb.K)
            u, c = np.unique(ids, return_counts=True)
            ids_list.append(u)
            cnt_list.append(c)
        else:
            part, nw, nwc, viol = _parse_batch_slow(codes)
            counter.update(part)
        nonwords += nw
        nonword_chars += nwc
        violations += viol
        done += b
    if fast:
        ids, cnt = _merge_ids(ids_list, cnt_list)
        counter = Counter(dict(zip(decode_ids(ids, kb.K), (int(c) for c in cnt))))
    return counter, nonwords, nonword_chars, violations


def run_experiment(cfg: TwitterConfig, workers: int = 1) -> SampleResult:
    """Type ``num_messages`` messages and count the words.

    Shard ``i`` draws from its own substream, so the result depends only on
    ``(seed, num_messages, shards)``; ``workers`` only changes wall time.
    """
    kb = cfg.keyboard
    budget.check(min(cfg.num_messages * cfg.message_length,
                     sum(kb.K ** i for i in range(cfg.message_length))),
                 COUNT_ENTRY_BYTES, "twitter word counts")
    base, extra = divmod(cfg.num_messages, cfg.shards)
    jobs = [(kb, cfg.message_length, base + (1 if i < extra else 0), cfg.seed, i)
            for i in range(cfg.shards)]
    jobs = [j for j in jobs if j[2] > 0]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_run_shard, jobs))
    else:
        parts = [_run_shard(j) for j in jobs]
    counts = Counter()
    nonwords = nonword_chars = violations = 0
    for c, nw, nwc, v in parts:
        counts.update(c)
        nonwords += nw
        nonword_chars += nwc
        violations += v
    return SampleResult(
        counts=dict(counts), total_words=sum(counts.values()), discarded_nonwords=nonwords,
        num_messages=cfg.num_messages, message_length=cfg.message_length,
        fingerprint=kb.fingerprint(), seed=cfg.seed, parse_violations=violations,
        nonword_chars=nonword_chars)


# -- summaries ------------------------------------------------------------------

@dataclass(frozen=True)
class LNRESummary:
    observed_types: int
    zero_class: int
    mass_covered: float


def lnre_summary(res: SampleResult, cut: CutoffEnsemble) -> LNRESummary:
    if res.fingerprint != cut.fingerprint or res.message_length - 1 != cut.n:
        raise ValueError("sample and cutoff ensemble come from different configurations")
    K = cut.K
    idx = np.fromiter((_cutoff_index(w, K) for w in res.counts), dtype=np.int64,
                      count=len(res.counts))
    p = np.exp(cut.log_probs)
    covered = math.fsum(p[idx]) / math.fsum(p)
    return LNRESummary(res.distinct_words, cut.N - res.distinct_words, covered)


def _cutoff_index(word, K: int) -> int:
    # position of `word` in CutoffEnsemble.log_probs (length blocks, lexicographic inside)
    offset = (K ** len(word) - 1) // (K - 1)
    i = 0
    for d in word:
        i = i * K + (d - 1)
    return offset + i


def ranked_words(res: SampleResult) -> list[tuple[tuple[int, ...], int]]:
    return sorted(res.counts.items(), key=lambda wc: sort_key(wc[1], wc[0]))


def sample_rank_table(res: SampleResult) -> RankFrequencyTable:
    if not res.counts:
        raise ValueError("empty sample")
    items = ranked_words(res)
    return RankFrequencyTable.from_values([c for _, c in items], "sample",
                                          labels=[w for w, _ in items])


def space_start_rate(res: SampleResult) -> tuple[float, int]:
    """Share of word-starting positions that hold a space, with the number of such positions.

    Every word and every non-word begins at a word-starting position, and the
    character there is a space with probability s independently of the past.
    """
    trials = res.total_words + res.discarded_nonwords
    return res.counts.get((), 0) / trials, trials


def expected_word_share(kb: Keyboard, word, message_length: int) -> float:
    """Limit of ``count(word) / total_words`` as the number of messages grows.

    A word of j letters can start at position 0 or after any space, and must
    end inside the message, so its expected count per message is
    ``P(word) * (1 + s * (L - 1 - j))``; the expected number of words per
    message is ``L * s``.
    """
    from .ensemble import word_log_prob
    L, j, s = message_length, len(word), kb.space
    if j > L - 1:
        return 0.0
    return math.exp(word_log_prob(kb, word)) * (1.0 + s * (L - 1 - j)) / (L * s)


def max_share_deviation(res: SampleResult, kb: Keyboard, words) -> float:
    return max(abs(res.counts.get(w, 0) / res.total_words
                   - expected_word_share(kb, w, res.message_length)) for w in words)
