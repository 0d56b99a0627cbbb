"""Word-probability ensembles of the monkey model.

A word is a tuple of 1-based letter indices; the empty tuple is the bare
space.  Probabilities are carried as natural logs throughout, since long
words underflow doubles.

Ranking order is: log probability descending, then shorter words first,
then letter-index sequences lexicographically.  Word log probabilities are
``fsum`` of the letter logs plus ``ln s``, so words that are permutations
of each other tie exactly rather than up to rounding.
"""

from __future__ import annotations

import csv
import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import budget
from .keyboard import Keyboard

# rough Python-object cost of one heap entry / output row
TOPK_ENTRY_BYTES = 320
# float64 value + int8 length + sort scratch
CUTOFF_ENTRY_BYTES = 32

LOG_EPS = 1e-12

Word = tuple


def render_word(word: Sequence[int]) -> str:
    return "-".join(map(str, word)) if word else "_"


def parse_word(text: str) -> tuple[int, ...]:
    text = text.strip()
    if text in ("_", ""):
        return ()
    return tuple(int(p) for p in text.split("-"))


def _check_word(kb: Keyboard, word: Sequence[int]) -> None:
    for i in word:
        if not 1 <= i <= kb.K:
            raise IndexError(f"letter index {i} outside 1..{kb.K}")


def prefix_log_prob(kb: Keyboard, word: Sequence[int]) -> float:
    """Sum of ``ln q_i`` over the letters of ``word`` (no space)."""
    lnq = kb.log_letters
    return math.fsum([lnq[i - 1] for i in word])


def word_log_prob(kb: Keyboard, word: Sequence[int]) -> float:
    _check_word(kb, word)
    return prefix_log_prob(kb, word) + kb.log_space


def sort_key(log_prob: float, word: Sequence[int]):
    return (-log_prob, len(word), tuple(word))


@dataclass(frozen=True, eq=False)
class RankedEnsemble:
    words: list
    log_probs: np.ndarray
    fingerprint: str

    def __len__(self):
        return len(self.words)

    @property
    def ranks(self) -> np.ndarray:
        return np.arange(1, len(self.words) + 1)

    @property
    def lengths(self) -> np.ndarray:
        return np.fromiter((len(w) for w in self.words), dtype=np.int64, count=len(self.words))

    def entries(self):
        for r, (w, lp) in enumerate(zip(self.words, self.log_probs), start=1):
            yield r, w, float(lp)


def top_k(kb: Keyboard, k: int) -> RankedEnsemble:
    """The k most probable words of the infinite ensemble, in rank order.

    Best-first search over the letter tree.  Letters are pre-sorted by
    (probability desc, index asc); a popped node pushes only its best child
    and its next sibling in that order, so the heap holds O(k) entries and
    every node is pushed by a node that precedes it in rank order.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    budget.check(3 * k, TOPK_ENTRY_BYTES, f"top_k(k={k})")
    K = kb.K
    lnq = [float(v) for v in kb.log_letters]
    order = sorted(range(K), key=lambda i: (-lnq[i], i))
    letter_at = [i + 1 for i in order]
    ln_s = kb.log_space
    fsum = math.fsum
    push, pop = heapq.heappush, heapq.heappop

    # entries: (-prefix logprob, length, word, logs, position of last letter in `order`)
    heap = [(-0.0, 0, (), (), -1)]
    words: list = []
    logp = np.empty(k)
    while len(words) < k:
        neg, n, word, logs, pos = pop(heap)
        logp[len(words)] = -neg + ln_s
        words.append(word)
        child_logs = logs + (lnq[order[0]],)
        push(heap, (-fsum(child_logs), n + 1, word + (letter_at[0],), child_logs, 0))
        if n and pos + 1 < K:
            sib_logs = logs[:-1] + (lnq[order[pos + 1]],)
            push(heap, (-fsum(sib_logs), n, word[:-1] + (letter_at[pos + 1],), sib_logs, pos + 1))
    return RankedEnsemble(words, logp, kb.fingerprint())


def brute_force_top(kb: Keyboard, k: int, max_len: int) -> RankedEnsemble:
    """Exhaustive enumeration of words up to ``max_len`` letters, sorted and truncated.

    Reference implementation for small keyboards only.
    """
    from itertools import product
    items = []
    for n in range(max_len + 1):
        for word in product(range(1, kb.K + 1), repeat=n):
            items.append((word_log_prob(kb, word), word))
    items.sort(key=lambda it: sort_key(*it))
    items = items[:k]
    return RankedEnsemble([w for _, w in items], np.array([lp for lp, _ in items]),
                          kb.fingerprint())


@dataclass(frozen=True, eq=False)
class CutoffEnsemble:
    """All word log-probabilities for words of at most ``n`` letters.

    Within each length block, values are in lexicographic word order.
    """
    n: int
    K: int
    space: float
    log_probs: np.ndarray
    lengths: np.ndarray
    fingerprint: str
    _sorted: list = field(default_factory=list, repr=False)

    @property
    def N(self) -> int:
        return len(self.log_probs)

    def sorted_desc(self) -> np.ndarray:
        if not self._sorted:
            self._sorted.append(np.sort(self.log_probs)[::-1])
        return self._sorted[0]

    def length_slice(self, i: int) -> np.ndarray:
        start = (self.K**i - 1) // (self.K - 1)
        return self.log_probs[start:start + self.K**i]

    def word_at(self, index: int) -> tuple[int, ...]:
        """Decode a position in :attr:`log_probs` back into its word."""
        i = int(self.lengths[index])
        offset = index - (self.K**i - 1) // (self.K - 1)
        letters = []
        for _ in range(i):
            offset, d = divmod(offset, self.K)
            letters.append(d + 1)
        return tuple(reversed(letters))

    def length_mass(self) -> np.ndarray:
        return np.array([math.fsum(np.exp(self.length_slice(i))) for i in range(self.n + 1)])


def cutoff_size(K: int, n: int) -> int:
    return (K ** (n + 1) - 1) // (K - 1)


def enumerate_cutoff(kb: Keyboard, n: int) -> CutoffEnsemble:
    if n < 0:
        raise ValueError("n must be >= 0")
    N = cutoff_size(kb.K, n)
    budget.check(N, CUTOFF_ENTRY_BYTES, f"enumerate_cutoff(K={kb.K}, n={n})")
    lnq = np.asarray(kb.log_letters)
    levels = [np.zeros(1)]
    for _ in range(n):
        # row-major outer sum keeps words in lexicographic order
        levels.append((levels[-1][:, None] + lnq[None, :]).ravel())
    logp = np.concatenate(levels) + kb.log_space
    lengths = np.repeat(np.arange(n + 1, dtype=np.int8), [len(lv) for lv in levels])
    logp.setflags(write=False)
    return CutoffEnsemble(n, kb.K, kb.space, logp, lengths, kb.fingerprint())


def tail_inheritance_check(top: RankedEnsemble, cut: CutoffEnsemble,
                           eps: float = LOG_EPS) -> tuple[int, int]:
    """Compare ranked cutoff values against the infinite-ensemble top list.

    Returns ``(max_equal_rank, violations)`` over ranks up to
    ``min(len(top), cut.N)``.
    """
    if top.fingerprint != cut.fingerprint:
        raise ValueError("ensembles come from different keyboards")
    m = min(len(top), cut.N)
    a = np.asarray(top.log_probs[:m])
    b = cut.sorted_desc()[:m]
    violations = int(np.count_nonzero(b > a + eps))
    mismatch = np.flatnonzero(np.abs(a - b) > eps)
    max_equal = int(mismatch[0]) if len(mismatch) else m
    return max_equal, violations


def write_ranked_csv(path, ens: RankedEnsemble, meta_lines: Iterable[str] = ()) -> None:
    ln10 = math.log(10.0)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in meta_lines:
            fh.write(line + "\n")
        w = csv.writer(fh)
        w.writerow(["rank", "length", "word", "log10_prob", "log10_rank"])
        for r, word, lp in ens.entries():
            w.writerow([r, len(word), render_word(word), repr(lp / ln10), repr(math.log10(r))])


def read_ranked_csv(path) -> tuple[list, np.ndarray]:
    words, vals = [], []
    with open(path, encoding="utf-8") as fh:
        rows = csv.DictReader(line for line in fh if not line.startswith("#"))
        for row in rows:
            words.append(parse_word(row["word"]))
            vals.append(float(row["log10_prob"]) * math.log(10.0))
    return words, np.array(vals)
