import itertools
import math

import numpy as np
import pytest

from monkeyzipf import twitter as tw
from monkeyzipf.ensemble import enumerate_cutoff, top_k
from monkeyzipf.keyboard import Keyboard, make_keyboard
from monkeyzipf.spacings import UNIFORM, make_spacings


def test_parse_walkthrough():
    assert tw.parse_message([1, 0, 2, 2]) == ([(1,)], (2, 2))
    assert tw.parse_message([0, 0, 0, 0]) == ([(), (), (), ()], ())
    assert tw.parse_message([3, 3, 3]) == ([], (3, 3, 3))


def test_word_ids_roundtrip():
    words = [(), (1,), (3,), (1, 1), (2, 3, 1), (3, 3, 3, 3)]
    ids = np.array([tw.word_id(w, 3) for w in words])
    assert len(set(ids)) == len(words)
    assert tw.decode_ids(ids, 3) == words


def test_vectorised_parse_matches_reference():
    kb = make_keyboard(make_spacings(UNIFORM, 4, 1), 0.3)
    codes = tw.draw_messages(kb, 5000, 7, np.random.default_rng(0))
    ids, nw, nwc, viol = tw._parse_batch(codes, kb.K)
    ref, rnw, rnwc, rviol = tw._parse_batch_slow(codes)
    u, c = np.unique(ids, return_counts=True)
    assert dict(zip(tw.decode_ids(u, kb.K), c.tolist())) == dict(ref)
    assert (nw, nwc, viol) == (rnw, rnwc, rviol) == (nw, nwc, 0)


def test_config_validation(uniform26):
    for kwargs in ({"message_length": 0, "num_messages": 1}, {"message_length": 5, "num_messages": 0}):
        with pytest.raises(ValueError):
            tw.TwitterConfig(uniform26, **kwargs)


def test_single_space_message():
    kb = Keyboard(np.array([0.5e-12, 0.5e-12]), 1 - 1e-12)
    res = tw.run_experiment(tw.TwitterConfig(kb, 1, 1, seed=0))
    assert res.counts == {(): 1}
    t = tw.sample_rank_table(res)
    assert list(t.ranks) == [1] and list(t.values) == [1.0]


def exact_shares(kb, L):
    """Expected word counts per message, summed over every possible message."""
    probs = [kb.space] + list(kb.letters)
    exp_count, exp_words = {}, 0.0
    for msg in itertools.product(range(kb.K + 1), repeat=L):
        p = math.prod(probs[c] for c in msg)
        words, _ = tw.parse_message(msg)
        exp_words += p * len(words)
        for w in words:
            exp_count[w] = exp_count.get(w, 0.0) + p
    return {w: v / exp_words for w, v in exp_count.items()}


@pytest.mark.parametrize("K,L", [(2, 3), (2, 5), (3, 4)])
def test_expected_share_matches_exhaustive_messages(K, L):
    kb = make_keyboard(make_spacings(UNIFORM, K, 5), 0.27)
    shares = exact_shares(kb, L)
    for w, v in shares.items():
        assert tw.expected_word_share(kb, w, L) == pytest.approx(v, rel=1e-12)
    assert tw.expected_word_share(kb, (1,) * L, L) == 0.0


def test_parse_invariant_and_nonword_bound(uniform26):
    res = tw.run_experiment(tw.TwitterConfig(uniform26, 5, 20_000, seed=4))
    assert res.parse_violations == 0
    assert res.discarded_nonwords <= res.num_messages
    letters = sum(len(w) * c for w, c in res.counts.items())
    assert letters + res.total_words + res.nonword_chars == 5 * res.num_messages
    assert all(len(w) <= 4 for w in res.counts)
    assert sum(res.counts.values()) == res.total_words


def test_bare_space_rate(uniform26):
    res = tw.run_experiment(tw.TwitterConfig(uniform26, 5, 1_000_000, seed=2))
    rate, trials = tw.space_start_rate(res)
    se = math.sqrt(0.18 * 0.82 / trials)
    assert abs(rate - 0.18) < 3 * se
    assert tw.ranked_words(res)[0][0] == ()
    assert top_k(uniform26, 1).words[0] == ()


def test_lnre_partition_and_coverage(uniform26, cut_uniform26):
    res = tw.run_experiment(tw.TwitterConfig(uniform26, 5, 1_000_000, seed=2))
    summ = tw.lnre_summary(res, cut_uniform26)
    assert summ.observed_types + summ.zero_class == cut_uniform26.N
    assert summ.observed_types / cut_uniform26.N < 0.5
    assert summ.mass_covered > 0.9


def test_lnre_small_keyboard_exhausts_types():
    kb = make_keyboard(make_spacings(UNIFORM, 2, 0), 0.3)
    res = tw.run_experiment(tw.TwitterConfig(kb, 3, 200_000, seed=1))
    summ = tw.lnre_summary(res, enumerate_cutoff(kb, 2))
    assert summ.zero_class == 0 and summ.observed_types == 7
    assert summ.mass_covered == pytest.approx(1.0, abs=1e-15)


def test_lnre_rejects_mismatch(uniform26):
    res = tw.run_experiment(tw.TwitterConfig(uniform26, 3, 100, seed=1))
    with pytest.raises(ValueError):
        tw.lnre_summary(res, enumerate_cutoff(uniform26, 3))


def test_determinism_and_sharding(uniform26):
    cfg = tw.TwitterConfig(uniform26, 5, 30_000, seed=9, shards=3)
    a = tw.run_experiment(cfg)
    b = tw.run_experiment(cfg, workers=2)
    assert a.counts == b.counts
    assert np.array_equal(tw.sample_rank_table(a).log10_values, tw.sample_rank_table(b).log10_values)
    c = tw.run_experiment(tw.TwitterConfig(uniform26, 5, 30_000, seed=10, shards=3))
    assert c.counts != a.counts


def test_slow_path_for_huge_ids():
    kb = make_keyboard(make_spacings(UNIFORM, 3, 0), 0.01)
    assert not tw._ids_fit(kb.K, 60)
    res = tw.run_experiment(tw.TwitterConfig(kb, 60, 200, seed=0))
    assert res.parse_violations == 0
    assert sum(res.counts.values()) == res.total_words


def test_share_deviation_shrinks(uniform26):
    words = top_k(uniform26, 10).words
    devs = [tw.max_share_deviation(tw.run_experiment(tw.TwitterConfig(uniform26, 5, m, seed=2)),
                                   uniform26, words) for m in (1_000, 100_000)]
    assert devs[1] < devs[0]
