from __future__ import annotations

import pytest
from hypothesis import given, settings

from conftest import lts_with_pair, small_lts
from hmldist.equivalences import (
    INF,
    DirDistTable,
    dirdist,
    dist,
    hat_splpairs,
    nested_sim_holds,
    refine_sequence,
    split_on,
    splpairs,
)
from hmldist.lts import Lts, gen_chain_a, gen_example_m, gen_ladder_b
from hmldist.oracle import naive_dirdist, naive_dist, naive_kbisim, naive_nested_sim


def _relation(seq, i, n):
    return {(s, t) for s in range(n) for t in range(n) if seq.same(i, s, t)}


def test_chain_levels():
    seq = refine_sequence(gen_chain_a(3))
    assert seq.K == 3
    assert seq.blocks(0) == [[0, 1, 2, 3]]
    assert sorted(seq.blocks(1)) == [[0], [1, 2, 3]]
    assert sorted(seq.blocks(3)) == [[0], [1], [2], [3]]
    assert seq.blocks(10) == seq.blocks(3)


def test_empty_and_single_state():
    assert refine_sequence(Lts(0, [], [])).K == 0
    seq = refine_sequence(Lts(1, ["a"], [(0, 0, 0)]))
    assert seq.K == 0
    assert dist(seq, 0, 0) == INF


@pytest.mark.parametrize("n", range(1, 13))
def test_chain_dist(n):
    seq = refine_sequence(gen_chain_a(n))
    assert dist(seq, n, n - 1) == n


@pytest.mark.parametrize("n", range(1, 7))
def test_ladder_dist(n):
    lts = gen_ladder_b(n)
    seq = refine_sequence(lts)
    assert dist(seq, n, 2 * n + 1) == n + 1


def test_example_m_dist():
    seq = refine_sequence(gen_example_m())
    assert dist(seq, 0, 1) == 1


def test_split_on():
    lts = gen_example_m()
    assert split_on(lts, {0, 1, 2}, 0, {1, 2}) == {0, 1}
    assert split_on(lts, {0, 1, 2}, 1, {1}) == set()


@settings(max_examples=200)
@given(small_lts(max_states=7))
def test_levels_equal_naive_kbisim(lts):
    seq = refine_sequence(lts)
    depth = seq.K + 2
    naive = naive_kbisim(lts, depth)
    for i in range(depth + 1):
        assert _relation(seq, i, lts.num_states) == set(naive[i])


@given(small_lts())
def test_levels_refine_monotonically(lts):
    seq = refine_sequence(lts)
    n = lts.num_states
    for i in range(seq.K):
        assert _relation(seq, i + 1, n) < _relation(seq, i, n)


@given(lts_with_pair())
def test_dist_matches_naive(args):
    lts, s, t = args
    assert dist(refine_sequence(lts), s, t) == naive_dist(lts, s, t)
    assert dist(refine_sequence(lts), s, t) == dist(refine_sequence(lts), t, s)


@settings(max_examples=200)
@given(lts_with_pair())
def test_some_direction_has_split_pairs(args):
    """Non-equivalent states at level i have a distinguishing observation in one direction."""
    lts, s, t = args
    seq = refine_sequence(lts)
    for i in range(1, seq.K + 1):
        if not seq.same(i, s, t):
            assert splpairs(lts, seq, i, s, t) or splpairs(lts, seq, i, t, s)


@settings(max_examples=150)
@given(lts_with_pair(max_states=5))
def test_dirdist_matches_nested_similarity(args):
    lts, s, t = args
    seq = refine_sequence(lts)
    table = DirDistTable()
    for i in range(seq.K + 2):
        assert dirdist(lts, seq, table, i, s, t) == naive_dirdist(lts, i, s, t)


@settings(max_examples=150)
@given(lts_with_pair(max_states=5))
def test_nested_sim_holds_matches_naive(args):
    lts, s, t = args
    seq = refine_sequence(lts)
    table = DirDistTable()
    for i in range(seq.K + 1):
        for m in range(i + 2):
            rel = naive_nested_sim(lts, i, m)
            assert nested_sim_holds(lts, seq, table, i, m, s, t) == ((s, t) in rel)


@settings(max_examples=150)
@given(lts_with_pair(max_states=5))
def test_hat_split_pairs_nonempty(args):
    """If s is not j-nested i-similarity included in t, an admissible observation exists one way."""
    lts, s, t = args
    seq = refine_sequence(lts)
    table = DirDistTable()
    for i in range(1, seq.K + 1):
        for j in range(i + 1):
            if (s, t) in naive_nested_sim(lts, i, j):
                continue
            forward = hat_splpairs(lts, seq, table, i, j, s, t)
            backward = hat_splpairs(lts, seq, table, i, j - 1, t, s) if j > 0 else set()
            assert forward or backward


@settings(max_examples=100)
@given(small_lts(max_states=5))
def test_nested_inclusion_swaps_with_one_less_nesting(lts):
    """s included in t with m >= 1 nestings implies t included in s with m - 1."""
    n = lts.num_states
    for k in range(4):
        for m in range(1, 4):
            rel = naive_nested_sim(lts, k, m)
            lower = naive_nested_sim(lts, k, m - 1)
            for s in range(n):
                for t in range(n):
                    if (s, t) in rel:
                        assert (t, s) in lower


def test_dirdist_on_ladder():
    for n in range(1, 7):
        lts = gen_ladder_b(n)
        seq = refine_sequence(lts)
        table = DirDistTable()
        x, y = n, 2 * n + 1
        k = n + 1
        forward, backward = dirdist(lts, seq, table, k, x, y), dirdist(lts, seq, table, k, y, x)
        assert min(forward, backward) == n
        assert max(forward, backward) == n + 1


def test_to_json():
    data = refine_sequence(gen_chain_a(2)).to_json()
    assert data["K"] == 2
    assert data["levels"]["0"] == [[0, 1, 2]]


@settings(max_examples=150)
@given(small_lts(max_states=7))
def test_refine_step_never_separates_equivalent_states(lts):
    """States that are (i+1)-bisimilar stay in one block through Refine(pi_i).

    Splits inside a step are never undone, so checking the result of the step
    covers every intermediate partition too.
    """
    seq = refine_sequence(lts)
    naive = naive_kbisim(lts, seq.K + 1)
    for i in range(seq.K + 1):
        for s, t in naive[i + 1]:
            assert seq.same(i + 1, s, t)
