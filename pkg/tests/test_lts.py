from __future__ import annotations

import pytest
from hypothesis import given

from conftest import small_lts
from hmldist.lts import (
    AutParseError,
    Lts,
    gen_chain_a,
    gen_example_m,
    gen_ladder_b,
    has_trace,
    mask_to_set,
    parse_aut,
    random_lts,
    set_to_mask,
    traces_up_to,
    write_aut,
)


def test_parse_simple_aut():
    lts = parse_aut("des (0,2,3)\n(0,a,1)\n(1,\"b c\",2)\n")
    assert lts.num_states == 3
    assert lts.actions == ("a", "b c")
    assert lts.labelled_triples() == {(0, "a", 1), (1, "b c", 2)}


def test_parse_ignores_blank_lines_and_accepts_bytes():
    lts = parse_aut(b"des (0,1,2)\n\n(0,tau,1)\n\n")
    assert lts.successors(0, lts.action_id("tau")) == (1,)


def test_duplicate_transitions_collapse():
    lts = parse_aut("des (0,2,2)\n(0,a,1)\n(0,a,1)\n")
    assert lts.num_transitions == 1


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("hello\n", 1),
        ("des (0,1)\n", 1),
        ("des (0,1,2)\n(0,a,5)\n", 2),
        ("des (0,2,2)\n(0,a,1)\n", 2),
        ("des (0,1,2)\n(0,,1)\n", 2),
        ("des (0,1,2)\n0,a,1\n", 2),
        ("des (0,1,2)\n(x,a,1)\n", 2),
        ("des (3,0,2)\n", 1),
    ],
)
def test_malformed_aut_reports_line(text, line):
    with pytest.raises(AutParseError) as info:
        parse_aut(text)
    assert info.value.line == line


def test_write_quotes_nonalphanumeric_labels():
    lts = Lts(2, ["a", "~p1"], [(0, 1, 1), (0, 0, 1)])
    text = write_aut(lts)
    assert text.splitlines() == ["des (0,2,2)", "(0,a,1)", '(0,"~p1",1)']


@given(small_lts())
def test_aut_round_trip(lts):
    again = parse_aut(write_aut(lts))
    assert again.num_states == lts.num_states
    assert again.labelled_triples() == lts.labelled_triples()


def test_chain_family():
    lts = gen_chain_a(3)
    assert lts.num_states == 4
    assert lts.labelled_triples() == {(1, "a", 0), (2, "a", 1), (3, "a", 2)}
    assert lts.state_by_name("x3") == 3


def test_ladder_family_b3():
    lts = gen_ladder_b(3)
    x = lts.state_by_name
    expected = {
        ("y0", "y0"),
        ("y1", "y0"), ("x1", "x0"), ("x1", "y0"),
        ("y2", "y1"), ("x2", "x1"), ("y2", "x1"),
        ("y3", "y2"), ("x3", "x2"), ("x3", "y2"),
    }
    assert lts.labelled_triples() == {(x(p), "a", x(q)) for p, q in expected}


def test_example_m():
    lts = gen_example_m()
    assert lts.labelled_triples() == {(0, "a", 1), (1, "a", 2), (1, "b", 0)}


def test_random_lts_is_seeded():
    a = random_lts(30, 3, 2.0, seed=5)
    b = random_lts(30, 3, 2.0, seed=5)
    assert a.transitions == b.transitions
    assert a.num_transitions == 60


def test_state_by_name_errors():
    lts = gen_chain_a(2)
    with pytest.raises(KeyError):
        lts.state_by_name("7")
    with pytest.raises(KeyError):
        lts.state_by_name("nope")


@given(small_lts())
def test_predecessors_invert_successors(lts):
    for a in range(lts.num_actions):
        for s in range(lts.num_states):
            for t in lts.successors(s, a):
                assert s in lts.predecessors(t, a)
            mask = set_to_mask(lts.successors(s, a))
            assert (lts.pre_image(a, mask) >> s & 1) == (1 if mask else 0)


def test_mask_helpers():
    assert mask_to_set(set_to_mask({0, 3, 9})) == {0, 3, 9}
    assert set_to_mask([]) == 0


@given(small_lts(max_states=4, max_actions=2))
def test_traces_agree_with_has_trace(lts):
    for s in range(lts.num_states):
        words = traces_up_to(lts, s, 3)
        assert () in words
        for w in words:
            assert has_trace(lts, s, w)
            for cut in range(len(w)):
                assert w[:cut] in words


def test_has_trace_unknown_label():
    assert not has_trace(gen_chain_a(2), 2, ["zz"])
