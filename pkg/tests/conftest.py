from __future__ import annotations

import random

from hypothesis import strategies as st

from hmldist.lts import Lts, random_lts


@st.composite
def small_lts(draw, max_states: int = 6, max_actions: int = 3) -> Lts:
    n = draw(st.integers(1, max_states))
    k = draw(st.integers(1, max_actions))
    triples = draw(
        st.lists(
            st.tuples(st.integers(0, n - 1), st.integers(0, k - 1), st.integers(0, n - 1)),
            max_size=3 * n,
        )
    )
    return Lts(n, "abc"[:k], triples)


@st.composite
def lts_with_pair(draw, max_states: int = 6, max_actions: int = 3):
    lts = draw(small_lts(max_states, max_actions))
    s = draw(st.integers(0, lts.num_states - 1))
    t = draw(st.integers(0, lts.num_states - 1))
    return lts, s, t


def random_corpus(count: int, max_states: int = 8, max_actions: int = 3, seed: int = 0) -> list[Lts]:
    """Seeded small LTSs with varying size, alphabet and density."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, max_states)
        k = rng.randint(1, max_actions)
        density = rng.choice([0.5, 1.0, 1.5, 2.0, 3.0])
        out.append(random_lts(n, k, density, rng=rng))
    return out


# pass/fail lines printed by the acceptance tests, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
