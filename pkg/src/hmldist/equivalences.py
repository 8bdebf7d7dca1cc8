"""k-bisimilarity by iterative partition refinement, and the dist / dirdist measures."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

from .lts import Lts

INF = math.inf  # compares above every finite level


@dataclass(frozen=True)
class PartitionSequence:
    """Partitions pi_0 .. pi_K, each stored as a block id per state.

    ``pi_0`` is the single block of all states and ``pi_K`` is stable. Levels
    beyond ``K`` are equal to ``pi_K``.
    """

    levels: tuple[tuple[int, ...], ...]

    @property
    def K(self) -> int:
        return len(self.levels) - 1

    def level(self, i: int) -> tuple[int, ...]:
        return self.levels[min(i, self.K)]

    def block(self, i: int, s: int) -> int:
        return self.levels[min(i, self.K)][s]

    def same(self, i: int, s: int, t: int) -> bool:
        lvl = self.levels[min(i, self.K)]
        return lvl[s] == lvl[t]

    def blocks(self, i: int) -> list[list[int]]:
        """Blocks of level ``i`` in block-id order, each a sorted list of states."""
        grouped: dict[int, list[int]] = {}
        for s, b in enumerate(self.level(i)):
            grouped.setdefault(b, []).append(s)
        return [grouped[b] for b in sorted(grouped)]

    def to_json(self) -> dict:
        return {"K": self.K, "levels": {str(i): self.blocks(i) for i in range(len(self.levels))}}


def split_on(lts: Lts, U: Iterable[int], a: int, V: Iterable[int]) -> set[int]:
    """States of ``U`` with an ``a``-transition into ``V``."""
    V = set(V)
    return {s for s in U if any(t in V for t in lts.successors(s, a))}


def _refine(lts: Lts, block_of: list[int], num_blocks: int) -> tuple[list[int], int]:
    """One Refine step: split every block by every (action, old block) pair.

    Actions are taken in id order, old blocks in id order, and blocks of the
    growing partition in creation order. A split keeps the old id for B \\ C
    and hands C the next fresh id.
    """
    old_members: list[list[int]] = [[] for _ in range(num_blocks)]
    for s, b in enumerate(block_of):
        old_members[b].append(s)
    new_of = list(block_of)
    sizes = [len(m) for m in old_members]

    for a in range(lts.num_actions):
        for splitter in old_members:
            hits: dict[int, list[int]] = {}
            seen: set[int] = set()
            for target in splitter:
                for src in lts.predecessors(target, a):
                    if src not in seen:
                        seen.add(src)
                        hits.setdefault(new_of[src], []).append(src)
            for b in sorted(hits):
                part = hits[b]
                if len(part) < sizes[b]:
                    fresh = len(sizes)
                    sizes.append(len(part))
                    sizes[b] -= len(part)
                    for s in part:
                        new_of[s] = fresh
    return new_of, len(sizes)


def refine_sequence(lts: Lts) -> PartitionSequence:
    """Compute pi_0, pi_1, ... until Refine(pi_K) = pi_K; level i induces i-bisimilarity."""
    block_of = [0] * lts.num_states
    count = 1 if lts.num_states else 0
    levels = [tuple(block_of)]
    while True:
        refined, new_count = _refine(lts, block_of, count)
        # refinement only splits, so equal block counts mean equal partitions
        if new_count == count:
            break
        block_of, count = refined, new_count
        levels.append(tuple(block_of))
    return PartitionSequence(tuple(levels))


def dist(seq: PartitionSequence, s: int, t: int) -> int | float:
    """Least level at which ``s`` and ``t`` sit in different blocks, or INF."""
    if seq.same(seq.K, s, t):
        return INF
    lo, hi = 0, seq.K  # same at lo, different at hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if seq.same(mid, s, t):
            lo = mid
        else:
            hi = mid
    return hi


def splpairs(lts: Lts, seq: PartitionSequence, i: int, s: int, t: int) -> set[tuple[int, int]]:
    """Pairs (a, s') with s -a-> s' such that s' is (i-1)-distinguishable from every a-successor of t."""
    if i < 1:
        raise ValueError("splpairs needs level i >= 1")
    prev = seq.level(i - 1)
    out = set()
    for a in range(lts.num_actions):
        succ_s = lts.successors(s, a)
        if not succ_s:
            continue
        t_blocks = {prev[u] for u in lts.successors(t, a)}
        out.update((a, u) for u in succ_s if prev[u] not in t_blocks)
    return out


class DirDistTable:
    """Memo of dirdist values keyed by (level, s, t); single-threaded."""

    def __init__(self):
        self.values: dict[tuple[int, int, int], int | float] = {}

    def __len__(self):
        return len(self.values)


def dirdist(
    lts: Lts, seq: PartitionSequence, table: DirDistTable, i: int, s: int, t: int
) -> int | float:
    """Directed minimal negation depth at observation bound ``i``.

    INF when s and t are i-bisimilar. Each (i, s, t) is computed once and
    memoized in ``table``.
    """
    key = (i, s, t)
    memo = table.values
    if key in memo:
        return memo[key]
    if i <= 0 or seq.same(i, s, t):
        memo[key] = INF
        return INF
    best: int | float = INF
    for a, s1 in splpairs(lts, seq, i, s, t):
        value = 0
        for t1 in lts.successors(t, a):
            value = max(value, dirdist(lts, seq, table, i - 1, s1, t1))
        best = min(best, value)
    for a, t1 in splpairs(lts, seq, i, t, s):
        value = 1
        for s1 in lts.successors(s, a):
            value = max(value, dirdist(lts, seq, table, i - 1, t1, s1) + 1)
        best = min(best, value)
    memo[key] = best
    return best


def hat_splpairs(
    lts: Lts, seq: PartitionSequence, table: DirDistTable, i: int, j: int | float, s: int, t: int
) -> set[tuple[int, int]]:
    """The members (a, s') of splpairs whose every a-successor t' of t has dirdist_{i-1}(s', t') <= j."""
    return {
        (a, s1)
        for a, s1 in splpairs(lts, seq, i, s, t)
        if all(dirdist(lts, seq, table, i - 1, s1, t1) <= j for t1 in lts.successors(t, a))
    }


def nested_sim_holds(
    lts: Lts, seq: PartitionSequence, table: DirDistTable, i: int, m: int, s: int, t: int
) -> bool:
    """Whether s is m-nested i-similarity included in t."""
    return dirdist(lts, seq, table, i, s, t) > m
