"""Baseline distinguishing formulas by back-tracking a split-based bisimulation refinement.

Blocks are split one splitter at a time; every split is logged with the
splitter that caused it. A formula for two states is read off the split that
first separated them: the side that can reach the splitter gets a diamond
into it, conjoined over formulas separating the chosen successor from every
successor of the other state.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .distinguish import BisimilarStatesError
from .hml import FormulaStore, NodeId, distinguishes, reduce_irreducible
from .lts import Lts

LATEST = "latest"
OLDEST = "oldest"


@dataclass(frozen=True)
class SplitRecord:
    parent: int
    children: tuple[int, int]  # (states reaching the splitter, the rest)
    splitter: tuple[int, int]  # (action id, splitter block id)
    splitter_states: frozenset[int]
    order: int


@dataclass
class SplitLog:
    num_states: int
    records: list[SplitRecord] = field(default_factory=list)
    parent_of: dict[int, int] = field(default_factory=dict)
    leaf_of: list[int] = field(default_factory=list)  # final block per state
    split_by_block: dict[int, int] = field(default_factory=dict)  # block id -> record index

    def final_partition(self) -> list[int]:
        return list(self.leaf_of)

    def replay(self) -> list[int]:
        """Re-apply the recorded splits from the single initial block."""
        lineage = [set(self.ancestors(self.leaf_of[s])) for s in range(self.num_states)]
        block_of = [0] * self.num_states
        for rec in self.records:
            reach, rest = rec.children
            for s in range(self.num_states):
                if block_of[s] == rec.parent:
                    block_of[s] = reach if reach in lineage[s] else rest
        return block_of

    def ancestors(self, block: int) -> list[int]:
        out = [block]
        while block in self.parent_of:
            block = self.parent_of[block]
            out.append(block)
        return out

    def separating_record(self, s: int, t: int) -> SplitRecord | None:
        """The split at which ``s`` and ``t`` were put into different blocks."""
        ours = set(self.ancestors(self.leaf_of[s]))
        block = self.leaf_of[t]
        while block not in ours:
            block = self.parent_of[block]
        if block == self.leaf_of[s]:
            return None
        return self.records[self.split_by_block[block]]

    def side(self, rec: SplitRecord, s: int) -> int:
        """0 if ``s`` lies below the splitter-reaching child of ``rec``, else 1."""
        return 0 if rec.children[0] in self.ancestors(self.leaf_of[s]) else 1


def cleaveland_refine(lts: Lts, strategy: str = LATEST) -> SplitLog:
    """Refine to bisimilarity, choosing the latest (or oldest) created block as splitter."""
    if strategy not in (LATEST, OLDEST):
        raise ValueError(f"unknown splitter strategy {strategy!r}")
    n = lts.num_states
    log = SplitLog(num_states=n, leaf_of=[0] * n)
    if n == 0:
        return log
    members: dict[int, set[int]] = {0: set(range(n))}
    next_id = 1
    work: deque[int] = deque([0])
    while work:
        sp = work.pop() if strategy == LATEST else work.popleft()
        if sp not in members:
            continue  # already split; its children are queued
        splitter_states = frozenset(members[sp])
        for a in range(lts.num_actions):
            hits: dict[int, set[int]] = {}
            for target in splitter_states:
                for src in lts.predecessors(target, a):
                    hits.setdefault(log.leaf_of[src], set()).add(src)
            for b in sorted(hits):
                part = hits[b]
                if len(part) == len(members[b]):
                    continue
                reach, rest = next_id, next_id + 1
                next_id += 2
                members[reach] = part
                members[rest] = members.pop(b) - part
                for s in part:
                    log.leaf_of[s] = reach
                for s in members[rest]:
                    log.leaf_of[s] = rest
                log.parent_of[reach] = b
                log.parent_of[rest] = b
                log.split_by_block[b] = len(log.records)
                log.records.append(
                    SplitRecord(b, (reach, rest), (a, sp), splitter_states, len(log.records))
                )
                work.append(reach)
                work.append(rest)
    return log


class CleavelandFormulas:
    """Formula extraction from a split log, memoized per ordered state pair."""

    def __init__(self, lts: Lts, log: SplitLog, store: FormulaStore | None = None):
        self.lts = lts
        self.log = log
        self.store = store if store is not None else FormulaStore()
        self.memo: dict[tuple[int, int], NodeId] = {}

    def raw(self, s: int, t: int) -> NodeId:
        key = (s, t)
        if key in self.memo:
            return self.memo[key]
        rec = self.log.separating_record(s, t)
        if rec is None:
            raise BisimilarStatesError(f"states {s} and {t} are bisimilar")
        if self.log.side(rec, s) == 1:
            result = self.store.mk_neg(self.raw(t, s))
        else:
            a, _ = rec.splitter
            s1 = min(u for u in self.lts.successors(s, a) if u in rec.splitter_states)
            targets = self.lts.successors(t, a)
            if targets:
                body = self.store.mk_and([self.raw(s1, t1) for t1 in targets])
            else:
                body = self.store.true
            result = self.store.mk_diamond(self.lts.actions[a], body)
        self.memo[key] = result
        return result

    def formula(self, s: int, t: int, irreducible: bool = True) -> NodeId:
        node = self.raw(s, t)
        if irreducible:
            node = reduce_irreducible(self.store, node, self.lts, s, t)
        if not distinguishes(self.store, node, self.lts, s, t):
            raise RuntimeError(f"baseline formula fails to distinguish {s} and {t}")
        return node


def cleaveland_formula(
    lts: Lts, log: SplitLog, s: int, t: int, store: FormulaStore | None = None, irreducible: bool = True
) -> NodeId:
    return CleavelandFormulas(lts, log, store).formula(s, t, irreducible)
