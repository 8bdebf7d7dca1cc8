"""Minimal observation-depth (phi) and minimal observation/negation-depth (psi) distinguishing formulas."""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass, field

from .equivalences import INF, DirDistTable, PartitionSequence, dirdist, dist, hat_splpairs, refine_sequence, splpairs
from .hml import FormulaStore, Metrics, NodeId, evaluate_mask, metrics
from .lts import Lts

DEPTH_ONLY = "depth_only"
DEPTH_AND_NEGATION = "depth_and_negation"


class BisimilarStatesError(ValueError):
    """The requested states are not distinguishable at the requested level."""


@dataclass(frozen=True)
class WitnessRequest:
    s: int
    t: int
    mode: str = DEPTH_AND_NEGATION
    # when False the witness may hold in t instead of s, whichever direction
    # needs fewer nested negations
    directed: bool = True


@dataclass
class WitnessMemo:
    phi: dict[tuple[int, int], NodeId] = field(default_factory=dict)
    psi: dict[tuple[int, int, int], NodeId] = field(default_factory=dict)


class Distinguisher:
    """Generates distinguishing formulas for one LTS into a shared store.

    Memo tables persist across calls, so formulas for many pairs share
    subterms. ``calls`` counts every invocation of phi/psi, memo hits
    included; ``evaluations`` counts only those that built a formula.
    With ``seed`` set, the witness pair is drawn at random among the
    admissible ones instead of by the deterministic order.
    """

    def __init__(
        self,
        lts: Lts,
        seq: PartitionSequence | None = None,
        store: FormulaStore | None = None,
        seed: int | None = None,
    ):
        self.lts = lts
        self.seq = seq if seq is not None else refine_sequence(lts)
        self.store = store if store is not None else FormulaStore()
        self.table = DirDistTable()
        self.memo = WitnessMemo()
        self.rng = random.Random(seed) if seed is not None else None
        self.calls = 0
        self.evaluations = 0
        self._active: set[tuple] = set()
        limit = 4 * self.seq.K + 1000
        if sys.getrecursionlimit() < limit:
            sys.setrecursionlimit(limit)

    def _select(self, candidates: set[tuple[int, int]], t: int) -> tuple[int, int]:
        ordered = sorted(candidates)
        if self.rng is not None:
            return self.rng.choice(ordered)

        def key(pair):
            a, s1 = pair
            return (a, sum(dist(self.seq, s1, t1) for t1 in self.lts.successors(t, a)), s1)

        return min(ordered, key=key)

    def _label(self, a: int) -> str:
        return self.lts.actions[a]

    def phi(self, s: int, t: int) -> NodeId:
        """A formula of depth dist(s, t) that holds in ``s`` and not in ``t``."""
        self.calls += 1
        key = (s, t)
        if key in self.memo.phi:
            return self.memo.phi[key]
        i = dist(self.seq, s, t)
        if i == INF:
            raise BisimilarStatesError(f"states {s} and {t} are bisimilar")
        guard = ("phi", s, t)
        if guard in self._active:
            raise RuntimeError(f"phi recursion cycle on {s}, {t}")
        self._active.add(guard)
        try:
            self.evaluations += 1
            candidates = splpairs(self.lts, self.seq, i, s, t)
            if not candidates:
                result = self.store.mk_neg(self.phi(t, s))
            else:
                a, s1 = self._select(candidates, t)
                targets = self.lts.successors(t, a)
                if targets:
                    body = self.store.mk_and([self.phi(s1, t1) for t1 in targets])
                else:
                    body = self.store.true
                result = self.store.mk_diamond(self._label(a), body)
        finally:
            self._active.discard(guard)
        self.memo.phi[key] = result
        return result

    def dirdist(self, i: int, s: int, t: int):
        return dirdist(self.lts, self.seq, self.table, i, s, t)

    def psi(self, i: int, s: int, t: int) -> NodeId:
        """A formula in F_i that holds in ``s``, not in ``t``, with minimal negation depth."""
        self.calls += 1
        key = (s, t, i)
        if key in self.memo.psi:
            return self.memo.psi[key]
        if self.seq.same(i, s, t):
            raise BisimilarStatesError(f"states {s} and {t} are {i}-bisimilar")
        guard = ("psi", s, t, i)
        if guard in self._active:
            raise RuntimeError(f"psi recursion cycle on {s}, {t} at level {i}")
        self._active.add(guard)
        try:
            self.evaluations += 1
            j = self.dirdist(i, s, t)
            candidates = hat_splpairs(self.lts, self.seq, self.table, i, j, s, t)
            if not candidates:
                result = self.store.mk_neg(self.psi(i, t, s))
            else:
                a, s1 = self._select(candidates, t)
                remaining = set(self.lts.successors(t, a))
                conjuncts: list[NodeId] = []
                while remaining:
                    t_max = min(remaining, key=lambda u: (-self.dirdist(i - 1, s1, u), u))
                    f = self.psi(i - 1, s1, t_max)
                    conjuncts.append(f)
                    mask = evaluate_mask(self.store, f, self.lts)
                    remaining = {u for u in remaining if mask >> u & 1}
                body = self.store.mk_and(conjuncts) if conjuncts else self.store.true
                result = self.store.mk_diamond(self._label(a), body)
        finally:
            self._active.discard(guard)
        self.memo.psi[key] = result
        return result


def phi(lts: Lts, seq: PartitionSequence, memo: Distinguisher, s: int, t: int) -> NodeId:
    """Functional entry point; ``memo`` is the Distinguisher carrying the tables."""
    return memo.phi(s, t)


def psi(lts: Lts, seq: PartitionSequence, memo: Distinguisher, i: int, s: int, t: int) -> NodeId:
    return memo.psi(i, s, t)


@dataclass
class DistinguishResult:
    verdict: str  # "distinguishable" or "equivalent"
    s: int
    t: int
    mode: str
    formula: NodeId | None = None
    metrics: Metrics | None = None
    dist: int | float = INF
    dirdist: int | float = INF
    calls: int = 0
    satisfied_by: int | None = None  # the state in which the formula holds

    @property
    def distinguishable(self) -> bool:
        return self.verdict == "distinguishable"


def distinguish(
    lts: Lts,
    request: WitnessRequest,
    *,
    seq: PartitionSequence | None = None,
    store: FormulaStore | None = None,
    seed: int | None = None,
    engine: Distinguisher | None = None,
) -> DistinguishResult:
    """Decide whether the requested states are bisimilar and, if not, build a witness.

    ``depth_only`` runs phi; ``depth_and_negation`` runs psi at level dist(s, t).
    An undirected request also builds the witness from ``t`` to ``s`` and keeps
    it when its negation depth is strictly smaller.
    """
    if request.mode not in (DEPTH_ONLY, DEPTH_AND_NEGATION):
        raise ValueError(f"unknown mode {request.mode!r}")
    for state in (request.s, request.t):
        if not 0 <= state < lts.num_states:
            raise ValueError(f"state {state} out of range")
    if engine is None:
        engine = Distinguisher(lts, seq=seq, store=store, seed=seed)
    s, t = request.s, request.t
    level = dist(engine.seq, s, t)
    if level == INF:
        return DistinguishResult("equivalent", s, t, request.mode)
    before = engine.calls
    holder, other = s, t
    if request.mode == DEPTH_ONLY:
        node = engine.phi(s, t)
    else:
        node = engine.psi(level, s, t)
        if not request.directed and engine.dirdist(level, t, s) < engine.dirdist(level, s, t):
            node = engine.psi(level, t, s)
            holder, other = t, s
    return DistinguishResult(
        verdict="distinguishable",
        s=s,
        t=t,
        mode=request.mode,
        formula=node,
        metrics=metrics(engine.store, node),
        dist=level,
        dirdist=engine.dirdist(level, holder, other),
        calls=engine.calls - before,
        satisfied_by=holder,
    )
