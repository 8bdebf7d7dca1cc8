"""Side-by-side metrics of our witnesses and the split-backtracking baseline on random LTSs."""

from __future__ import annotations

import csv
import io
import random
import time
from dataclasses import dataclass, field
from decimal import Decimal, localcontext

from .cleaveland import LATEST, CleavelandFormulas, cleaveland_refine
from .distinguish import Distinguisher
from .equivalences import INF, dist, refine_sequence
from .hml import FormulaError, FormulaStore, distinguishes, metrics, reduce_irreducible
from .lts import Lts, random_lts

METHODS = ("ours", "cleaveland")
METRIC_NAMES = ("depth", "size", "negdepth")


@dataclass
class PairRecord:
    instance: int
    s: int
    t: int
    dist: int
    ours: dict[str, int]
    cleaveland: dict[str, int]
    reduced: bool  # whether both formulas went through the irreducibility pass


@dataclass
class InstanceSummary:
    instance: int
    states: int
    transitions: int
    records: list[PairRecord] = field(default_factory=list)
    seconds: dict[str, float] = field(default_factory=lambda: {m: 0.0 for m in METHODS})


def _avg(values: list[int]) -> str:
    if not values:
        return ""
    with localcontext() as ctx:
        ctx.prec = 28
        return str((Decimal(sum(values)) / Decimal(len(values))).quantize(Decimal("0.01")))


def sample_pairs(lts: Lts, seq, count: int, rng: random.Random) -> list[tuple[int, int]]:
    """Up to ``count`` distinct ordered pairs of non-bisimilar states."""
    n = lts.num_states
    pairs: list[tuple[int, int]] = []
    seen = set()
    for _ in range(20 * count):
        if len(pairs) == count or n < 2:
            break
        s, t = rng.sample(range(n), 2)
        if (s, t) in seen:
            continue
        seen.add((s, t))
        if dist(seq, s, t) != INF:
            pairs.append((s, t))
    return pairs


def compare_instance(
    lts: Lts,
    pairs: list[tuple[int, int]],
    instance: int = 0,
    strategy: str = LATEST,
    irreducible: bool = True,
) -> InstanceSummary:
    """Run both generators on ``pairs`` and collect depth, size and negation depth.

    Every formula is checked to distinguish its pair. With ``irreducible`` both
    formulas are reduced before measuring, unless one is too large to reduce.
    """
    summary = InstanceSummary(instance, lts.num_states, lts.num_transitions)
    store = FormulaStore()

    start = time.perf_counter()
    seq = refine_sequence(lts)
    ours_engine = Distinguisher(lts, seq=seq, store=store)
    summary.seconds["ours"] += time.perf_counter() - start

    start = time.perf_counter()
    log = cleaveland_refine(lts, strategy)
    base_engine = CleavelandFormulas(lts, log, store)
    summary.seconds["cleaveland"] += time.perf_counter() - start

    for s, t in pairs:
        level = dist(seq, s, t)
        start = time.perf_counter()
        ours = ours_engine.psi(level, s, t)
        summary.seconds["ours"] += time.perf_counter() - start
        start = time.perf_counter()
        base = base_engine.raw(s, t)
        summary.seconds["cleaveland"] += time.perf_counter() - start

        reduced = False
        if irreducible:
            try:
                r_ours = reduce_irreducible(store, ours, lts, s, t)
                r_base = reduce_irreducible(store, base, lts, s, t)
                ours, base, reduced = r_ours, r_base, True
            except FormulaError:
                pass
        for node in (ours, base):
            if not distinguishes(store, node, lts, s, t):
                raise AssertionError(f"formula does not distinguish {s} and {t}")
        m_ours, m_base = metrics(store, ours), metrics(store, base)
        summary.records.append(
            PairRecord(
                instance,
                s,
                t,
                level,
                {"depth": m_ours.depth, "size": m_ours.size, "negdepth": m_ours.negdepth},
                {"depth": m_base.depth, "size": m_base.size, "negdepth": m_base.negdepth},
                reduced,
            )
        )
    return summary


def run_random_bench(
    count: int,
    states: tuple[int, int],
    density: float = 2.0,
    actions: int = 2,
    pairs: int = 10,
    seed: int = 0,
    strategy: str = LATEST,
    irreducible: bool = True,
) -> list[InstanceSummary]:
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(states[0], states[1])
        lts = random_lts(n, actions, density, rng=rng)
        seq = refine_sequence(lts)
        chosen = sample_pairs(lts, seq, pairs, rng)
        out.append(compare_instance(lts, chosen, i, strategy, irreducible))
    return out


def summary_header(timing: bool = False) -> list[str]:
    cols = ["instance", "states", "transitions", "pairs"]
    for method in METHODS:
        for name in METRIC_NAMES:
            cols += [f"max_{name}_{method}", f"avg_{name}_{method}"]
    if timing:
        cols += [f"seconds_{m}" for m in METHODS]
    return cols


def summary_rows(summaries: list[InstanceSummary], timing: bool = False) -> list[list[str]]:
    rows = []
    for inst in summaries:
        row = [str(inst.instance), str(inst.states), str(inst.transitions), str(len(inst.records))]
        for method in METHODS:
            for name in METRIC_NAMES:
                values = [getattr(r, method)[name] for r in inst.records]
                row += [str(max(values)) if values else "", _avg(values)]
        if timing:
            row += [f"{inst.seconds[m]:.4f}" for m in METHODS]
        rows.append(row)
    return rows


def pair_header() -> list[str]:
    cols = ["instance", "s", "t", "dist"]
    for method in METHODS:
        cols += [f"{name}_{method}" for name in METRIC_NAMES]
    return cols + ["irreducible"]


def pair_rows(summaries: list[InstanceSummary]) -> list[list[str]]:
    rows = []
    for inst in summaries:
        for r in inst.records:
            row = [str(r.instance), str(r.s), str(r.t), str(r.dist)]
            for method in METHODS:
                row += [str(getattr(r, method)[name]) for name in METRIC_NAMES]
            rows.append(row + ["yes" if r.reduced else "no"])
    return rows


def to_csv(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()
