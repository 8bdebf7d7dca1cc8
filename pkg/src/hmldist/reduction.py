"""CNF satisfiability encoded as distinguishability by a short trace.

From a CNF formula over p_1..p_k with clauses C_1..C_n an LTS is built with
two states ``s`` and ``t``. Words ``init a_1 .. a_k flag`` with a_i in
{p_i, ~p_i} are traces of ``s`` always, and traces of ``t`` exactly when the
encoded assignment falsifies some clause. So s and t are told apart by a trace
of length k+2 iff the formula is satisfiable.
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from .lts import Lts, TraceWord

INIT = "init"
FLAG = "flag"

Assignment = dict[int, bool]  # proposition index (1-based) -> value


class DimacsError(ValueError):
    pass


class TraceDecodeError(ValueError):
    pass


def pos_label(i: int) -> str:
    return f"p{i}"


def neg_label(i: int) -> str:
    return f"~p{i}"


@dataclass(frozen=True)
class CnfInstance:
    """A CNF formula; literals are signed proposition indices as in DIMACS."""

    num_props: int
    clauses: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.num_props < 1:
            raise ValueError("need at least one proposition")
        for clause in self.clauses:
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_props:
                    raise ValueError(f"literal {lit} out of range 1..{self.num_props}")

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, rho: Mapping[int, bool]) -> bool:
        return all(any(rho[abs(lit)] == (lit > 0) for lit in clause) for clause in self.clauses)


def parse_dimacs(text: str) -> CnfInstance:
    """Parse DIMACS cnf. Comment lines start with ``c``; a ``%`` line ends the input."""
    header = None
    tokens: list[tuple[int, int]] = []  # (value, line number)
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("%"):
            break
        if stripped.startswith("p"):
            if header is not None:
                raise DimacsError(f"line {lineno}: second header")
            parts = stripped.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: expected 'p cnf <vars> <clauses>'")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"line {lineno}: header counts must be integers") from None
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before header")
        for word in stripped.split():
            try:
                tokens.append((int(word), lineno))
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {word!r}") from None
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    k, n = header
    if k < 1:
        raise DimacsError("need at least one proposition")
    clauses: list[frozenset[int]] = []
    current: list[int] = []
    for value, lineno in tokens:
        if value == 0:
            clauses.append(frozenset(current))
            current = []
        elif abs(value) > k:
            raise DimacsError(f"line {lineno}: literal {value} out of range 1..{k}")
        else:
            current.append(value)
    if current:
        raise DimacsError("last clause is not terminated by 0")
    if len(clauses) != n:
        raise DimacsError(f"header announces {n} clauses, found {len(clauses)}")
    return CnfInstance(k, tuple(clauses))


def write_dimacs(c: CnfInstance) -> str:
    lines = [f"p cnf {c.num_props} {c.num_clauses}"]
    for clause in c.clauses:
        lits = sorted(clause, key=lambda lit: (abs(lit), lit < 0))
        lines.append(" ".join(str(lit) for lit in lits + [0]))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ReductionLts:
    lts: Lts
    s: int
    t: int
    roles: tuple[str, ...]  # role name per state id, e.g. "unsat_C2_1", "sat_0", "bot_3"
    cnf: CnfInstance

    def state(self, role: str) -> int:
        return self.roles.index(role)

    def role_map_json(self) -> str:
        return json.dumps(
            {
                "s": self.s,
                "t": self.t,
                "num_props": self.cnf.num_props,
                "num_clauses": self.cnf.num_clauses,
                "roles": {str(i): role for i, role in enumerate(self.roles)},
            },
            indent=2,
        )


def build_lts(c: CnfInstance) -> ReductionLts:
    """The LTS whose states ``s`` and ``t`` have a distinguishing trace of length k+2 iff ``c`` is satisfiable.

    State ids: s, t, delta, then sat_0..k, bot_0..k, and unsat_Cj_0..k per clause.
    """
    k, n = c.num_props, c.num_clauses
    roles = ["s", "t", "delta"]
    roles += [f"sat_{i}" for i in range(k + 1)]
    roles += [f"bot_{i}" for i in range(k + 1)]
    for j in range(1, n + 1):
        roles += [f"unsat_C{j}_{i}" for i in range(k + 1)]
    ids = {role: i for i, role in enumerate(roles)}

    actions = [INIT]
    for i in range(1, k + 1):
        actions += [pos_label(i), neg_label(i)]
    actions.append(FLAG)
    act = {label: a for a, label in enumerate(actions)}

    trans: list[tuple[int, int, int]] = []

    def edge(src: str, label: str, dst: str):
        trans.append((ids[src], act[label], ids[dst]))

    for i in range(1, k + 1):
        for label in (pos_label(i), neg_label(i)):
            edge(f"sat_{i - 1}", label, f"sat_{i}")
            edge(f"bot_{i - 1}", label, f"bot_{i}")
        for j, clause in enumerate(c.clauses, 1):
            for label, lit in ((pos_label(i), i), (neg_label(i), -i)):
                target = f"sat_{i}" if lit in clause else f"unsat_C{j}_{i}"
                edge(f"unsat_C{j}_{i - 1}", label, target)
    for j in range(1, n + 1):
        edge(f"unsat_C{j}_{k}", FLAG, "delta")
        edge("t", INIT, f"unsat_C{j}_0")
    edge(f"bot_{k}", FLAG, "delta")
    edge("t", INIT, "sat_0")
    edge("s", INIT, "sat_0")
    edge("s", INIT, "bot_0")

    lts = Lts(len(roles), actions, trans, initial=ids["s"], state_names=roles)
    return ReductionLts(lts, ids["s"], ids["t"], tuple(roles), c)


def expected_counts(c: CnfInstance) -> tuple[int, int]:
    """(states, transitions) of :func:`build_lts` as closed formulas in k and n."""
    k, n = c.num_props, c.num_clauses
    return (n + 2) * (k + 1) + 3, 2 * k * (n + 2) + 2 * n + 4


def truths(k: int) -> list[TraceWord]:
    """All words a_1..a_k with a_i in {p_i, ~p_i}, i.e. every assignment."""
    return [tuple(w) for w in itertools.product(*[(pos_label(i), neg_label(i)) for i in range(1, k + 1)])]


def assignment_to_trace(c: CnfInstance, rho: Mapping[int, bool]) -> TraceWord:
    return tuple(pos_label(i) if rho[i] else neg_label(i) for i in range(1, c.num_props + 1))


def trace_to_assignment(c: CnfInstance, word: Sequence[str]) -> Assignment:
    if len(word) != c.num_props:
        raise TraceDecodeError(f"expected {c.num_props} actions, got {len(word)}")
    rho: Assignment = {}
    for i, label in enumerate(word, 1):
        if label == pos_label(i):
            rho[i] = True
        elif label == neg_label(i):
            rho[i] = False
        else:
            raise TraceDecodeError(f"position {i}: expected {pos_label(i)} or {neg_label(i)}, got {label!r}")
    return rho


def trace_dist_search(lts: Lts, s: int, t: int, max_len: int) -> TraceWord | None:
    """A shortest word of length <= ``max_len`` that is a trace of exactly one of ``s`` and ``t``.

    Breadth-first search over pairs of subset-construction states; exponential
    in the worst case.
    """
    start = (frozenset([s]), frozenset([t]))
    parent: dict[tuple, tuple | None] = {start: None}
    frontier = [start]
    for _ in range(max_len):
        nxt = []
        for pair in frontier:
            left, right = pair
            for a, label in enumerate(lts.actions):
                l2 = frozenset(v for u in left for v in lts.successors(u, a))
                r2 = frozenset(v for u in right for v in lts.successors(u, a))
                if not l2 and not r2:
                    continue
                key = (l2, r2)
                if key in parent:
                    continue
                parent[key] = (pair, label)
                if not l2 or not r2:
                    return _unwind(parent, key)
                nxt.append(key)
        if not nxt:
            break
        frontier = nxt
    return None


def _unwind(parent: dict, key) -> TraceWord:
    word = []
    while parent[key] is not None:
        key, label = parent[key]
        word.append(label)
    return tuple(reversed(word))


def brute_force_sat(c: CnfInstance) -> Assignment | None:
    for values in itertools.product((False, True), repeat=c.num_props):
        rho = dict(zip(range(1, c.num_props + 1), values))
        if c.satisfied_by(rho):
            return rho
    return None


@dataclass(frozen=True)
class SatVerdict:
    satisfiable: bool
    assignment: Assignment | None
    trace: TraceWord | None


def sat_via_traces(c: CnfInstance) -> SatVerdict:
    """Decide ``c`` by searching a distinguishing trace of length <= k+2 in its reduction LTS."""
    red = build_lts(c)
    word = trace_dist_search(red.lts, red.s, red.t, c.num_props + 2)
    if word is None:
        return SatVerdict(False, None, None)
    if len(word) != c.num_props + 2 or word[0] != INIT or word[-1] != FLAG:
        raise TraceDecodeError(f"unexpected distinguishing trace shape {word!r}")
    rho = trace_to_assignment(c, word[1:-1])
    return SatVerdict(True, rho, word)


def random_cnf(num_props: int, num_clauses: int, rng, max_width: int = 3) -> CnfInstance:
    """Random clauses of width 1..``max_width`` (clamped to k) over p_1..p_k."""
    clauses = []
    for _ in range(num_clauses):
        width = rng.randint(1, min(max_width, num_props))
        props = rng.sample(range(1, num_props + 1), width)
        clauses.append(frozenset(p if rng.random() < 0.5 else -p for p in props))
    return CnfInstance(num_props, tuple(clauses))


def instance_from_clauses(num_props: int, clauses: Iterable[Iterable[int]]) -> CnfInstance:
    return CnfInstance(num_props, tuple(frozenset(cl) for cl in clauses))
