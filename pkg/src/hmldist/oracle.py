"""Brute-force reference implementations for small systems.

Everything here follows the textbook definitions as literally as possible and
is exponential or high-degree polynomial on purpose. The fast implementations
are tested against these.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import lru_cache

from .equivalences import INF
from .hml import AND, DIA, NEG, TRUE, FormulaStore, NodeId
from .lts import Lts

Relation = frozenset  # frozenset[tuple[int, int]]

MAX_ENUM_STATES = 10
MAX_ENUM_DEPTH = 3
MAX_DENOTATIONS = 50_000  # budget for the size-ordered search


class OracleBoundsError(ValueError):
    pass


# fragment denotations per LTS, keyed by (depth_bound, neg_bound)
_fragment_cache: weakref.WeakKeyDictionary[Lts, dict] = weakref.WeakKeyDictionary()


def _all_pairs(lts: Lts) -> set[tuple[int, int]]:
    return {(s, t) for s in range(lts.num_states) for t in range(lts.num_states)}


def _succ(lts: Lts, s: int, a: int):
    return lts.successors(s, a)


def naive_kbisim(lts: Lts, k: int) -> list[Relation]:
    """Relations for levels 0..k, each built from the previous one by the two-sided transfer condition."""
    if k < 0:
        raise ValueError("k must be non-negative")
    levels = [frozenset(_all_pairs(lts))]
    for _ in range(k):
        prev = levels[-1]
        nxt = set()
        for s, t in _all_pairs(lts):
            ok = True
            for a in range(lts.num_actions):
                if not all(any((s1, t1) in prev for t1 in _succ(lts, t, a)) for s1 in _succ(lts, s, a)):
                    ok = False
                    break
                if not all(any((t1, s1) in prev for s1 in _succ(lts, s, a)) for t1 in _succ(lts, t, a)):
                    ok = False
                    break
            if ok:
                nxt.add((s, t))
        levels.append(frozenset(nxt))
    return levels


def naive_bisim(lts: Lts) -> Relation:
    """Intersection of all k-bisimilarities (stable after at most |S| rounds)."""
    return naive_kbisim(lts, max(1, lts.num_states))[-1]


def naive_dist(lts: Lts, s: int, t: int) -> int | float:
    levels = naive_kbisim(lts, max(1, lts.num_states))
    for k, rel in enumerate(levels):
        if (s, t) not in rel:
            return k
    return INF


def _forward_gfp(lts: Lts, start: set[tuple[int, int]]) -> Relation:
    """Largest R inside ``start`` such that every s -a-> s' is matched by t -a-> t' with (s', t') in R."""
    rel = set(start)
    changed = True
    while changed:
        changed = False
        for s, t in list(rel):
            for a in range(lts.num_actions):
                if not all(any((s1, t1) in rel for t1 in _succ(lts, t, a)) for s1 in _succ(lts, s, a)):
                    rel.discard((s, t))
                    changed = True
                    break
    return frozenset(rel)


def naive_similarity(lts: Lts) -> Relation:
    """The simulation preorder: (s, t) means s is simulated by t."""
    return _forward_gfp(lts, _all_pairs(lts))


def naive_nested_sim_unbounded(lts: Lts, m: int) -> Relation:
    """m-nested similarity inclusion: similarity for m = 0, then greatest fixpoints inside the symmetric part."""
    if m < 0:
        raise ValueError("m must be non-negative")
    rel = naive_similarity(lts)
    for _ in range(m):
        inside = {(s, t) for s, t in rel if (t, s) in rel}
        rel = _forward_gfp(lts, inside)
    return rel


def nested_similar(lts: Lts, m: int, s: int, t: int) -> bool:
    """Symmetric closure of m-nested similarity inclusion."""
    rel = naive_nested_sim_unbounded(lts, m)
    return (s, t) in rel and (t, s) in rel


def naive_nested_sim(lts: Lts, k: int, m: int) -> Relation:
    """m-nested k-similarity inclusion by direct recursion on (k, m).

    Level 0 is total; at level k every step of the left state is matched by
    the right one at (k-1, m), and if m > 0 every step of the right state is
    matched by the left one at (k-1, m-1).
    """
    if k < 0 or m < 0:
        raise ValueError("k and m must be non-negative")
    pairs = _all_pairs(lts)

    @lru_cache(maxsize=None)
    def rel(kk: int, mm: int) -> Relation:
        if kk == 0:
            return frozenset(pairs)
        fwd = rel(kk - 1, mm)
        back = rel(kk - 1, mm - 1) if mm > 0 else None
        out = set()
        for s, t in pairs:
            ok = True
            for a in range(lts.num_actions):
                if not all(any((s1, t1) in fwd for t1 in _succ(lts, t, a)) for s1 in _succ(lts, s, a)):
                    ok = False
                    break
                if back is not None and not all(
                    any((t1, s1) in back for s1 in _succ(lts, s, a)) for t1 in _succ(lts, t, a)
                ):
                    ok = False
                    break
            if ok:
                out.add((s, t))
        return frozenset(out)

    return rel(k, m)


def naive_dirdist(lts: Lts, i: int, s: int, t: int) -> int | float:
    """Least j with (s, t) outside the j-nested i-similarity inclusion, INF if s and t are i-bisimilar."""
    if (s, t) in naive_kbisim(lts, i)[i]:
        return INF
    j = 0
    while (s, t) in naive_nested_sim(lts, i, j):
        j += 1
        if j > i + 1:
            raise AssertionError("nested inclusion did not fail although the states are not i-bisimilar")
    return j


# --- reference evaluator ------------------------------------------------------

def naive_evaluate(store: FormulaStore, node: NodeId, lts: Lts) -> frozenset[int]:
    """Direct set-based semantics on the unfolded tree, without any caching."""
    entry = store.node(node)
    states = frozenset(range(lts.num_states))
    if entry[0] == TRUE:
        return states
    if entry[0] == DIA:
        inner = naive_evaluate(store, entry[2], lts)
        a = lts.action_id(entry[1])
        if a is None:
            return frozenset()
        return frozenset(s for s in states if any(u in inner for u in lts.successors(s, a)))
    if entry[0] == NEG:
        return states - naive_evaluate(store, entry[1], lts)
    if entry[0] == AND:
        out = states
        for c in entry[1]:
            out &= naive_evaluate(store, c, lts)
        return out
    raise ValueError(f"unknown node kind {entry[0]!r}")


# --- exhaustive formula search ------------------------------------------------

def _pre(lts: Lts, a: int, mask: int) -> int:
    return lts.pre_image(a, mask)


def _and_closure(gens: set[int], full: int) -> set[int]:
    closure = {full}
    for g in gens:
        closure |= {x & g for x in closure}
    return closure


def _boolean_closure(gens: set[int], full: int) -> set[int]:
    """All unions of atoms of the Boolean algebra generated by ``gens``."""
    atoms = {full} if full else set()
    for g in gens:
        nxt = set()
        for atom in atoms:
            for part in (atom & g, atom & ~g & full):
                if part:
                    nxt.add(part)
        atoms = nxt
    result = {0}
    for atom in atoms:
        result |= {x | atom for x in result}
    return result


def _check_bounds(lts: Lts, depth_bound: int):
    if lts.num_states > MAX_ENUM_STATES:
        raise OracleBoundsError(f"formula enumeration is limited to {MAX_ENUM_STATES} states")
    if depth_bound > MAX_ENUM_DEPTH:
        raise OracleBoundsError(f"formula enumeration is limited to depth {MAX_ENUM_DEPTH}")
    if depth_bound < 0:
        raise ValueError("depth_bound must be non-negative")


def fragment_denotations(lts: Lts, depth_bound: int, neg_bound: int | None = None) -> set[int]:
    """Every state set (bit mask) denoted by a formula of depth <= depth_bound and negation depth <= neg_bound.

    ``neg_bound=None`` leaves negation unrestricted.
    """
    return set(_cached_fragment(lts, depth_bound, neg_bound))


def _cached_fragment(lts: Lts, depth_bound: int, neg_bound: int | None) -> frozenset[int]:
    _check_bounds(lts, depth_bound)
    cache = _fragment_cache.setdefault(lts, {})
    key = (depth_bound, neg_bound)
    if key not in cache:
        cache[key] = frozenset(_fragment_denotations(lts, depth_bound, neg_bound))
    return cache[key]


def _fragment_denotations(lts: Lts, depth_bound: int, neg_bound: int | None) -> set[int]:
    full = lts.all_states_mask

    if neg_bound is None:
        level = _boolean_closure(set(), full)
        for _ in range(depth_bound):
            gens = {_pre(lts, a, x) for a in range(lts.num_actions) for x in level}
            level = _boolean_closure(gens, full)
        return level

    if neg_bound < 0:
        raise ValueError("neg_bound must be non-negative")

    @lru_cache(maxsize=None)
    def dens(k: int, m: int) -> frozenset[int]:
        gens: set[int] = set()
        if k > 0:
            gens |= {_pre(lts, a, x) for a in range(lts.num_actions) for x in dens(k - 1, m)}
        if m > 0:
            gens |= {full & ~x for x in dens(k, m - 1)}
        return frozenset(_and_closure(gens, full))

    return set(dens(depth_bound, neg_bound))


def enumerate_formulas(
    lts: Lts,
    s: int,
    t: int,
    depth_bound: int,
    neg_bound: int | None = None,
    directed: bool = True,
) -> bool:
    """Whether some formula within the bounds holds in ``s`` and not in ``t``.

    With ``directed=False`` a formula holding in ``t`` but not ``s`` also counts.
    """
    for x in _cached_fragment(lts, depth_bound, neg_bound):
        s_in, t_in = bool(x >> s & 1), bool(x >> t & 1)
        if s_in and not t_in:
            return True
        if not directed and t_in and not s_in:
            return True
    return False


@dataclass(frozen=True)
class MinFormula:
    size: int
    store: FormulaStore
    node: NodeId


def enumerate_min_formula(
    lts: Lts,
    s: int,
    t: int,
    max_size: int,
    store: FormulaStore | None = None,
    max_denotations: int = MAX_DENOTATIONS,
) -> MinFormula | None:
    """A distinguishing formula (either direction) with the fewest modalities, if one of size <= max_size exists.

    State sets are enumerated by the least size of a formula denoting them, so
    the first hit is size-minimal. The cost depends on how many distinct state
    sets show up, so the search is bounded by ``max_denotations`` rather than
    by the number of states.
    """
    full = lts.all_states_mask
    recipe: dict[int, tuple] = {full: ("true",), 0: ("neg", full)}
    size_of = {full: 0, 0: 0}
    upto: list[list[int]] = [[full, 0]]  # upto[n]: masks of least size <= n

    found = None
    for n in range(1, max_size + 1):
        fresh: dict[int, tuple] = {}

        def offer(x: int, how: tuple):
            if x not in size_of and x not in fresh:
                fresh[x] = how

        for a in range(lts.num_actions):
            for x in upto[n - 1]:
                offer(_pre(lts, a, x), ("dia", a, x))
        for i in range(1, n // 2 + 1):
            for x in upto[i]:
                for y in upto[n - i]:
                    offer(x & y, ("and", x, y))
        for x in list(fresh):
            offer(full & ~x, ("neg", x))
        for x, how in fresh.items():
            size_of[x] = n
            recipe[x] = how
        if len(size_of) > max_denotations:
            raise OracleBoundsError(f"more than {max_denotations} state sets; instance too large")
        upto.append(upto[-1] + list(fresh))
        hits = [x for x in fresh if bool(x >> s & 1) != bool(x >> t & 1)]
        if hits:
            found = min(hits)
            break
    if found is None:
        return None
    store = store if store is not None else FormulaStore()
    return MinFormula(size_of[found], store, _build(store, lts, recipe, found))


def _build(store: FormulaStore, lts: Lts, recipe: dict[int, tuple], x: int) -> NodeId:
    how = recipe[x]
    if how[0] == "true":
        return store.true
    if how[0] == "neg":
        return store.mk_neg(_build(store, lts, recipe, how[1]))
    if how[0] == "dia":
        return store.mk_diamond(lts.actions[how[1]], _build(store, lts, recipe, how[2]))
    return store.mk_and([_build(store, lts, recipe, how[1]), _build(store, lts, recipe, how[2])])
