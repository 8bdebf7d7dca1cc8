"""Hennessy-Milner formulas as hash-consed shared terms.

Nodes live in a :class:`FormulaStore` and are referred to by integer ids.
Structurally equal formulas always get the same id, so a formula built by an
algorithm is automatically a DAG with maximal sharing.
"""

from __future__ import annotations

import re
import weakref
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .lts import Lts, TraceWord, mask_to_set

NodeId = int

TRUE = "true"
DIA = "dia"
NEG = "neg"
AND = "and"

INLINE_LIMIT = 10**6


class FormulaError(ValueError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


@dataclass(frozen=True)
class Metrics:
    size: int  # modalities in the unfolded tree; arbitrary precision
    dag_size: int  # distinct diamond nodes
    depth: int
    negdepth: int

    def to_json(self) -> dict:
        return {
            "size": str(self.size),
            "dag_size": self.dag_size,
            "depth": self.depth,
            "negdepth": self.negdepth,
        }


class FormulaStore:
    """Node table plus structural index and memo tables.

    A node is a tuple: ``("true",)``, ``("dia", label, child)``,
    ``("neg", child)`` or ``("and", children)`` where ``children`` is a sorted
    tuple of at least two distinct ids, none of which is a conjunction or true.
    Children always have smaller ids than their parents.
    """

    def __init__(self):
        self._nodes: list[tuple] = []
        self._index: dict[tuple, NodeId] = {}
        self._local: dict[NodeId, tuple[int, int, int, int]] = {}
        self._eval: weakref.WeakKeyDictionary[Lts, dict[NodeId, int]] = weakref.WeakKeyDictionary()
        self.true = self._intern((TRUE,))

    def __len__(self):
        return len(self._nodes)

    def node(self, n: NodeId) -> tuple:
        return self._nodes[n]

    def kind(self, n: NodeId) -> str:
        return self._nodes[n][0]

    def children(self, n: NodeId) -> tuple[NodeId, ...]:
        node = self._nodes[n]
        if node[0] == DIA:
            return (node[2],)
        if node[0] == NEG:
            return (node[1],)
        if node[0] == AND:
            return node[1]
        return ()

    def _intern(self, key: tuple) -> NodeId:
        n = self._index.get(key)
        if n is None:
            n = len(self._nodes)
            self._nodes.append(key)
            self._index[key] = n
        return n

    def _check(self, n: NodeId):
        if not (isinstance(n, int) and 0 <= n < len(self._nodes)):
            raise FormulaError(f"invalid node id {n!r}")

    # construction

    def mk_true(self) -> NodeId:
        return self.true

    def mk_diamond(self, label: str, child: NodeId) -> NodeId:
        self._check(child)
        if not label:
            raise FormulaError("empty action label")
        return self._intern((DIA, label, child))

    def mk_neg(self, child: NodeId) -> NodeId:
        self._check(child)
        return self._intern((NEG, child))

    def mk_and(self, children: Iterable[NodeId]) -> NodeId:
        children = list(children)
        if not children:
            raise FormulaError("empty conjunction; use mk_true")
        flat: set[NodeId] = set()
        for c in children:
            self._check(c)
            node = self._nodes[c]
            if node[0] == AND:
                flat.update(node[1])
            elif node[0] != TRUE:
                flat.add(c)
        if not flat:
            return self.true
        if len(flat) == 1:
            return flat.pop()
        return self._intern((AND, tuple(sorted(flat))))

    def mk_false(self) -> NodeId:
        return self.mk_neg(self.true)

    def mk_box(self, label: str, child: NodeId) -> NodeId:
        return self.mk_neg(self.mk_diamond(label, self.mk_neg(child)))

    def mk_or(self, children: Iterable[NodeId]) -> NodeId:
        return self.mk_neg(self.mk_and(self.mk_neg(c) for c in children))

    # traversal helpers

    def reachable(self, root: NodeId) -> list[NodeId]:
        """Ids reachable from ``root`` in ascending (children-first) order."""
        self._check(root)
        seen = {root}
        stack = [root]
        while stack:
            n = stack.pop()
            for c in self.children(n):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return sorted(seen)

    def labels(self, root: NodeId) -> set[str]:
        return {self._nodes[n][1] for n in self.reachable(root) if self._nodes[n][0] == DIA}


# --- semantics ---------------------------------------------------------------

def _pending(store: FormulaStore, root: NodeId, memo: dict) -> list[NodeId]:
    """Nodes under ``root`` missing from ``memo``, children first; memoized subtrees are not entered."""
    seen = {root}
    stack = [root]
    while stack:
        n = stack.pop()
        for c in store.children(n):
            if c not in seen and c not in memo:
                seen.add(c)
                stack.append(c)
    return sorted(seen)


def evaluate_mask(store: FormulaStore, node: NodeId, lts: Lts) -> int:
    """Denotation of ``node`` in ``lts`` as a bit mask over state ids.

    A diamond over a label the LTS does not use denotes the empty set.
    """
    memo = store._eval.get(lts)
    if memo is None:
        memo = {}
        store._eval[lts] = memo
    if node in memo:
        return memo[node]
    full = lts.all_states_mask
    for n in _pending(store, node, memo):
        entry = store._nodes[n]
        kind = entry[0]
        if kind == TRUE:
            value = full
        elif kind == DIA:
            a = lts.action_id(entry[1])
            value = 0 if a is None else lts.pre_image(a, memo[entry[2]])
        elif kind == NEG:
            value = full & ~memo[entry[1]]
        else:
            value = full
            for c in entry[1]:
                value &= memo[c]
        memo[n] = value
    return memo[node]


def evaluate(store: FormulaStore, node: NodeId, lts: Lts) -> frozenset[int]:
    return mask_to_set(evaluate_mask(store, node, lts))


def holds(store: FormulaStore, node: NodeId, lts: Lts, s: int) -> bool:
    return bool(evaluate_mask(store, node, lts) >> s & 1)


def distinguishes(store: FormulaStore, node: NodeId, lts: Lts, s: int, t: int) -> bool:
    """True iff ``s`` satisfies ``node`` and ``t`` does not."""
    mask = evaluate_mask(store, node, lts)
    return bool(mask >> s & 1) and not mask >> t & 1


# --- metrics -----------------------------------------------------------------

def _local_metrics(store: FormulaStore, root: NodeId) -> tuple[int, int, int, int]:
    """(size, depth, negdepth, tree_nodes) of the unfolded tree, memoized on the DAG."""
    memo = store._local
    if root in memo:
        return memo[root]
    for n in _pending(store, root, memo):
        entry = store._nodes[n]
        kind = entry[0]
        if kind == TRUE:
            value = (0, 0, 0, 1)
        elif kind == DIA:
            size, depth, neg, nodes = memo[entry[2]]
            value = (size + 1, depth + 1, neg, nodes + 1)
        elif kind == NEG:
            size, depth, neg, nodes = memo[entry[1]]
            value = (size, depth, neg + 1, nodes + 1)
        else:
            parts = [memo[c] for c in entry[1]]
            value = (
                sum(p[0] for p in parts),
                max(p[1] for p in parts),
                max(p[2] for p in parts),
                1 + sum(p[3] for p in parts),
            )
        memo[n] = value
    return memo[root]


def metrics(store: FormulaStore, node: NodeId) -> Metrics:
    size, depth, negdepth, _ = _local_metrics(store, node)
    dag_size = sum(1 for n in store.reachable(node) if store.kind(n) == DIA)
    return Metrics(size=size, dag_size=dag_size, depth=depth, negdepth=negdepth)


def tree_nodes(store: FormulaStore, node: NodeId) -> int:
    """Number of nodes of the fully unfolded formula tree (all connectives)."""
    return _local_metrics(store, node)[3]


# --- traces ------------------------------------------------------------------

def trace_formula(store: FormulaStore, word: Sequence[str]) -> NodeId:
    node = store.true
    for label in reversed(word):
        node = store.mk_diamond(label, node)
    return node


def formula_traces(store: FormulaStore, node: NodeId, length_bound: int) -> set[TraceWord]:
    """Traces of a formula of length at most ``length_bound``."""
    if length_bound < 0:
        raise ValueError("length_bound must be non-negative")
    memo: dict[tuple[NodeId, int], frozenset[TraceWord]] = {}

    def go(n: NodeId, bound: int) -> frozenset[TraceWord]:
        key = (n, bound)
        if key in memo:
            return memo[key]
        entry = store.node(n)
        if entry[0] == TRUE:
            result = frozenset([()])
        elif entry[0] == DIA:
            if bound == 0:
                result = frozenset()
            else:
                label = entry[1]
                result = frozenset([(label,)]) | {(label,) + w for w in go(entry[2], bound - 1)}
        elif entry[0] == NEG:
            result = go(entry[1], bound)
        else:
            result = frozenset().union(*(go(c, bound) for c in entry[1]))
        memo[key] = result
        return result

    return set(go(node, length_bound))


# --- rewriting -----------------------------------------------------------------

def replace_at(store: FormulaStore, root: NodeId, path: Sequence[int], replacement: NodeId) -> NodeId:
    """Rebuild ``root`` with the occurrence at ``path`` (child indices) replaced."""
    if not path:
        return replacement
    entry = store.node(root)
    head, rest = path[0], path[1:]
    if entry[0] == DIA:
        return store.mk_diamond(entry[1], replace_at(store, entry[2], rest, replacement))
    if entry[0] == NEG:
        return store.mk_neg(replace_at(store, entry[1], rest, replacement))
    if entry[0] == AND:
        kids = list(entry[1])
        kids[head] = replace_at(store, kids[head], rest, replacement)
        return store.mk_and(kids)
    raise FormulaError("path leads below a leaf")


def _occurrences_postorder(store: FormulaStore, root: NodeId):
    """Yield ``(path, node)`` for every tree occurrence, children first, leftmost first."""
    stack: list[tuple[tuple[int, ...], NodeId, bool]] = [((), root, False)]
    while stack:
        path, n, expanded = stack.pop()
        if expanded:
            yield path, n
            continue
        stack.append((path, n, True))
        kids = store.children(n)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((path + (i,), kids[i], False))


def reduce_irreducible(
    store: FormulaStore,
    node: NodeId,
    lts: Lts,
    s: int,
    t: int,
    max_occurrences: int = 200_000,
) -> NodeId:
    """Greedily replace subformula occurrences by true while the result still distinguishes.

    Stops when no single replacement keeps ``s`` and ``t`` apart. The result is
    oriented like the input (if ``s`` satisfied the input, it satisfies the result).
    """
    mask = evaluate_mask(store, node, lts)
    s_in = bool(mask >> s & 1)
    if s_in == bool(mask >> t & 1):
        raise FormulaError("formula does not distinguish the given states")
    if tree_nodes(store, node) > max_occurrences:
        raise FormulaError("formula too large to reduce occurrence by occurrence")

    def separates(n: NodeId) -> bool:
        m = evaluate_mask(store, n, lts)
        return bool(m >> s & 1) != bool(m >> t & 1)

    current = node
    progress = True
    while progress:
        progress = False
        for path, n in _occurrences_postorder(store, current):
            if not path or store.kind(n) == TRUE:
                continue
            candidate = replace_at(store, current, path, store.true)
            if candidate != current and separates(candidate):
                current = candidate
                progress = True
                break

    if holds(store, current, lts, s) != s_in:
        current = store.mk_neg(current)
    return current


def normalize_negations(store: FormulaStore, node: NodeId) -> NodeId:
    """Collapse every double negation; the denotation is unchanged."""
    out: dict[NodeId, NodeId] = {}
    for n in store.reachable(node):
        entry = store.node(n)
        if entry[0] == TRUE:
            out[n] = n
        elif entry[0] == DIA:
            out[n] = store.mk_diamond(entry[1], out[entry[2]])
        elif entry[0] == NEG:
            inner = out[entry[1]]
            inner_entry = store.node(inner)
            out[n] = inner_entry[1] if inner_entry[0] == NEG else store.mk_neg(inner)
        else:
            out[n] = store.mk_and(out[c] for c in entry[1])
    return out[node]


# --- text rendering ------------------------------------------------------------

def _needs_parens(store: FormulaStore, n: NodeId, names: dict[NodeId, str]) -> bool:
    return n not in names and store.kind(n) == AND


def _render_body(store: FormulaStore, n: NodeId, names: dict[NodeId, str], top: bool) -> str:
    if not top and n in names:
        return names[n]
    entry = store.node(n)
    if entry[0] == TRUE:
        return "true"
    if entry[0] in (DIA, NEG):
        child = entry[2] if entry[0] == DIA else entry[1]
        prefix = f"<{entry[1]}>" if entry[0] == DIA else "!"
        inner = _render_body(store, child, names, False)
        if _needs_parens(store, child, names):
            inner = f"({inner})"
        return prefix + inner
    return " && ".join(_render_body(store, c, names, False) for c in entry[1])


def render(store: FormulaStore, node: NodeId, style: str = "inline") -> str:
    """Render as a single inline formula or as a block of named equations."""
    if style == "inline":
        if tree_nodes(store, node) > INLINE_LIMIT:
            raise FormulaError("formula too large to unfold; use the equations style")
        return _render_body(store, node, {}, True)
    if style == "equations":
        names = equation_names(store, node)
        lines = [f"{name} = {_render_body(store, n, names, True)}" for n, name in names.items()]
        return "\n".join(lines)
    raise ValueError(f"unknown style {style!r}")


def equation_names(store: FormulaStore, root: NodeId) -> dict[NodeId, str]:
    """Names for the root and every non-trivial node referenced at least twice.

    Names are handed out in pre-order of first visit, leftmost child first.
    """
    refs: dict[NodeId, int] = {}
    for n in store.reachable(root):
        for c in store.children(n):
            refs[c] = refs.get(c, 0) + 1
    names: dict[NodeId, str] = {}
    seen: set[NodeId] = set()
    stack = [root]
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        if n == root or (refs.get(n, 0) >= 2 and store.kind(n) != TRUE):
            names[n] = f"phi{len(names) + 1}"
        stack.extend(reversed(store.children(n)))
    return names


# --- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<and>&&)
  | (?P<or>\|\|)
  | (?P<not>!)
  | (?P<dia><[^>\n]*>)
  | (?P<box>\[[^\]\n]*\])
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<eq>=)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)

_EQUATION_LINE = re.compile(r"^\s*[A-Za-z_][A-Za-z0-9_']*\s*=")


def _tokenize(text: str, offset: int) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", offset + pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), offset + pos))
        pos = m.end()
    tokens.append(("end", "", offset + len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            raise FormulaSyntaxError(f"expected {kind}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def formula(self):
        parts = [self.conj()]
        while self.peek()[0] == "or":
            self.i += 1
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else ("or", parts)

    def conj(self):
        parts = [self.unary()]
        while self.peek()[0] == "and":
            self.i += 1
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else ("and", parts)

    def unary(self):
        kind, text, pos = self.peek()
        if kind == "not":
            self.i += 1
            return ("neg", self.unary())
        if kind in ("dia", "box"):
            self.i += 1
            label = text[1:-1].strip()
            if not label:
                raise FormulaSyntaxError("empty action label", pos)
            return (kind, label, self.unary())
        return self.atom()

    def atom(self):
        kind, text, pos = self.peek()
        if kind == "lpar":
            self.i += 1
            inner = self.formula()
            self.take("rpar")
            return inner
        if kind == "ident":
            self.i += 1
            if text == "true":
                return ("true",)
            if text == "false":
                return ("false",)
            return ("ref", text, pos)
        raise FormulaSyntaxError(f"unexpected {text or 'end of input'!r}", pos)


def parse_formula(store: FormulaStore, text: str) -> NodeId:
    """Parse formula text (or a block of ``name = formula`` lines) into ``store``.

    In an equation block the first equation is the result, names may be used
    before they are defined, and each name is built once, so repeated
    references are shared.
    """
    lines = text.splitlines()
    equations: dict[str, tuple] = {}
    order: list[str] = []
    if any(_EQUATION_LINE.match(line) and not line.strip().startswith(("true", "false")) for line in lines):
        offset = 0
        for line in lines:
            if line.strip():
                tokens = _tokenize(line, offset)
                p = _Parser(tokens)
                name_tok = p.take("ident")
                if name_tok[1] in ("true", "false"):
                    raise FormulaSyntaxError("keyword used as equation name", name_tok[2])
                p.take("eq")
                body = p.formula()
                p.take("end")
                if name_tok[1] in equations:
                    raise FormulaSyntaxError(f"duplicate equation {name_tok[1]!r}", name_tok[2])
                equations[name_tok[1]] = body
                order.append(name_tok[1])
            offset += len(line) + 1
        root_ast = ("ref", order[0], 0)
    else:
        p = _Parser(_tokenize(text, 0))
        root_ast = p.formula()
        p.take("end")

    built: dict[str, NodeId] = {}
    building: set[str] = set()

    def build(ast) -> NodeId:
        kind = ast[0]
        if kind == "true":
            return store.true
        if kind == "false":
            return store.mk_false()
        if kind == "neg":
            return store.mk_neg(build(ast[1]))
        if kind == "dia":
            return store.mk_diamond(ast[1], build(ast[2]))
        if kind == "box":
            return store.mk_box(ast[1], build(ast[2]))
        if kind == "and":
            return store.mk_and([build(x) for x in ast[1]])
        if kind == "or":
            return store.mk_or([build(x) for x in ast[1]])
        name, pos = ast[1], ast[2]
        if name in built:
            return built[name]
        if name not in equations:
            raise FormulaSyntaxError(f"undefined name {name!r}", pos)
        if name in building:
            raise FormulaSyntaxError(f"cyclic definition of {name!r}", pos)
        building.add(name)
        built[name] = build(equations[name])
        building.discard(name)
        return built[name]

    return build(root_ast)
