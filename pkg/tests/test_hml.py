from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import small_lts
from hmldist.hml import (
    FormulaError,
    FormulaStore,
    FormulaSyntaxError,
    _occurrences_postorder,
    distinguishes,
    evaluate,
    formula_traces,
    holds,
    metrics,
    normalize_negations,
    parse_formula,
    reduce_irreducible,
    render,
    replace_at,
    trace_formula,
    tree_nodes,
)
from hmldist.lts import gen_chain_a, gen_example_m, has_trace, traces_up_to
from hmldist.oracle import naive_evaluate

# formulas as nested tuples, built into a store by _build
ast = st.recursive(
    st.just(("true",)),
    lambda inner: st.one_of(
        st.tuples(st.just("dia"), st.sampled_from("abc"), inner),
        st.tuples(st.just("neg"), inner),
        st.tuples(st.just("and"), st.lists(inner, min_size=1, max_size=3)),
    ),
    max_leaves=8,
)


def _build(store, tree):
    if tree[0] == "true":
        return store.true
    if tree[0] == "dia":
        return store.mk_diamond(tree[1], _build(store, tree[2]))
    if tree[0] == "neg":
        return store.mk_neg(_build(store, tree[1]))
    return store.mk_and([_build(store, c) for c in tree[1]])


def test_hash_consing_shares_equal_terms():
    store = FormulaStore()
    a1 = store.mk_diamond("a", store.true)
    a2 = store.mk_diamond("a", store.true)
    assert a1 == a2
    b = store.mk_diamond("b", store.true)
    assert store.mk_and([a1, b]) == store.mk_and([b, a1, a1])


def test_and_flattens_and_drops_true():
    store = FormulaStore()
    a = store.mk_diamond("a", store.true)
    b = store.mk_diamond("b", store.true)
    c = store.mk_neg(a)
    nested = store.mk_and([a, store.mk_and([b, c]), store.true])
    assert store.children(nested) == tuple(sorted((a, b, c)))
    assert store.mk_and([store.true, store.true]) == store.true
    assert store.mk_and([a]) == a
    with pytest.raises(FormulaError):
        store.mk_and([])


def test_invalid_ids_rejected():
    store = FormulaStore()
    with pytest.raises(FormulaError):
        store.mk_neg(99)
    with pytest.raises(FormulaError):
        store.mk_diamond("", store.true)


def test_metrics_of_small_formulas():
    store = FormulaStore()
    f = parse_formula(store, "<a>!<a>!<a>!<a>true")
    m = metrics(store, f)
    assert (m.size, m.dag_size, m.depth, m.negdepth) == (4, 4, 4, 3)
    assert metrics(store, store.true).size == 0
    g = parse_formula(store, "<a>true && !<b><c>true")
    assert (metrics(store, g).size, metrics(store, g).depth, metrics(store, g).negdepth) == (3, 2, 1)


def test_shared_formula_size_is_exponential_but_dag_linear():
    store = FormulaStore()
    node = store.true
    for i in range(200):
        node = store.mk_and([store.mk_diamond("a", node), store.mk_diamond("b", node)])
    m = metrics(store, node)
    assert m.size == 2 ** 201 - 2
    assert m.dag_size == 400
    assert m.depth == 200
    with pytest.raises(FormulaError):
        render(store, node, "inline")
    text = render(store, node, "equations")
    again = parse_formula(FormulaStore(), text)
    assert again is not None


def test_equation_rendering_of_shared_subformula():
    store = FormulaStore()
    shared = store.mk_diamond("b", store.true)
    root = store.mk_and([shared, store.mk_diamond("a", shared)])
    assert render(store, root, "equations") == "phi1 = phi2 && <a>phi2\nphi2 = <b>true"
    assert render(store, root) == "<b>true && <a><b>true"


@given(ast)
def test_render_parse_round_trip(tree):
    store = FormulaStore()
    node = _build(store, tree)
    assert parse_formula(store, render(store, node)) == node
    assert parse_formula(store, render(store, node, "equations")) == node


def test_parser_sugar():
    store = FormulaStore()
    assert parse_formula(store, "false") == store.mk_neg(store.true)
    box = parse_formula(store, "[a]false")
    assert box == store.mk_neg(store.mk_diamond("a", store.mk_neg(store.mk_neg(store.true))))
    disj = parse_formula(store, "<a>true || <b>true")
    assert store.kind(disj) == "neg"
    grouped = parse_formula(store, "!(<a>true && <b>true)")
    assert store.kind(grouped) == "neg"


def test_parser_equations_with_forward_reference():
    store = FormulaStore()
    node = parse_formula(store, "top = <a>X && X\nX = <b>true\n")
    assert render(store, node) == "<b>true && <a><b>true"


@pytest.mark.parametrize(
    "text",
    ["<a>", "<>true", "true &&", "(true", "x = <a>x", "a = true\na = true", "y = z", "true ? true"],
)
def test_parser_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(FormulaStore(), text)


@settings(max_examples=150)
@given(small_lts(), ast)
def test_evaluate_matches_reference_semantics(lts, tree):
    store = FormulaStore()
    node = _build(store, tree)
    assert evaluate(store, node, lts) == naive_evaluate(store, node, lts)


def test_unknown_label_denotes_empty_set():
    store = FormulaStore()
    lts = gen_chain_a(2)
    assert evaluate(store, parse_formula(store, "<zz>true"), lts) == frozenset()
    assert evaluate(store, parse_formula(store, "[zz]false"), lts) == frozenset({0, 1, 2})


@settings(max_examples=100)
@given(small_lts(max_states=5, max_actions=2), st.lists(st.sampled_from("ab"), max_size=4))
def test_trace_formula_semantics(lts, word):
    """A state satisfies the trace formula of w iff w is one of its traces."""
    store = FormulaStore()
    node = trace_formula(store, word)
    for s in range(lts.num_states):
        assert holds(store, node, lts, s) == has_trace(lts, s, word)
        assert holds(store, node, lts, s) == (tuple(word) in traces_up_to(lts, s, len(word)))


def test_formula_traces():
    store = FormulaStore()
    node = parse_formula(store, "<a>!<b>true && <c>true")
    assert formula_traces(store, node, 5) == {("a",), ("a", "b"), ("c",)}
    assert formula_traces(store, node, 1) == {("a",), ("c",)}


def test_replace_at_paths():
    store = FormulaStore()
    node = parse_formula(store, "<a>(<b>true && !<c>true)")
    paths = {store.node(n): p for p, n in _occurrences_postorder(store, node)}
    target = paths[store.node(parse_formula(store, "<b>true"))]
    replaced = replace_at(store, node, target, store.true)
    assert render(store, replaced) == "<a>!<c>true"


def test_reduce_irreducible_on_example_m():
    store = FormulaStore()
    lts = gen_example_m()
    # <a><a>true separates s0 from s1 and is already irreducible, yet <b>true is smaller
    chain = parse_formula(store, "<a><a>true")
    assert reduce_irreducible(store, chain, lts, 0, 1) == chain
    both = parse_formula(store, "<a><a>true && !<b>true")
    reduced = reduce_irreducible(store, both, lts, 0, 1)
    assert distinguishes(store, reduced, lts, 0, 1)
    assert metrics(store, reduced).size < metrics(store, both).size


def test_reduce_keeps_orientation():
    store = FormulaStore()
    lts = gen_example_m()
    node = parse_formula(store, "!<b>true && <a>true")
    reduced = reduce_irreducible(store, node, lts, 0, 1)
    assert distinguishes(store, reduced, lts, 0, 1)


def test_reduce_rejects_non_distinguishing():
    store = FormulaStore()
    with pytest.raises(FormulaError):
        reduce_irreducible(store, store.true, gen_example_m(), 0, 1)


@settings(max_examples=80)
@given(small_lts(max_states=5), ast)
def test_reduce_result_is_irreducible(lts, tree):
    store = FormulaStore()
    node = _build(store, tree)
    pairs = [
        (s, t)
        for s in range(lts.num_states)
        for t in range(lts.num_states)
        if distinguishes(store, node, lts, s, t)
    ]
    if not pairs:
        return
    s, t = pairs[0]
    reduced = reduce_irreducible(store, node, lts, s, t)
    assert distinguishes(store, reduced, lts, s, t)
    assert tree_nodes(store, reduced) <= tree_nodes(store, node) + 1
    # negation preserves (symmetric) distinguishing, so a wrapping orientation
    # negation does not change which replacements still distinguish
    for path, n in _occurrences_postorder(store, reduced):
        if not path or store.kind(n) == "true":
            continue
        m = evaluate(store, replace_at(store, reduced, path, store.true), lts)
        assert (s in m) == (t in m), "a single replacement still distinguishes"


@given(ast)
def test_normalize_negations_preserves_semantics(tree):
    store = FormulaStore()
    node = _build(store, tree)
    norm = normalize_negations(store, node)
    lts = gen_example_m()
    assert evaluate(store, norm, lts) == evaluate(store, node, lts)
    assert "!!" not in render(store, norm)
