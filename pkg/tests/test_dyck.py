"""Balancedness, span classification, membership, trace words."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dycknf import (
    dyck_membership,
    enumerate_trace_language,
    extend_grammar,
    is_balanced,
    pair_classify,
    stack_dyck_check,
    trace_word,
)
from dycknf.dyck import DyckError, iter_leftmost_derivations, parse_trace
from dycknf.grammar import Derivation, GrammarError, Step

from helpers import L, R, lin_traces, random_brackets, word


def brs(text: str) -> tuple:
    return parse_trace(text)


def test_is_balanced():
    assert is_balanced(brs("[1 ]1"))
    assert not is_balanced(brs("]1 [1"))
    assert is_balanced(brs("[1 [1 ]1 ]1"))
    assert is_balanced(())
    with pytest.raises(DyckError):
        is_balanced(brs("[1 ]2"))
    with pytest.raises(DyckError):
        is_balanced(("x",))


def test_pair_classify_nested():
    w = brs("[1 [2 ]2 ]1")
    k = pair_classify(w, 1, 4)
    assert k.matched and k.nested and not k.reducible


def test_pair_classify_reducible():
    w = brs("[1 ]1 [2 ]2")
    k = pair_classify(w, 1, 4)
    assert k.matched and k.reducible and not k.nested


def test_pair_classify_unmatched():
    w = brs("[1 [2 ]2 ]1")
    assert not pair_classify(w, 2, 4).matched


def test_pair_classify_range_errors():
    with pytest.raises(DyckError):
        pair_classify(brs("[1 ]1"), 0, 1)
    with pytest.raises(DyckError):
        pair_classify(brs("[1 ]1"), 1, 3)


@given(
    st.lists(
        st.tuples(st.integers(min_value=1, max_value=4), st.booleans()), max_size=16
    )
)
@settings(max_examples=300)
def test_nested_implies_irreducible(pairs):
    from dycknf.grammar import Bracket

    w = tuple(Bracket(i, r) for i, r in pairs)
    for i in range(1, len(w) + 1):
        for j in range(i, len(w) + 1):
            k = pair_classify(w, i, j)
            if k.nested:
                assert k.matched and not k.reducible


def test_membership_expression_trace():
    t = brs("[2 [1 [4 ]4 [7 ]7 ]1 [7 ]7 ]2 [6 ]6")
    assert dyck_membership(t, 7)
    assert stack_dyck_check(t, 7)


def test_membership_mismatched_pair():
    assert not dyck_membership(brs("[1 ]2"), 2)


def test_membership_agrees_with_stack_seeded():
    rng = random.Random(42)
    for _ in range(2000):
        w = random_brackets(rng, 16, 3)
        assert dyck_membership(w, 3) == stack_dyck_check(w, 3)


@given(
    st.lists(
        st.tuples(st.integers(min_value=1, max_value=3), st.booleans()), max_size=14
    )
)
@settings(max_examples=400)
def test_membership_agrees_with_stack_property(pairs):
    from dycknf.grammar import Bracket

    w = tuple(Bracket(i, r) for i, r in pairs)
    assert dyck_membership(w, 3) == stack_dyck_check(w, 3)


# ---------------------------------------------------------------------------
# trace words


def expression_derivation():
    return Derivation(
        (
            Step("E0", (L(2), R(2)), 0),
            Step(L(2), (L(1), R(1)), 0),
            Step(L(1), (L(4), R(4)), 0),
            Step(L(4), ("a",), 0),
            Step(R(4), (L(7), R(7)), 1),
            Step(L(7), ("*",), 1),
            Step(R(7), ("a",), 2),
            Step(R(1), (L(7), R(7)), 3),
            Step(L(7), ("*",), 3),
            Step(R(7), ("a",), 4),
            Step(R(2), (L(6), R(6)), 5),
            Step(L(6), ("+",), 5),
            Step(R(6), ("a",), 6),
        )
    )


def test_trace_of_expression_derivation(expr_dnf):
    tw = trace_word(expr_dnf, expression_derivation())
    assert tw.source_word == word("a*a*a+a")
    assert tw.brackets == brs("[2 [1 [4 ]4 [7 ]7 ]1 [7 ]7 ]2 [6 ]6")
    assert len(tw) == 2 * 7 - 2


def test_trace_of_extension_derivation(expr_dnf):
    gx = extend_grammar(expr_dnf)
    d = Derivation((Step("E0", (L(8), R(8)), 0), Step(L(8), ("a",), 0), Step(R(8), (), 1)))
    tw = trace_word(gx, d)
    assert tw.brackets == (L(8), R(8))
    assert tw.source_word == word("a")


def test_trace_rejects_invalid_derivations(expr_dnf):
    with pytest.raises(GrammarError):
        trace_word(expr_dnf, Derivation((Step("E0", (L(2), R(2)), 0),)))  # incomplete
    bad = Derivation((Step(str(L(1)), (L(1), R(1)), 0),))
    with pytest.raises(GrammarError):
        trace_word(expr_dnf, bad)


def test_trace_length_follows_word_length(lin):
    for w, d in iter_leftmost_derivations(lin, 11):
        if len(d.steps) >= 2:
            assert len(trace_word(lin, d).brackets) == 2 * len(w) - 2


def test_enumerated_traces_match_derivation_traces(lin, lin_ext):
    by_derivation = set()
    for w, d in iter_leftmost_derivations(lin, 11):
        if len(d.steps) >= 2:
            by_derivation.add(trace_word(lin, d).brackets)
    assert enumerate_trace_language(lin_ext, 11).trace_set() == by_derivation


def test_trace_language_lin_closed_form(lin_ext):
    assert enumerate_trace_language(lin_ext, 14).trace_set() == lin_traces(14)


def test_trace_language_empty_grammar():
    from dycknf import dyck_grammar_from_cfg, parse_grammar

    g = dyck_grammar_from_cfg(parse_grammar("start: S\nS -> [1 ]1\n[1 -> [1 ]1\n]1 -> 'b'\n"))
    gx = extend_grammar(g)
    assert enumerate_trace_language(gx, 8).trace_set() == set()


def test_traces_are_dyck_members(cf_ext):
    en = enumerate_trace_language(cf_ext, 12)
    assert en.trace_set()
    for t in en.trace_set():
        assert dyck_membership(t, cf_ext.K)


def test_ambiguity_counts(expr_dnf):
    gx = extend_grammar(expr_dnf)
    counts = enumerate_trace_language(gx, 5).derivations_per_word
    assert counts[word("a")] == 1
    assert counts[word("a+a")] == 1
    assert counts[word("a*a+a")] == 1  # the grammar keeps precedence unambiguous


def subtree_spans(d: Derivation, nts) -> list:
    """Trace spans (1-based, inclusive) read off the derivation tree.

    A leftmost derivation lists tree nodes in preorder, so each node's
    subtree is a contiguous step interval, recoverable with a plain stack;
    the reading of the subtree below a step covers the trace positions of
    the steps strictly inside its interval."""
    ends = {}
    stack: list = []
    for i, s in enumerate(d.steps):
        while stack and stack[-1][1] == 0:
            idx, _ = stack.pop()
            ends[idx] = i - 1
        if stack:
            stack[-1][1] -= 1
        arity = sum(1 for x in s.rhs if x in nts)
        stack.append([i, arity])
    while stack:
        idx, _ = stack.pop()
        ends[idx] = len(d.steps) - 1
    spans = []
    for i, s in enumerate(d.steps):
        if len(s.rhs) == 2 and ends[i] > i:
            spans.append((i + 1, ends[i]))  # step j sits at trace position j
    return spans


def test_matched_spans_correspond_to_subtrees(lin):
    checked = 0
    for w, d in iter_leftmost_derivations(lin, 11):
        if len(d.steps) < 2:
            continue
        t = trace_word(lin, d).brackets
        for (i, j) in subtree_spans(d, lin.nonterminals):
            assert pair_classify(t, i, j).matched
            checked += 1
    assert checked > 10
