"""Dependency graphs, path-class expressions, the stitched graph, the cover."""

import pytest

from dycknf import (
    build_dependency_graph,
    build_extended_graph,
    dyck_grammar_from_cfg,
    dyck_membership,
    enumerate_trace_language,
    extend_grammar,
    extract_left_regexes,
    mirror_extend,
    parse_grammar,
    regular_cover,
    classify_pairs,
)
from dycknf import rex
from dycknf.depgraph import GraphError, path_words
from dycknf.rex import alt, cat, plus, star, sym

from helpers import L, R


def b(x):
    return sym(x)


def test_lin_dependency_graph_matches_figure(lin, lin_cls):
    dg = build_dependency_graph(lin, lin_cls, "S")
    assert dg.edges == frozenset(
        {
            ("S", R(1)),
            (R(1), L(2)),
            (L(2), L(3)),
            (L(3), L(2)),
            (L(3), R(4)),
            (R(4), L(5)),
            (L(5), R(6)),
            (R(6), R(1)),
            (R(6), L(7)),
        }
    )
    assert dg.finals == frozenset({L(7)})
    assert dg.unreachable() == frozenset()


def test_cf_dependency_graph_for_silent_root(cf, cf_cls):
    dg = build_dependency_graph(cf, cf_cls, R(6))
    assert dg.edges == frozenset(
        {
            (R(6), L(2)),
            (L(2), L(6)),
            (L(2), R(7)),
            (L(6), L(3)),
            (L(3), R(7)),
            (R(7), L(3)),
            (R(7), L(4)),
        }
    )
    assert dg.finals == frozenset({L(4)})


def test_single_rule_graph():
    g = dyck_grammar_from_cfg(parse_grammar("start: S\nS -> [1 ]1\n[1 -> 'a'\n]1 -> 'b'\n"))
    cls = classify_pairs(g)
    dg = build_dependency_graph(g, cls, "S")
    assert dg.edges == frozenset({("S", L(1))})
    assert dg.finals == frozenset({L(1)})


def test_root_validation(lin, lin_cls, cf, cf_cls):
    with pytest.raises(GraphError):
        build_dependency_graph(lin, lin_cls, R(2))  # not a silent pair
    with pytest.raises(GraphError):
        build_dependency_graph(cf, cf_cls, L(1))  # left bracket


# ---------------------------------------------------------------------------
# path expressions


def test_lin_left_regex_exact(lin, lin_cls):
    dg = build_dependency_graph(lin, lin_cls, "S")
    lefts = extract_left_regexes(dg)
    expected = cat(
        b("S"),
        plus(cat(b(R(1)), plus(cat(b(L(2)), b(L(3)))), b(R(4)), b(L(5)), b(R(6)))),
        b(L(7)),
    )
    assert lefts == [expected]


def test_lin_mirror_exact(lin, lin_cls):
    dg = build_dependency_graph(lin, lin_cls, "S")
    (left,) = extract_left_regexes(dg)
    full = mirror_extend(left, lin_cls)
    expected = cat(
        b("S"),
        plus(cat(b(R(1)), plus(cat(b(L(2)), b(L(3)))), b(R(4)), b(L(5)), b(R(6)))),
        b(L(7)),
        plus(cat(b(R(5)), plus(cat(b(R(3)), b(R(2)))))),
    )
    assert full == expected


def test_cf_silent6_two_classes(cf, cf_cls):
    dg = build_dependency_graph(cf, cf_cls, R(6))
    lefts = extract_left_regexes(dg)
    via6 = cat(b(R(6)), b(L(2)), b(L(6)), plus(cat(b(L(3)), b(R(7)))), b(L(4)))
    direct = cat(b(R(6)), b(L(2)), star(cat(b(R(7)), b(L(3)))), b(R(7)), b(L(4)))
    assert set(lefts) == {via6, direct}


def test_cf_mirrors_match_worked_example(cf, cf_cls):
    dg = build_dependency_graph(cf, cf_cls, R(1))
    (left,) = extract_left_regexes(dg)
    full = mirror_extend(left, cf_cls)
    assert rex.pretty(full) == "]1[6([3]7)+[4(]3)+]6"


def test_mirror_without_mirrorable_brackets(lin, lin_cls):
    r = cat(b("S"), b(R(1)), b(L(7)))  # only left-emitting and core brackets
    assert mirror_extend(r, lin_cls) == r


def test_acyclic_graph_loop_free_classes(cf, cf_cls):
    g = dyck_grammar_from_cfg(
        parse_grammar(
            "start: S\nS -> [1 ]1 | [2 ]2\n[1 -> 'a'\n]1 -> 'b'\n[2 -> 'c'\n]2 -> 'd'\n"
        )
    )
    cls = classify_pairs(g)
    dg = build_dependency_graph(g, cls, "S")
    lefts = extract_left_regexes(dg)
    assert set(lefts) == {cat(b("S"), b(L(1))), cat(b("S"), b(L(2)))}


# ---------------------------------------------------------------------------
# extended graph


def test_lin_extended_graph_is_base_plus_mirror_edges(lin, lin_cls, lin_pipe):
    eg = lin_pipe.ext_graph
    base = build_dependency_graph(lin, lin_cls, "S").edges
    mirror = {
        (L(7), R(5)),
        (R(5), R(3)),
        (R(3), R(2)),
        (R(2), R(3)),
        (R(2), R(5)),
    }
    assert eg.edge_set() == frozenset(base | mirror)
    assert eg.mirror_edges() == frozenset(mirror)
    assert set(eg.finals) == {R(2)}
    assert eg.finals[R(2)] == "11.i"


def test_cf_extended_graph_linking_items(cf_pipe):
    eg = cf_pipe.ext_graph
    assert eg.edges[(R(2), R(1))] == "8.iii"
    assert eg.edges[(R(2), R(2))] == "8.ii"
    assert eg.edges[(R(1), L(6))] == "7"
    assert eg.edges[(R(6), L(2))] == "7"
    assert eg.edges[(L(4), R(5))] == "9.i"
    assert set(eg.finals) == {R(2)}
    assert eg.finals[R(2)] == "11.iii"


def test_missing_silent_set_detected(cf, cf_cls):
    dg = build_dependency_graph(cf, cf_cls, "S")
    mirrored = [mirror_extend(r, cf_cls) for r in extract_left_regexes(dg)]
    with pytest.raises(GraphError, match="missing expression set"):
        build_extended_graph(cf, cf_cls, {"S": mirrored})


# ---------------------------------------------------------------------------
# the cover


def test_lin_cover_exact(lin_pipe):
    expected = plus_shape_lin_cover()
    assert lin_pipe.cover == expected


def plus_shape_lin_cover():
    return cat(
        plus(
            cat(
                b(L(1)),
                b(R(1)),
                plus(cat(b(L(2)), b(L(3)))),
                b(L(4)),
                b(R(4)),
                b(L(5)),
                b(L(6)),
                b(R(6)),
            )
        ),
        b(L(7)),
        b(R(7)),
        plus(cat(b(R(5)), plus(cat(b(R(3)), b(R(2)))))),
    )


def test_extension_words_join_cover(expr_dnf):
    from dycknf.pipeline import run_pipeline

    p = run_pipeline(expr_dnf)
    words2 = rex.enumerate_words(p.cover, 2)
    assert (L(8), R(8)) in words2


def test_cover_dyck_filter_equals_trace_language(lin_pipe, lin_ext):
    words = rex.enumerate_words(lin_pipe.cover, 16)
    dyck_side = {w for w in words if dyck_membership(w, 7)}
    assert dyck_side == enumerate_trace_language(lin_ext, 9).trace_set()


def test_trace_language_inside_cover(cf_pipe, cf_ext):
    words = rex.enumerate_words(cf_pipe.cover, 22)
    traces = {t for t in enumerate_trace_language(cf_ext, 12).trace_set() if len(t) <= 22}
    assert traces <= words


def test_graph_regex_roundtrip(lin_pipe):
    eg = lin_pipe.ext_graph
    from dycknf.depgraph import graph_paths_regex

    r = graph_paths_regex(eg.edge_set(), eg.initial, eg.finals)
    by_regex = {w[1:] for w in rex.enumerate_words(r, 13)}  # drop the root symbol
    by_paths = path_words(eg.edge_set(), eg.initial, eg.finals, 12)
    assert by_regex == by_paths
