import pytest

from dycknf import rex
from dycknf.rex import EPSILON, alt, cat, plus, star, sym


def s(*names):
    return [sym(n) for n in names]


def test_interning_gives_value_identity():
    a = cat(sym("x"), plus(sym("y")))
    b = cat(sym("x"), plus(sym("y")))
    assert a is b


def test_builders_absorb_units():
    x, y = s("x", "y")
    assert cat() is EPSILON
    assert cat(x, EPSILON, y) == rex.Cat((x, y))
    assert cat(x, rex.EMPTY) is rex.EMPTY
    assert alt(x, x, y) == rex.Alt((x, y))
    assert star(EPSILON) is EPSILON
    assert plus(star(x)) == star(x)
    assert star(plus(x)) == star(x)


def test_plus_collapse_rules():
    x, y = s("x", "y")
    assert rex.normalize(cat(x, star(x))) == plus(x)
    assert rex.normalize(cat(star(x), x)) == plus(x)
    # multi-factor body
    assert rex.normalize(cat(x, y, star(cat(x, y)))) == plus(cat(x, y))


def test_rotation_rule():
    x, y = s("x", "y")
    # x (y x)* -> (x y)* x
    assert rex.normalize(cat(x, star(cat(y, x)))) == cat(star(cat(x, y)), x)
    # x (y x)* y  -> (x y)+
    assert rex.normalize(cat(x, star(cat(y, x)), y)) == plus(cat(x, y))


def test_suffix_loop_rule():
    p, a, b = s("p", "a", "b")
    # p a b (a b | p a b)* -> (p (a b)+)+
    r = cat(p, a, b, star(alt(cat(a, b), cat(p, a, b))))
    assert rex.normalize(r) == plus(cat(p, plus(cat(a, b))))


def test_heights():
    x = sym("x")
    r = plus(cat(x, plus(x)))
    assert rex.plus_height(r) == 2
    assert rex.star_height(r) == 0
    assert rex.star_height(star(star(x))) == 1  # collapsed by the builder


def test_min_word_len():
    x, y = s("x", "y")
    assert rex.min_word_len(star(x)) == 0
    assert rex.min_word_len(plus(cat(x, y))) == 2
    assert rex.min_word_len(rex.EMPTY) == float("inf")


def test_reverse_and_map():
    x, y = s("x", "y")
    r = cat(x, plus(cat(x, y)))
    assert rex.reverse(r) == cat(plus(cat(y, x)), x)
    mapped = rex.map_symbols(r, lambda t: sym(t.upper()))
    assert mapped == cat(sym("X"), plus(cat(sym("X"), sym("Y"))))


def test_enumerate_words():
    x, y = s("a", "b")
    r = plus(cat(x, y))
    assert rex.enumerate_words(r, 4) == {("a", "b"), ("a", "b", "a", "b")}
    assert rex.enumerate_words(star(x), 2) == {(), ("a",), ("a", "a")}
    assert rex.enumerate_words(rex.EMPTY, 3) == set()


def test_enumerate_budget():
    x, y = s("a", "b")
    with pytest.raises(rex.BudgetError):
        rex.enumerate_words(star(alt(x, y)), 30, max_words=100)


def test_vertex_path_regex_simple_loop():
    # a -> b -> a cycle entered at a, exit b -> f
    edges = {("r", "a"), ("a", "b"), ("b", "a"), ("b", "f")}
    r = rex.vertex_path_regex(edges, "r", "f")
    assert r == cat(sym("r"), plus(cat(sym("a"), sym("b"))), sym("f"))


def test_vertex_path_regex_unreachable():
    assert rex.vertex_path_regex({("a", "b")}, "a", "zzz") is rex.EMPTY


def test_path_regex_matches_path_enumeration():
    # regex re-expansion equals direct path-label enumeration
    edges = {("r", "a"), ("a", "a"), ("a", "b"), ("b", "c"), ("c", "a"), ("b", "f"), ("r", "f")}
    r = rex.vertex_path_regex(edges, "r", "f")
    succ = {}
    for u, v in edges:
        succ.setdefault(u, []).append(v)
    paths = set()
    frontier = {("r",)}
    while frontier:
        nxt = set()
        for p in frontier:
            if p[-1] == "f":
                paths.add(p)
                continue
            for v in succ.get(p[-1], ()):
                if len(p) < 9:
                    nxt.add(p + (v,))
        frontier = nxt
    assert rex.enumerate_words(r, 9) == {p for p in paths if len(p) <= 9}


def test_distribute_top():
    x, y, z = s("x", "y", "z")
    r = cat(alt(x, y), z)
    assert set(rex.distribute_top(r)) == {cat(x, z), cat(y, z)}
    # unions inside closures stay
    assert rex.distribute_top(plus(alt(x, y))) == [plus(alt(x, y))]


def test_pretty():
    x, y = s("x", "y")
    assert rex.pretty(cat(x, plus(cat(x, y)))) == "x(xy)+"
    assert rex.pretty(alt(x, y)) == "(x|y)"
