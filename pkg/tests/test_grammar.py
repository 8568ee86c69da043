import pytest

from dycknf import (
    Cfg,
    GrammarError,
    ParseError,
    grammar_text,
    parse_grammar,
    to_cnf,
)
from dycknf.grammar import Bracket, Production
from dycknf.oracle import CykTable, enumerate_language

from helpers import word


def test_parse_single_rule():
    g = parse_grammar("start: S\nS -> 'a'\n")
    assert g.start == "S"
    assert g.productions == (Production("S", ("a",)),)
    assert g.terminals == frozenset({"a"})


def test_parse_expr_fixture(expr_cfg):
    assert len(expr_cfg.nonterminals) == 8
    assert len(expr_cfg.productions) == 13
    assert expr_cfg.start == "E0"


def test_parse_alternatives_and_lambda():
    g = parse_grammar("start: S\nS -> 'a' S | ''\n")
    assert set(g.productions) == {Production("S", ("a", "S")), Production("S", ())}


def test_parse_brackets():
    g = parse_grammar("start: S\nS -> [1 ]1\n[1 -> 'a'\n]1 -> 'b'\n")
    assert Bracket.left(1) in g.nonterminals
    assert Production("S", (Bracket.left(1), Bracket.right(1))) in g.productions


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse_grammar("start: S\nS ->\n")
    assert e.value.line == 2
    with pytest.raises(ParseError):
        parse_grammar("S -> 'a'\n")  # missing header
    with pytest.raises(ParseError) as e:
        parse_grammar("start: S\nS -> 'a\n")
    assert "unterminated" in str(e.value)


def test_undeclared_start():
    with pytest.raises(GrammarError, match="undeclared start"):
        parse_grammar("start: S\nA -> 'a'\n")


def test_comments_ignored():
    g = parse_grammar("# header\nstart: S\n# rule\nS -> 'a'  # trailing\n")
    assert g.productions == (Production("S", ("a",)),)


def test_round_trip(expr_cfg):
    text = grammar_text(expr_cfg)
    g2 = parse_grammar(text)
    assert set(g2.productions) == set(expr_cfg.productions)
    assert g2.start == expr_cfg.start
    assert grammar_text(g2) == text


# ---------------------------------------------------------------------------
# CNF conversion


def brute_force_words(g: Cfg, max_len: int, max_steps: int = 14) -> set:
    """Independent oracle: breadth-first expansion of arbitrary sentential
    forms, bounded by derivation length (enough for the small test grammars)."""
    out = set()
    forms = {(g.start,)}
    for _ in range(max_steps):
        nxt = set()
        for form in forms:
            idx = next((i for i, x in enumerate(form) if x in g.nonterminals), None)
            if idx is None:
                if len(form) <= max_len:
                    out.add(tuple(form))
                continue
            for p in g.productions:
                if p.lhs == form[idx]:
                    new = form[:idx] + tuple(p.rhs) + form[idx + 1 :]
                    if sum(1 for x in new if x in g.terminals) <= max_len:
                        nxt.add(new)
        forms = nxt
        if not forms:
            break
    return out


def test_to_cnf_idempotent_on_cnf(expr_cfg):
    cnf, _ = to_cnf(expr_cfg)
    again, _ = to_cnf(cnf)
    assert set(again.productions) == set(cnf.productions)
    assert again.start == cnf.start


def test_to_cnf_matching_brackets_language():
    g = parse_grammar("start: S\nS -> 'a' S 'b' | 'a' 'b'\n")
    cnf, _ = to_cnf(g)
    cnf.check()
    assert enumerate_language(cnf, 8) == brute_force_words(g, 8)


def test_to_cnf_linear_grammar():
    g = parse_grammar("start: X\nX -> 'a' Y 'b'\nY -> 'c' | 'a' Y 'b'\n")
    cnf, _ = to_cnf(g)
    assert enumerate_language(cnf, 8) == brute_force_words(g, 8)


def test_to_cnf_lambda_language():
    g = parse_grammar("start: S\nS -> 'a' S | ''\n")
    cnf, _ = to_cnf(g)
    lang = enumerate_language(cnf, 4)
    assert lang == {(), word("a"), word("aa"), word("aaa"), word("aaaa")}
    # λ only via the start symbol
    for p in cnf.productions:
        if p.rhs == ():
            assert p.lhs == cnf.start
        assert cnf.start not in p.rhs


def test_to_cnf_empty_language_keeps_start():
    g = parse_grammar("start: S\nS -> S S\n")
    cnf, _ = to_cnf(g)
    assert cnf.start in cnf.nonterminals
    assert enumerate_language(cnf, 5) == set()


def test_cyk_agrees_with_enumeration_after_cnf():
    g = parse_grammar("start: S\nS -> 'a' S 'b' | 'a' 'b'\n")
    cnf, _ = to_cnf(g)
    table = CykTable(cnf)
    lang = enumerate_language(cnf, 6)
    import itertools

    for n in range(7):
        for w in itertools.product("ab", repeat=n):
            assert table.accepts(w) == (w in lang)
