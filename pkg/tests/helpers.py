"""Shared test utilities: fixture paths, closed-form word generators for the
linear fixture, and seeded random grammar generators."""

from __future__ import annotations

import random
from pathlib import Path

from dycknf import Cfg, parse_grammar, to_cnf
from dycknf.grammar import Bracket, Production

GRAMMARS = Path(__file__).resolve().parent.parent / "grammars"

L = Bracket.left
R = Bracket.right


def load(name: str):
    return parse_grammar((GRAMMARS / name).read_text())


def word(s: str) -> tuple:
    return tuple(s)


# ---------------------------------------------------------------------------
# closed forms of the linear fixture: (abb)^m aa d(cb)^n_m ... d(cb)^n_1


def _suffixes(nblocks: int, budget: int):
    if nblocks == 0:
        yield ""
        return
    c = 1
    while 1 + 2 * c + 3 * (nblocks - 1) <= budget:
        head = "d" + "cb" * c
        for tail in _suffixes(nblocks - 1, budget - len(head)):
            yield head + tail
        c += 1


def lin_words(max_len: int, free_block_count: bool = False) -> set:
    """Words of the linear fixture up to max_len; with ``free_block_count``
    the number of suffix blocks is decoupled from m (the approximation)."""
    out = set()
    m = 1
    while 3 * m + 2 + 3 <= max_len:
        prefix = "abb" * m + "aa"
        budget = max_len - len(prefix)
        counts = range(1, budget // 3 + 1) if free_block_count else [m]
        for p in counts:
            for suf in _suffixes(p, budget):
                out.add(tuple(prefix + suf))
        m += 1
    return out


def _exponents(nblocks: int, budget: int):
    # sequences of nblocks loop counts n_i >= 1 with sum of (1 + 2 n_i) <= budget
    if nblocks == 0:
        yield ()
        return
    n = 1
    while 1 + 2 * n + 3 * (nblocks - 1) <= budget:
        for rest in _exponents(nblocks - 1, budget - 1 - 2 * n):
            yield (n,) + rest
        n += 1


def lin_traces(max_source_len: int) -> set:
    """Trace words of the linear fixture for source words <= max_source_len."""
    out = set()
    m = 1
    while 3 * m + 2 + 3 <= max_source_len:
        budget = max_source_len - 3 * m - 2
        for ns in _exponents(m, budget):
            trace = []
            for n in ns:
                trace += [L(1), R(1)]
                trace += [L(2), L(3)] * n
                trace += [L(4), R(4), L(5), L(6), R(6)]
            trace += [L(7), R(7)]
            for n in reversed(ns):
                trace += [R(5)]
                trace += [R(3), R(2)] * n
            out.add(tuple(trace))
        m += 1
    return out


# ---------------------------------------------------------------------------
# seeded random grammars


def random_cfg(seed: int) -> Cfg:
    rng = random.Random(seed)
    nts = ["S", "A", "B", "C"][: rng.randint(2, 4)]
    terms = ["a", "b"]
    prods = []
    for nt in nts:
        for _ in range(rng.randint(1, 3)):
            length = rng.choice([1, 1, 2, 2, 3])
            rhs = tuple(rng.choice(nts + terms) for _ in range(length))
            prods.append(Production(nt, rhs))
    if rng.random() < 0.3:
        prods.append(Production(rng.choice(nts), ()))
    prods.append(Production(nts[-1], (rng.choice(terms),)))
    return Cfg("S", frozenset(nts), frozenset(terms), tuple(prods))


def random_cnf(seed: int):
    rng = random.Random(seed)
    nts = ["S", "A", "B", "C", "D"][: rng.randint(2, 5)]
    terms = ["a", "b"]
    prods = set()
    for nt in nts:
        for _ in range(rng.randint(1, 2)):
            prods.add(Production(nt, (rng.choice(terms),)))
        for _ in range(rng.randint(0, 2)):
            others = [n for n in nts if n != "S"]
            if others:
                prods.add(Production(nt, (rng.choice(others), rng.choice(others))))
    g = Cfg("S", frozenset(nts), frozenset(terms), tuple(sorted(prods, key=lambda p: p.key())))
    cnf, _ = to_cnf(g)
    return cnf


def random_brackets(rng: random.Random, max_len: int, k: int) -> tuple:
    n = rng.randint(0, max_len)
    return tuple(Bracket(rng.randint(1, k), rng.random() < 0.5) for _ in range(n))
