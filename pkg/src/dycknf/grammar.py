"""Grammar representations and normal-form conversions.

Covers the external grammar file format, conversion to Chomsky normal form,
the pairwise-bracket restriction of CNF (Dyck normal form), classification of
bracket pairs by which side emits a terminal, the extended grammar that gives
length-one words a bracket pair of their own, and the two homomorphisms tied
to those constructions: the terminal image ``phi`` of a bracket string and
the renaming map that sends every introduced nonterminal back to the CNF
nonterminal it substitutes.

Dyck normal form is CNF where the two right-hand-side nonterminals of every
binary rule form a dedicated bracket pair:

1. the grammar is in CNF;
2. a non-axiom nonterminal with a terminal rule has no other rule;
3. no nonterminal occurs both as left and as right member of binary bodies;
4. each left member determines its right member and vice versa.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Union


class GrammarError(ValueError):
    """Malformed grammar or misuse of a grammar operation."""


class ParseError(GrammarError):
    def __init__(self, message, line, col):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class ConversionError(GrammarError):
    """Normal-form conversion could not finish (cap exceeded etc.)."""


@dataclass(frozen=True, order=True)
class Bracket:
    """One side of an indexed bracket pair; a nonterminal of a Dyck grammar."""

    index: int
    is_right: bool

    @classmethod
    def left(cls, index: int) -> "Bracket":
        return cls(index, False)

    @classmethod
    def right(cls, index: int) -> "Bracket":
        return cls(index, True)

    @property
    def mate(self) -> "Bracket":
        return Bracket(self.index, not self.is_right)

    def __str__(self):
        return ("]" if self.is_right else "[") + str(self.index)

    def __repr__(self):
        return str(self)


Symbol = Union[str, Bracket]


def symkey(s) -> tuple:
    if isinstance(s, Bracket):
        return (1, s.index, s.is_right)
    return (0, str(s), False)


@dataclass(frozen=True)
class Production:
    lhs: Symbol
    rhs: tuple

    def __str__(self):
        body = " ".join(str(x) for x in self.rhs) if self.rhs else "λ"
        return f"{self.lhs} -> {body}"

    def key(self):
        return (symkey(self.lhs),) + tuple(symkey(x) for x in self.rhs)


@dataclass
class Cfg:
    """Plain context-free grammar; symbols are strings or brackets."""

    start: Symbol
    nonterminals: frozenset
    terminals: frozenset
    productions: tuple

    def check(self) -> None:
        if self.start not in self.nonterminals:
            raise GrammarError(f"start symbol {self.start} is not a nonterminal")
        if self.nonterminals & self.terminals:
            raise GrammarError("nonterminals and terminals overlap")
        for p in self.productions:
            if p.lhs not in self.nonterminals:
                raise GrammarError(f"unknown lhs {p.lhs}")
            for x in p.rhs:
                if x not in self.nonterminals and x not in self.terminals:
                    raise GrammarError(f"unknown symbol {x} in {p}")

    def by_lhs(self) -> dict:
        table: dict = {}
        for p in self.productions:
            table.setdefault(p.lhs, []).append(p.rhs)
        return table


class CnfGrammar(Cfg):
    """Cfg restricted to rules ``S -> λ``, ``X -> a`` and ``X -> A B``."""

    def check(self) -> None:
        super().check()
        for p in self.productions:
            if p.rhs == ():
                if p.lhs != self.start:
                    raise GrammarError(f"λ-rule on non-start symbol: {p}")
            elif len(p.rhs) == 1:
                if p.rhs[0] not in self.terminals:
                    raise GrammarError(f"unit rule not allowed in CNF: {p}")
            elif len(p.rhs) == 2:
                if not all(x in self.nonterminals for x in p.rhs):
                    raise GrammarError(f"binary rule with terminal member: {p}")
            else:
                raise GrammarError(f"rule too long for CNF: {p}")


# ---------------------------------------------------------------------------
# grammar file format


_NONTERM_RE = re.compile(r"[A-Z][A-Za-z0-9_]*")
_BRACKET_RE = re.compile(r"([\[\]])([0-9]+)")


def _tokenize_body(text: str, lineno: int, offset: int) -> Iterator[tuple]:
    """Yield ('sym'|'term'|'bar', value, column) tokens of a rule body."""
    i = 0
    while i < len(text):
        ch = text[i]
        col = offset + i + 1
        if ch.isspace():
            i += 1
            continue
        if ch == "|":
            yield ("bar", None, col)
            i += 1
            continue
        if ch == "'":
            j = text.find("'", i + 1)
            if j < 0:
                raise ParseError("unterminated terminal quote", lineno, col)
            yield ("term", text[i + 1 : j], col)
            i = j + 1
            continue
        m = _BRACKET_RE.match(text, i)
        if m:
            yield ("sym", Bracket(int(m.group(2)), m.group(1) == "]"), col)
            i = m.end()
            continue
        m = _NONTERM_RE.match(text, i)
        if m:
            yield ("sym", m.group(0), col)
            i = m.end()
            continue
        raise ParseError(f"unexpected character {ch!r}", lineno, col)


def parse_grammar(text: str) -> Cfg:
    """Parse the grammar file format into a Cfg.

    Format: optional ``#`` comment lines, a ``start: <Nonterminal>`` header,
    then ``<Nonterminal> -> alt1 | alt2`` lines.  Terminals are quoted, the
    empty quoted string stands for λ, brackets are written ``[3`` / ``]3``.
    """
    start = None
    productions: list[Production] = []
    nonterminals: set = set()
    terminals: set = set()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if start is None:
            m = re.match(r"\s*start:\s*(.+?)\s*$", line)
            if not m:
                raise ParseError("expected 'start: <Nonterminal>' header", ln, 1)
            toks = list(_tokenize_body(m.group(1), ln, line.find(m.group(1))))
            if len(toks) != 1 or toks[0][0] != "sym":
                raise ParseError("start symbol must be a single nonterminal", ln, 1)
            start = toks[0][1]
            nonterminals.add(start)
            continue
        if "->" not in line:
            raise ParseError("expected '<Nonterminal> -> ...'", ln, 1)
        head, body = line.split("->", 1)
        head_toks = list(_tokenize_body(head, ln, 0))
        if len(head_toks) != 1 or head_toks[0][0] != "sym":
            raise ParseError("left-hand side must be a single nonterminal", ln, 1)
        lhs = head_toks[0][1]
        nonterminals.add(lhs)
        alts: list[list] = [[]]
        saw_token = [False]
        for kind, value, col in _tokenize_body(body, ln, len(head) + 2):
            if kind == "bar":
                if not saw_token[-1]:
                    raise ParseError("empty alternative", ln, col)
                alts.append([])
                saw_token.append(False)
                continue
            saw_token[-1] = True
            if kind == "term":
                if value == "":
                    continue  # λ
                terminals.add(value)
                alts[-1].append(value)
            else:
                nonterminals.add(value)
                alts[-1].append(value)
        if not saw_token[-1]:
            raise ParseError("empty production body (use '' for λ)", ln, len(head) + 3)
        for a in alts:
            productions.append(Production(lhs, tuple(a)))
    if start is None:
        raise ParseError("missing 'start:' header", 1, 1)
    if start not in {p.lhs for p in productions}:
        raise GrammarError(f"undeclared start symbol {start}")
    g = Cfg(start, frozenset(nonterminals), frozenset(terminals), tuple(productions))
    g.check()
    return g


def grammar_text(g) -> str:
    """Serialize a Cfg or DyckGrammar back to the grammar file format."""
    if isinstance(g, DyckGrammar):
        start, prods, terms = g.axiom, g.productions, g.terminals
    else:
        start, prods, terms = g.start, g.productions, g.terminals

    def tok(x) -> str:
        if isinstance(x, str) and x in terms:
            return f"'{x}'"
        return str(x)

    table: dict = {}
    for p in prods:
        table.setdefault(p.lhs, []).append(p.rhs)
    lines = [f"start: {start}"]
    for lhs in sorted(table, key=symkey):
        alts = []
        for rhs in sorted(set(table[lhs]), key=lambda r: tuple(symkey(x) for x in r)):
            alts.append(" ".join(tok(x) for x in rhs) if rhs else "''")
        lines.append(f"{lhs} -> " + " | ".join(alts))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Chomsky normal form


@dataclass
class CnfReport:
    stages: list = field(default_factory=list)

    def note(self, stage: str, count: int) -> None:
        self.stages.append((stage, count))

    def __str__(self):
        return "; ".join(f"{s}:{c}" for s, c in self.stages)


def _fresh_namer(used: set):
    def fresh(base: str) -> str:
        name = base
        n = 1
        while name in used:
            n += 1
            name = f"{base}{n}"
        used.add(name)
        return name

    return fresh


def to_cnf(g: Cfg) -> tuple[CnfGrammar, CnfReport]:
    """Convert an arbitrary Cfg to CNF (START/TERM/BIN/DEL/UNIT/PRUNE)."""
    g.check()
    report = CnfReport()
    used = {str(s) for s in g.nonterminals | g.terminals}
    fresh = _fresh_namer(used)
    prods = [(p.lhs, tuple(p.rhs)) for p in g.productions]
    nts = set(g.nonterminals)
    start = g.start

    # START: ensure the start symbol never occurs on a right-hand side
    if any(start in rhs for _, rhs in prods):
        new_start = fresh(f"{start}0")
        prods.insert(0, (new_start, (start,)))
        nts.add(new_start)
        start = new_start
    report.note("start", len(prods))

    # TERM: terminals only in length-1 bodies
    term_nt: dict = {}
    out = []
    for lhs, rhs in prods:
        if len(rhs) >= 2:
            body = []
            for x in rhs:
                if x in g.terminals:
                    if x not in term_nt:
                        nt = fresh(f"T_{x}" if str(x).isalnum() else "T_sym")
                        term_nt[x] = nt
                        nts.add(nt)
                        out.append((nt, (x,)))
                    body.append(term_nt[x])
                else:
                    body.append(x)
            out.append((lhs, tuple(body)))
        else:
            out.append((lhs, rhs))
    prods = out
    report.note("term", len(prods))

    # BIN: binarize long bodies
    out = []
    for lhs, rhs in prods:
        while len(rhs) > 2:
            nt = fresh(f"{lhs}_bin")
            nts.add(nt)
            out.append((lhs, (rhs[0], nt)))
            lhs, rhs = nt, rhs[1:]
        out.append((lhs, rhs))
    prods = out
    report.note("bin", len(prods))

    # DEL: eliminate λ-rules (keep start -> λ iff the start is nullable)
    nullable = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in prods:
            if lhs not in nullable and all(x in nullable for x in rhs):
                nullable.add(lhs)
                changed = True
    delled = set()
    for lhs, rhs in prods:
        opts = [[x] if x not in nullable else [x, None] for x in rhs]
        for combo in itertools.product(*opts):
            body = tuple(x for x in combo if x is not None)
            if body:
                delled.add((lhs, body))
    prods = sorted(delled, key=lambda t: (symkey(t[0]), tuple(symkey(x) for x in t[1])))
    if start in nullable:
        prods = [(start, ())] + prods
    report.note("del", len(prods))

    # UNIT: eliminate unit rules
    unit: dict = {n: {n} for n in nts}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in prods:
            if len(rhs) == 1 and rhs[0] in nts:
                for tgt in unit[rhs[0]]:
                    if tgt not in unit[lhs]:
                        unit[lhs].add(tgt)
                        changed = True
    united = set()
    for lhs in nts:
        for via in unit[lhs]:
            for l2, rhs in prods:
                if l2 == via and not (len(rhs) == 1 and rhs[0] in nts):
                    united.add((lhs, rhs))
    prods = sorted(united, key=lambda t: (symkey(t[0]), tuple(symkey(x) for x in t[1])))
    report.note("unit", len(prods))

    # PRUNE: drop nonterminals unreachable from the start
    reach = {start}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in prods:
            if lhs in reach:
                for x in rhs:
                    if x in nts and x not in reach:
                        reach.add(x)
                        changed = True
    prods = [p for p in prods if p[0] in reach]
    nts = reach
    report.note("prune", len(prods))

    cnf = CnfGrammar(
        start,
        frozenset(nts),
        frozenset(g.terminals),
        tuple(Production(l, r) for l, r in prods),
    )
    cnf.check()
    return cnf, report


# ---------------------------------------------------------------------------
# Dyck normal form


class Emission(Enum):
    """Which side of a bracket pair rewrites to a terminal."""

    BOTH = "both"
    LEFT = "left"
    RIGHT = "right"
    NONE = "none"


@dataclass
class PairClasses:
    """Partition of the pairs of a Dyck grammar by terminal emission."""

    emission: dict

    def of(self, index: int) -> Emission:
        return self.emission[index]

    def pairs(self, kind: Emission) -> frozenset:
        return frozenset(i for i, e in self.emission.items() if e is kind)

    @property
    def cores(self) -> frozenset:
        """Pairs where both sides emit: the core segments of trace words."""
        return self.pairs(Emission.BOTH)

    @property
    def left_emitting(self) -> frozenset:
        return self.pairs(Emission.LEFT)

    @property
    def right_emitting(self) -> frozenset:
        return self.pairs(Emission.RIGHT)

    @property
    def silent(self) -> frozenset:
        return self.pairs(Emission.NONE)


@dataclass
class DyckGrammar:
    """CNF grammar whose binary bodies are the bracket pairs ``[i ]i``."""

    axiom: str
    k: int
    productions: tuple
    terminals: frozenset

    def by_lhs(self) -> dict:
        table: dict = {}
        for p in self.productions:
            table.setdefault(p.lhs, []).append(p.rhs)
        return table

    @property
    def nonterminals(self) -> frozenset:
        out = {self.axiom}
        for i in range(1, self.k + 1):
            out.add(Bracket.left(i))
            out.add(Bracket.right(i))
        return frozenset(out)

    def terminal_of(self, b: Bracket):
        """The terminal a bracket rewrites to, or None if it is silent."""
        for rhs in self.by_lhs().get(b, ()):
            if len(rhs) == 1:
                return rhs[0]
        return None

    def condition_violations(self) -> list[str]:
        """The four Dyck-normal-form conditions; empty list when all hold."""
        out = []
        table = self.by_lhs()
        for lhs, bodies in table.items():
            for rhs in bodies:
                if rhs == ():
                    if lhs != self.axiom:
                        out.append(f"λ-rule on {lhs}")
                elif len(rhs) == 1:
                    if rhs[0] not in self.terminals:
                        out.append(f"unit rule {lhs} -> {rhs[0]}")
                    if lhs != self.axiom and len(bodies) > 1:
                        out.append(f"{lhs} rewrites to a terminal and to something else")
                elif len(rhs) == 2:
                    l, r = rhs
                    ok = (
                        isinstance(l, Bracket)
                        and isinstance(r, Bracket)
                        and not l.is_right
                        and r.is_right
                        and l.index == r.index
                    )
                    if not ok:
                        out.append(f"binary body is not a bracket pair: {lhs} -> {l} {r}")
                else:
                    out.append(f"body too long: {lhs}")
        return out

    def check(self) -> None:
        bad = self.condition_violations()
        if bad:
            raise GrammarError("not in Dyck normal form: " + "; ".join(bad))

    def as_cnf(self) -> CnfGrammar:
        """View as a CnfGrammar (brackets double as nonterminal ids)."""
        return CnfGrammar(self.axiom, self.nonterminals, self.terminals, self.productions)


def dyck_grammar_from_cfg(g: Cfg) -> DyckGrammar:
    """Interpret a parsed grammar whose nonterminals are brackets."""
    if not isinstance(g.start, str):
        raise GrammarError("axiom of a Dyck grammar must be a plain name")
    indices = {s.index for s in g.nonterminals if isinstance(s, Bracket)}
    k = max(indices, default=0)
    dg = DyckGrammar(g.start, k, g.productions, g.terminals)
    dg.check()
    return dg


@dataclass
class RenamingMap:
    """Sends every introduced nonterminal/bracket to the CNF original."""

    mapping: dict

    def apply(self, s):
        return self.mapping.get(s, s)


def to_dyck_nf(g: CnfGrammar, max_fresh_factor: int = 10) -> tuple[DyckGrammar, RenamingMap]:
    """Convert a CNF grammar to Dyck normal form.

    The three conditions beyond CNF are established in order: terminal
    rewriting is isolated, left/right occurrences are separated, and the
    left-right pairing is made bijective.  Each substitution introduces a
    fresh nonterminal inheriting all rules of the one it replaces; the
    returned renaming map resolves fresh names back to the CNF original,
    transitively.  Bracket indices are assigned in first-use order over the
    canonically sorted production list.
    """
    g.check()
    if any(g.start in p.rhs for p in g.productions):
        raise GrammarError("start symbol occurs on a right-hand side; run to_cnf first")

    rules: dict = {}
    for p in g.productions:
        rules.setdefault(p.lhs, set()).add(p.rhs)
    terminals = set(g.terminals)
    start = g.start
    parent: dict = {}
    used = {str(n) for n in g.nonterminals} | {str(t) for t in terminals}
    fresh = _fresh_namer(used)
    max_fresh = max_fresh_factor * max(1, len(set(rules)))
    fresh_count = 0

    def spawn(base: str, source) -> str:
        nonlocal fresh_count
        fresh_count += 1
        if fresh_count > max_fresh:
            raise ConversionError(f"substitution cascade exceeded {max_fresh} fresh nonterminals")
        name = fresh(base)
        parent[name] = source
        return name

    def is_terminal_rule(rhs) -> bool:
        return len(rhs) == 1 and rhs[0] in terminals

    def replace_occurrences(old, new, side: int, context=None) -> None:
        """Rewrite binary bodies holding ``old`` at ``side`` (0=left, 1=right),
        optionally only where the other member equals ``context``."""
        for lhs in list(rules):
            updated = set()
            for rhs in rules[lhs]:
                if len(rhs) == 2 and rhs[side] == old and (context is None or rhs[1 - side] == context):
                    body = list(rhs)
                    body[side] = new
                    updated.add(tuple(body))
                else:
                    updated.add(rhs)
            rules[lhs] = updated

    # condition 2: isolate terminal rewriting ------------------------------
    for a in sorted([n for n in rules if n != start], key=symkey):
        term_rules = sorted([r for r in rules[a] if is_terminal_rule(r)])
        pair_rules = [r for r in rules[a] if len(r) == 2]
        extra_terms = term_rules if pair_rules else term_rules[1:]
        for (t,) in extra_terms:
            sub = spawn(f"{a}_{t}" if str(t).isalnum() else f"{a}_t", a)
            rules[a].discard((t,))
            rules[sub] = {(t,)}
            for lhs in list(rules):
                add = set()
                for rhs in rules[lhs]:
                    if len(rhs) == 2:
                        l, r = rhs
                        if l == a and r == a:
                            add |= {(sub, a), (a, sub), (sub, sub)}
                        elif l == a:
                            add.add((sub, r))
                        elif r == a:
                            add.add((l, sub))
                rules[lhs] |= add

    # condition 3: separate left and right occurrences ---------------------
    while True:
        lefts: set = set()
        right_ctx: dict = {}
        for lhs in rules:
            for rhs in rules[lhs]:
                if len(rhs) == 2:
                    lefts.add(rhs[0])
                    right_ctx.setdefault(rhs[1], set()).add(rhs[0])
        both = sorted((x for x in lefts if x in right_ctx), key=symkey)
        if not both:
            break
        a = both[0]
        subs = [(z, spawn(f"{z}_{a}", a)) for z in sorted(right_ctx[a], key=symkey)]
        for z, sub in subs:
            replace_occurrences(a, sub, side=1, context=z)
        for _, sub in subs:
            rules[sub] = set(rules.get(a, ()))

    # condition 4: make the pairing bijective -------------------------------
    while True:
        by_right: dict = {}
        by_left: dict = {}
        for lhs in rules:
            for rhs in rules[lhs]:
                if len(rhs) == 2:
                    by_right.setdefault(rhs[1], set()).add(rhs[0])
                    by_left.setdefault(rhs[0], set()).add(rhs[1])
        fixed = False
        for b in sorted(by_right, key=symkey):
            partners = sorted(by_right[b], key=symkey)
            if len(partners) > 1:
                subs = [(a2, spawn(f"{a2}_{b}", b)) for a2 in partners[1:]]
                for a2, sub in subs:
                    replace_occurrences(b, sub, side=1, context=a2)
                for _, sub in subs:
                    rules[sub] = set(rules.get(b, ()))
                fixed = True
                break
        if not fixed:
            for b in sorted(by_left, key=symkey):
                partners = sorted(by_left[b], key=symkey)
                if len(partners) > 1:
                    subs = [(a2, spawn(f"{b}_{a2}", b)) for a2 in partners[1:]]
                    for a2, sub in subs:
                        replace_occurrences(b, sub, side=0, context=a2)
                    for _, sub in subs:
                        rules[sub] = set(rules.get(b, ()))
                    fixed = True
                    break
        if not fixed:
            break

    # prune nonterminals no longer reachable from the start
    reach = {start}
    frontier = [start]
    while frontier:
        n = frontier.pop()
        for rhs in rules.get(n, ()):
            for x in rhs:
                if x in rules and x not in reach:
                    reach.add(x)
                    frontier.append(x)
    for n in list(rules):
        if n not in reach:
            del rules[n]

    # assign bracket indices in first-use order over sorted productions
    ordered = []
    for lhs in sorted(rules, key=symkey):
        for rhs in sorted(rules[lhs], key=lambda r: tuple(symkey(x) for x in r)):
            ordered.append((lhs, rhs))
    pair_of: dict = {}
    k = 0
    for lhs, rhs in ordered:
        if len(rhs) == 2 and rhs[0] not in pair_of:
            l, r = rhs
            if r in pair_of or l == r:
                raise ConversionError(f"pairing is not bijective at {l} {r}")
            k += 1
            pair_of[l] = Bracket.left(k)
            pair_of[r] = Bracket.right(k)

    def brk(name):
        if name == start:
            return start
        if name in pair_of:
            return pair_of[name]
        raise ConversionError(f"nonterminal {name} belongs to no bracket pair")

    prods = []
    for lhs, rhs in ordered:
        prods.append(Production(brk(lhs), tuple(x if x in terminals else brk(x) for x in rhs)))
    dg = DyckGrammar(start, k, tuple(prods), frozenset(terminals))
    dg.check()

    def resolve(name):
        while name in parent:
            name = parent[name]
        return name

    mapping: dict = {start: g.start}
    for name, b in pair_of.items():
        mapping[b] = resolve(name)
    return dg, RenamingMap(mapping)


# ---------------------------------------------------------------------------
# pair classification and the extended grammar


def classify_pairs(g: DyckGrammar) -> PairClasses:
    """Partition pairs by which side rewrites to a terminal."""
    g.check()
    emission = {}
    for i in range(1, g.k + 1):
        le = g.terminal_of(Bracket.left(i)) is not None
        re_ = g.terminal_of(Bracket.right(i)) is not None
        if le and re_:
            emission[i] = Emission.BOTH
        elif le:
            emission[i] = Emission.LEFT
        elif re_:
            emission[i] = Emission.RIGHT
        else:
            emission[i] = Emission.NONE
    return PairClasses(emission)


@dataclass
class ExtendedDyckGrammar:
    """Dyck grammar plus one fresh pair per axiom terminal rule.

    For every rule ``S -> t`` (t a terminal or λ) a new pair gets rules
    ``S -> [t ]t``, ``[t -> t``, ``]t -> λ``, so words of length <= 1 own a
    two-bracket trace of their own.
    """

    base: DyckGrammar
    extra: tuple  # of (pair index, terminal-or-None)

    @property
    def K(self) -> int:
        return self.base.k + len(self.extra)

    @property
    def axiom(self) -> str:
        return self.base.axiom

    def extra_terminal(self, index: int):
        for i, t in self.extra:
            if i == index:
                return t
        raise GrammarError(f"pair {index} is not an extension pair")

    def is_extra(self, index: int) -> bool:
        return any(i == index for i, _ in self.extra)

    def extension_traces(self) -> set:
        return {(Bracket.left(i), Bracket.right(i)) for i, _ in self.extra}

    @property
    def productions(self) -> tuple:
        out = list(self.base.productions)
        for i, t in self.extra:
            l, r = Bracket.left(i), Bracket.right(i)
            out.append(Production(self.base.axiom, (l, r)))
            out.append(Production(l, (t,) if t is not None else ()))
            out.append(Production(r, ()))
        return tuple(out)

    @property
    def nonterminals(self) -> frozenset:
        out = set(self.base.nonterminals)
        for i, _ in self.extra:
            out |= {Bracket.left(i), Bracket.right(i)}
        return frozenset(out)


def extend_grammar(g: DyckGrammar) -> ExtendedDyckGrammar:
    g.check()
    axiom_terms = []
    for rhs in g.by_lhs().get(g.axiom, ()):
        if rhs == ():
            axiom_terms.append(None)
        elif len(rhs) == 1:
            axiom_terms.append(rhs[0])
    axiom_terms.sort(key=lambda t: (t is None, str(t)))
    extra = tuple((g.k + n + 1, t) for n, t in enumerate(axiom_terms))
    return ExtendedDyckGrammar(g, extra)


def apply_phi(g: ExtendedDyckGrammar, word: Iterable[Bracket]) -> tuple:
    """Terminal image of a bracket string: emitting brackets contribute
    their terminal, silent brackets (and extension right brackets) map to λ."""
    out = []
    for b in word:
        if not isinstance(b, Bracket) or b.index < 1 or b.index > g.K:
            raise GrammarError(f"unknown bracket {b}")
        if b.index > g.base.k:
            t = g.extra_terminal(b.index)
            if not b.is_right and t is not None:
                out.append(t)
            continue
        t = g.base.terminal_of(b)
        if t is not None:
            out.append(t)
    return tuple(out)


# ---------------------------------------------------------------------------
# derivations


@dataclass(frozen=True)
class Step:
    lhs: Symbol
    rhs: tuple
    pos: int  # index of the rewritten symbol in the sentential form


@dataclass(frozen=True)
class Derivation:
    steps: tuple

    def __len__(self):
        return len(self.steps)


def _grammar_views(g) -> tuple[set, frozenset, Symbol]:
    if isinstance(g, ExtendedDyckGrammar):
        prods = {(p.lhs, p.rhs) for p in g.productions}
        return prods, g.nonterminals, g.base.axiom
    if isinstance(g, DyckGrammar):
        return {(p.lhs, p.rhs) for p in g.productions}, g.nonterminals, g.axiom
    return {(p.lhs, p.rhs) for p in g.productions}, g.nonterminals, g.start


def replay(g, d: Derivation, require_leftmost: bool = True) -> tuple:
    """Run a derivation against a grammar and return the derived word.

    Raises GrammarError when a step does not apply, is not leftmost, or the
    final form still contains nonterminals."""
    prods, nts, axiom = _grammar_views(g)
    form: list = [axiom]
    for n, s in enumerate(d.steps):
        if (s.lhs, s.rhs) not in prods:
            raise GrammarError(f"step {n}: no production {s.lhs} -> {s.rhs}")
        if s.pos < 0 or s.pos >= len(form) or form[s.pos] != s.lhs:
            raise GrammarError(f"step {n}: position {s.pos} does not hold {s.lhs}")
        if require_leftmost:
            leftmost = next((i for i, x in enumerate(form) if x in nts), None)
            if leftmost != s.pos:
                raise GrammarError(f"step {n}: not a leftmost rewrite")
        form[s.pos : s.pos + 1] = list(s.rhs)
    if any(x in nts for x in form):
        raise GrammarError("derivation is incomplete")
    return tuple(form)


def rename_derivation(m: RenamingMap, d: Derivation) -> Derivation:
    """Symbol-wise image of a derivation under the renaming map."""

    def img(x):
        y = m.apply(x)
        if isinstance(x, Bracket) and y == x:
            raise GrammarError(f"symbol {x} outside the renaming map")
        return y

    steps = tuple(Step(img(s.lhs), tuple(img(x) for x in s.rhs), s.pos) for s in d.steps)
    return Derivation(steps)
