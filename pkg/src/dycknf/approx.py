"""Regular superset approximation.

The transition automaton is read off the refined graph by skipping every
vertex that emits nothing (left brackets of right-emitting pairs and both
brackets of silent pairs) and labeling each remaining step with the terminal
its target produces.  Kept brackets become states; a core pair contributes a
chained two-state segment (its left then its right terminal).  Every final
vertex of the refined graph feeds the accepting state through a λ edge, and
axiom terminal rules get a direct two-step acceptance path of their own.  The
regular grammar is the production-per-transition reading of the automaton.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import rex
from .grammar import Bracket, DyckGrammar, Emission, GrammarError, PairClasses
from .refine import LBracket, RefinedGraph, lkey


class ApproxError(ValueError):
    pass


START = "S"
ACCEPT = "F"


@dataclass(frozen=True, order=True)
class CoreRight:
    """State for the right bracket of a core pair, chained after its left."""

    left: LBracket

    def __str__(self):
        v = self.left
        out = str(v.bracket.mate)
        if v.mark:
            out += "'" * v.mark
        if v.label is not None:
            out += f"^{v.label}"
        return out

    def __repr__(self):
        return str(self)


@dataclass(frozen=True, order=True)
class ExtState:
    """State accepting a one-letter word produced directly by the axiom."""

    terminal: str

    def __str__(self):
        return f"ext:{self.terminal}"


@dataclass
class Nfa:
    start: object
    accept: object
    states: list
    transitions: set  # of (src, terminal-or-None, dst)
    rules: dict = field(default_factory=dict)  # (src, terminal, dst) -> rule tag

    def successors(self, state) -> list:
        return sorted(
            ((t, dst) for (src, t, dst) in self.transitions if src == state),
            key=lambda p: (str(p[0]), str(p[1])),
        )


def _skipped(cls: PairClasses, v) -> bool:
    if not isinstance(v, LBracket):
        return False
    b = v.bracket
    e = cls.of(b.index)
    if e is Emission.NONE:
        return True
    return e is Emission.RIGHT and not b.is_right


def _kept_state(cls: PairClasses, v: LBracket):
    b = v.bracket
    e = cls.of(b.index)
    if e is Emission.BOTH and not b.is_right:
        return v  # the left-core state; its right mate chains after it
    if b.is_right and e in (Emission.LEFT, Emission.RIGHT):
        return v
    return None


def _rule_tag(cls: PairClasses, src, dst_bracket: Bracket) -> str:
    def side(x):
        if x == START:
            return "start"
        b = x.left.bracket.mate if isinstance(x, CoreRight) else x.bracket
        e = cls.of(b.index)
        if e is Emission.BOTH:
            return "core"
        return "l2" if e is Emission.LEFT else "r2"

    e = cls.of(dst_bracket.index)
    dst = "core" if e is Emission.BOTH else ("l2" if e is Emission.LEFT else "r2")
    table = {
        ("start", "l2"): "1",
        ("start", "core"): "2",
        ("l2", "l2"): "3",
        ("l2", "core"): "4",
        ("r2", "r2"): "5",
        ("r2", "l2"): "6",
        ("r2", "core"): "7",
        ("core", "r2"): "8",
        ("core", "core"): "9",
        ("core", "l2"): "6",  # core exits behave like emitted-right exits here
    }
    return table.get((side(src), dst), "?")


def build_automaton(g: DyckGrammar, cls: PairClasses, rg: RefinedGraph) -> Nfa:
    """Transition automaton of the refined graph.

    A transition exists between two kept brackets when the refined graph has
    a path between them whose interior crosses only skipped vertices (no
    interior vertex repeated); loops made of skipped vertices alone vanish.
    """
    if rg.dummy_vertices() or rg.pop_vertices():
        raise ApproxError("refined graph still has unconnected silent brackets")
    nfa = Nfa(START, ACCEPT, [START, ACCEPT], set())
    states: dict = {START: START, ACCEPT: ACCEPT}

    def ensure_core(v: LBracket) -> CoreRight:
        right = CoreRight(v)
        if v not in states:
            states[v] = v
            states[right] = right
            t = g.terminal_of(v.bracket.mate)
            tr = (v, t, right)
            nfa.transitions.add(tr)
            nfa.rules.setdefault(tr, "chain")
        return right

    def add_edge(src_state, v: LBracket) -> None:
        b = v.bracket
        e = cls.of(b.index)
        if e is Emission.BOTH and not b.is_right:
            right = ensure_core(v)
            t = g.terminal_of(b)
            tr = (src_state, t, v)
            nfa.transitions.add(tr)
            nfa.rules.setdefault(tr, _rule_tag(cls, src_state, b))
            return
        if e is Emission.LEFT:
            t = g.terminal_of(b.mate)  # the pair's left bracket emits
        else:
            t = g.terminal_of(b)
        if v not in states:
            states[v] = v
        tr = (src_state, t, v)
        nfa.transitions.add(tr)
        nfa.rules.setdefault(tr, _rule_tag(cls, src_state, b))

    succ: dict = {}
    for (u, w) in rg.edge_set():
        succ.setdefault(u, []).append(w)
    for u in succ:
        succ[u].sort(key=lkey)

    def targets_from(vertex) -> list:
        """Kept vertices reachable across skipped interiors only."""
        out = []
        seen_paths = set()

        def dfs(u, interior):
            for w in succ.get(u, ()):
                if _skipped(cls, w):
                    if w in interior:
                        continue
                    dfs(w, interior | {w})
                else:
                    if w not in seen_paths:
                        seen_paths.add(w)
                        out.append(w)

        dfs(vertex, frozenset())
        return out

    # source states: the start, every kept right bracket, and the chained
    # right state of every core pair (carrying the core vertex's out-edges)
    sources: list[tuple] = [(START, rg.initial)]
    for v in sorted(rg.vertices, key=lkey):
        if not isinstance(v, LBracket):
            continue
        st = _kept_state(cls, v)
        if st is None:
            continue
        if cls.of(v.bracket.index) is Emission.BOTH:
            sources.append((ensure_core(v), v))
        else:
            states.setdefault(v, v)
            sources.append((v, v))
    for state, vertex in sources:
        for w in targets_from(vertex):
            add_edge(state, w)

    # acceptance: finals of the refined graph reach the accepting state
    for f in sorted(rg.finals, key=lkey):
        if cls.of(f.bracket.index) is Emission.BOTH and not f.bracket.is_right:
            state = ensure_core(f)
        else:
            state = f
        tr = (state, None, ACCEPT)
        nfa.transitions.add(tr)
        nfa.rules.setdefault(tr, "10")

    # axiom terminal rules accept their one-letter word directly
    for rhs in g.by_lhs().get(g.axiom, ()):
        if len(rhs) == 1:
            st = ExtState(rhs[0])
            states.setdefault(st, st)
            nfa.transitions.add((START, rhs[0], st))
            nfa.rules.setdefault((START, rhs[0], st), "ext")
            nfa.transitions.add((st, None, ACCEPT))
            nfa.rules.setdefault((st, None, ACCEPT), "10")
        elif rhs == ():
            nfa.transitions.add((START, None, ACCEPT))
            nfa.rules.setdefault((START, None, ACCEPT), "ext")

    nfa.states = sorted(states.values(), key=_state_key)
    return nfa


def _state_key(s) -> tuple:
    if s == START:
        return (0, "", 0, 0, 0)
    if s == ACCEPT:
        return (3, "", 0, 0, 0)
    if isinstance(s, ExtState):
        return (2, s.terminal, 0, 0, 0)
    v = s.left if isinstance(s, CoreRight) else s
    return (1, str(v.bracket.index), v.mark, v.label or 0, 1 if isinstance(s, CoreRight) else 0)


@dataclass
class RegularGrammar:
    """Right-linear grammar: productions ``X -> a Y`` and ``X -> λ``."""

    start: object
    terminals: frozenset
    productions: list  # of (lhs, terminal-or-None, rhs-or-None)

    def nonterminals(self) -> set:
        out = {self.start}
        for lhs, _t, rhs in self.productions:
            out.add(lhs)
            if rhs is not None:
                out.add(rhs)
        return out


def to_regular_grammar(a: Nfa) -> RegularGrammar:
    prods = []
    terms = set()
    for src, t, dst in sorted(a.transitions, key=lambda tr: (str(tr[0]), str(tr[1]), str(tr[2]))):
        if dst == a.accept:
            if t is None:
                prods.append((src, None, None))
            else:
                terms.add(t)
                prods.append((src, t, None))
        elif t is None:
            raise ApproxError("λ transition into a non-accepting state")
        else:
            terms.add(t)
            prods.append((src, t, dst))
    return RegularGrammar(a.start, frozenset(terms), prods)


def _grammar_nfa(gr: RegularGrammar) -> Nfa:
    transitions = set()
    states = {gr.start, ACCEPT}
    for lhs, t, rhs in gr.productions:
        dst = rhs if rhs is not None else ACCEPT
        states.add(lhs)
        states.add(dst)
        transitions.add((lhs, t, dst))
    return Nfa(gr.start, ACCEPT, sorted(states, key=str), transitions)


class NfaMatcher:
    """Subset-simulation membership and word counting for an automaton."""

    def __init__(self, obj):
        nfa = _grammar_nfa(obj) if isinstance(obj, RegularGrammar) else obj
        self.nfa = nfa
        self.succ: dict = {}
        self.eps: dict = {}
        for src, t, dst in nfa.transitions:
            if t is None:
                self.eps.setdefault(src, set()).add(dst)
            else:
                self.succ.setdefault(src, {}).setdefault(t, set()).add(dst)
        self._closure_memo: dict = {}

    def closure(self, states: frozenset) -> frozenset:
        cached = self._closure_memo.get(states)
        if cached is not None:
            return cached
        out = set(states)
        stack = list(states)
        while stack:
            s = stack.pop()
            for d in self.eps.get(s, ()):
                if d not in out:
                    out.add(d)
                    stack.append(d)
        result = frozenset(out)
        self._closure_memo[states] = result
        return result

    def accepts(self, word) -> bool:
        cur = self.closure(frozenset([self.nfa.start]))
        for t in word:
            nxt: set = set()
            for s in cur:
                nxt |= self.succ.get(s, {}).get(t, set())
            if not nxt:
                return False
            cur = self.closure(frozenset(nxt))
        return self.nfa.accept in cur

    def count_words(self, max_len: int, max_subsets: int = 20000):
        """Number of distinct accepted words of length <= max_len, by counting
        over the determinized automaton; None when it grows past the cap."""
        start = self.closure(frozenset([self.nfa.start]))
        move_memo: dict = {}

        def move(subset, t):
            key = (subset, t)
            if key not in move_memo:
                nxt: set = set()
                for s in subset:
                    nxt |= self.succ.get(s, {}).get(t, set())
                move_memo[key] = self.closure(frozenset(nxt)) if nxt else None
            return move_memo[key]

        alphabet = sorted({t for d in self.succ.values() for t in d})
        total = 1 if self.nfa.accept in start else 0
        ways = {start: 1}
        seen_subsets = {start}
        for _ in range(max_len):
            nxt_ways: dict = {}
            for subset, n in ways.items():
                for t in alphabet:
                    dst = move(subset, t)
                    if dst is not None:
                        nxt_ways[dst] = nxt_ways.get(dst, 0) + n
                        seen_subsets.add(dst)
            if len(seen_subsets) > max_subsets:
                return None
            total += sum(n for subset, n in nxt_ways.items() if self.nfa.accept in subset)
            ways = nxt_ways
            if not ways:
                break
        return total


def enumerate_regular(obj, max_len: int, max_words: int | None = None) -> set:
    """Words of length <= max_len of an automaton, regular grammar or regex."""
    if isinstance(obj, rex.Regex):
        return rex.enumerate_words(obj, max_len, max_words)
    nfa = _grammar_nfa(obj) if isinstance(obj, RegularGrammar) else obj
    succ: dict = {}
    eps: dict = {}
    for src, t, dst in nfa.transitions:
        if t is None:
            eps.setdefault(src, set()).add(dst)
        else:
            succ.setdefault(src, []).append((t, dst))

    closure_memo: dict = {}

    def closure(states: frozenset) -> frozenset:
        cached = closure_memo.get(states)
        if cached is not None:
            return cached
        out = set(states)
        stack = list(states)
        while stack:
            s = stack.pop()
            for d in eps.get(s, ()):
                if d not in out:
                    out.add(d)
                    stack.append(d)
        result = frozenset(out)
        closure_memo[states] = result
        return result

    out_words: set = set()
    frontier: dict = {(): closure(frozenset([nfa.start]))}
    while frontier:
        nxt: dict = {}
        for word, states in frontier.items():
            if nfa.accept in states:
                out_words.add(word)
            if len(word) == max_len:
                continue
            for s in states:
                for t, d in succ.get(s, ()):
                    w2 = word + (t,)
                    nxt[w2] = nxt.get(w2, frozenset()) | frozenset([d])
        if max_words is not None and len(out_words) + len(nxt) > max_words:
            raise rex.BudgetError(f"regular enumeration exceeded {max_words} words")
        frontier = {w: closure(s) for w, s in nxt.items()}
    return out_words


# ---------------------------------------------------------------------------
# serialization


def state_name(s) -> str:
    if s == START:
        return "S"
    if isinstance(s, ExtState):
        return f"Acc_{s.terminal}" if str(s.terminal).isalnum() else "Acc_sym"
    v = s.left if isinstance(s, CoreRight) else s
    b = v.bracket.mate if isinstance(s, CoreRight) else v.bracket
    out = "R" if b.is_right else "L"
    out += str(b.index)
    if v.label is not None:
        out += f"q{v.label}"
    if v.mark:
        out += f"m{v.mark}"
    return out


def regular_grammar_text(gr: RegularGrammar) -> str:
    """Serialize in the grammar file format, with generated state names."""
    names: dict = {}
    used: set = set()
    for s in [gr.start] + sorted(gr.nonterminals(), key=str):
        if s in names:
            continue
        base = state_name(s)
        name = base
        n = 1
        while name in used:
            n += 1
            name = f"{base}_{n}"
        used.add(name)
        names[s] = name
    table: dict = {}
    for lhs, t, rhs in gr.productions:
        body = "''" if t is None and rhs is None else (
            f"'{t}'" if rhs is None else f"'{t}' {names[rhs]}"
        )
        table.setdefault(names[lhs], []).append(body)
    lines = [f"start: {names[gr.start]}"]
    for lhs in sorted(table):
        lines.append(f"{lhs} -> " + " | ".join(sorted(table[lhs])))
    return "\n".join(lines) + "\n"


def transition_table(a: Nfa) -> dict:
    """JSON-ready transition table with stable ordering."""
    return {
        "states": [str(s) for s in a.states],
        "alphabet": sorted({t for (_s, t, _d) in a.transitions if t is not None}),
        "start": str(a.start),
        "accepting": [str(a.accept)],
        "transitions": [
            {"from": str(src), "label": t if t is not None else "", "to": str(dst), "rule": a.rules.get((src, t, dst), "")}
            for src, t, dst in sorted(a.transitions, key=lambda tr: (str(tr[0]), str(tr[1] or ""), str(tr[2])))
        ],
    }
