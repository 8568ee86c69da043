"""Independent verification machinery.

CYK membership and exact bounded language enumeration are implemented as two
separate routes and tested against each other.  On top of them sit the
end-to-end checks: the bracket-representation identity (terminal image of
Dyck-filtered cover words equals the language; the Dyck-filtered cover equals
the trace language) and the superset property of the regular approximation.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import rex
from .dyck import dyck_membership, enumerate_trace_language
from .grammar import (
    Bracket,
    CnfGrammar,
    DyckGrammar,
    ExtendedDyckGrammar,
    GrammarError,
    apply_phi,
    symkey,
)


class CykTable:
    """Triangular-table CYK recognizer with bitmask nonterminal sets."""

    def __init__(self, g):
        if isinstance(g, ExtendedDyckGrammar):
            g = g.base
        if isinstance(g, DyckGrammar):
            g = g.as_cnf()
        g.check()
        self.start = g.start
        self.terminals = g.terminals
        nts = sorted(g.nonterminals, key=symkey)
        self.bit = {n: 1 << i for i, n in enumerate(nts)}
        self.term_mask: dict = {}
        self.binary: list = []
        self.accepts_lambda = False
        for p in g.productions:
            if p.rhs == ():
                self.accepts_lambda = True
            elif len(p.rhs) == 1:
                t = p.rhs[0]
                self.term_mask[t] = self.term_mask.get(t, 0) | self.bit[p.lhs]
            else:
                self.binary.append((self.bit[p.lhs], self.bit[p.rhs[0]], self.bit[p.rhs[1]]))

    def accepts(self, word) -> bool:
        for t in word:
            if t not in self.terminals:
                raise GrammarError(f"foreign terminal {t!r}")
        n = len(word)
        if n == 0:
            return self.accepts_lambda
        V = [[0] * (n + 1) for _ in range(n)]
        for i, t in enumerate(word):
            V[i][i + 1] = self.term_mask.get(t, 0)
        for span in range(2, n + 1):
            for i in range(0, n - span + 1):
                j = i + span
                acc = 0
                for mid in range(i + 1, j):
                    left, right = V[i][mid], V[mid][j]
                    if left and right:
                        for ba, bb, bc in self.binary:
                            if (left & bb) and (right & bc):
                                acc |= ba
                V[i][j] = acc
        return bool(V[0][n] & self.bit[self.start])


def cyk_membership(g, word) -> bool:
    """True iff the CNF (or Dyck-normal) grammar derives ``word``."""
    return CykTable(g).accepts(tuple(word))


def enumerate_language(g, max_len: int, max_words: int | None = None) -> set:
    """Exactly the words of length <= max_len, by length-indexed composition.

    For CNF-shaped grammars the set of words of a nonterminal at each exact
    length is assembled from the shorter sets of its binary bodies, so the
    result is exact with no pruning heuristics.  ``max_words`` bounds the
    total set size (BudgetError beyond it).
    """
    if isinstance(g, ExtendedDyckGrammar):
        g = g.base
    axiom = g.axiom if isinstance(g, DyckGrammar) else g.start
    term_rules: dict = {}
    bin_rules: dict = {}
    accepts_lambda = False
    nts: set = set()
    for p in g.productions:
        nts.add(p.lhs)
        if p.rhs == ():
            accepts_lambda = accepts_lambda or p.lhs == axiom
        elif len(p.rhs) == 1:
            term_rules.setdefault(p.lhs, set()).add(p.rhs[0])
        else:
            nts |= set(p.rhs)
            bin_rules.setdefault(p.lhs, []).append(p.rhs)
    words: dict = {}
    total = 0
    for n in range(1, max_len + 1):
        for x in nts:
            bucket = set()
            if n == 1:
                bucket |= {(t,) for t in term_rules.get(x, ())}
            for b, c in bin_rules.get(x, ()):
                for i in range(1, n):
                    us = words.get((b, i))
                    vs = words.get((c, n - i))
                    if us and vs:
                        bucket |= {u + v for u in us for v in vs}
            if bucket:
                total += len(bucket)
                if max_words is not None and total > max_words:
                    from .rex import BudgetError

                    raise BudgetError(f"language enumeration exceeded {max_words} words")
                words[(x, n)] = bucket
    out: set = set()
    if accepts_lambda:
        out.add(())
    for n in range(1, max_len + 1):
        out |= words.get((axiom, n), set())
    return out


# ---------------------------------------------------------------------------
# reports


@dataclass
class VerificationReport:
    claim: str
    bound: int
    status: str  # "holds" | "fails"
    counterexamples: list = field(default_factory=list)
    diff_size: int = 0
    timings: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    MAX_WITNESSES = 10

    @property
    def holds(self) -> bool:
        return self.status == "holds"

    def line(self) -> str:
        return f"claim={self.claim} bound={self.bound} status={self.status} |diff|={self.diff_size}"

    def text(self) -> str:
        out = [self.line()]
        out.extend(f"  note: {n}" for n in self.notes)
        out.extend(f"  counterexample: {c}" for c in self.counterexamples)
        return "\n".join(out)


def _witnesses(items, render=str, cap=VerificationReport.MAX_WITNESSES) -> list:
    return [render(x) for x in sorted(items, key=lambda w: (len(w), str(w)))[:cap]]


def _render_brackets(word) -> str:
    return " ".join(str(b) for b in word) if word else "λ"


def _render_terms(word) -> str:
    return "".join(str(t) for t in word) if word else "λ"


def verify_cs(gx: ExtendedDyckGrammar, cover: rex.Regex, max_source_len: int) -> VerificationReport:
    """Check the bracket-representation identities at a bound.

    Cover words are enumerated to bracket length 2n, which corresponds to
    source words of length n+1 (a word of length m has traces of length
    2m-2); both identities are checked at that effective bound:

    * Dyck members of the cover = trace language (extension pairs included);
    * terminal image of the Dyck members = language of the grammar.
    """
    t0 = time.perf_counter()
    n = max_source_len
    report = VerificationReport("cs", n, "holds")
    cover_words = rex.enumerate_words(cover, 2 * n)
    t1 = time.perf_counter()
    dyck_side = {w for w in cover_words if dyck_membership(w, gx.K)}
    t2 = time.perf_counter()
    trace_side = enumerate_trace_language(gx, n + 1).trace_set()
    t3 = time.perf_counter()
    if dyck_side != trace_side:
        report.status = "fails"
        extra = dyck_side - trace_side
        missing = trace_side - dyck_side
        report.diff_size = len(extra) + len(missing)
        report.counterexamples = _witnesses(extra, lambda w: "not a trace: " + _render_brackets(w))
        report.counterexamples += _witnesses(missing, lambda w: "missing trace: " + _render_brackets(w))
    phi_side = {apply_phi(gx, w) for w in dyck_side}
    lang = enumerate_language(gx.base, n + 1)
    if phi_side != lang:
        report.status = "fails"
        extra = phi_side - lang
        missing = lang - phi_side
        report.diff_size += len(extra) + len(missing)
        report.counterexamples += _witnesses(extra, lambda w: "phi image not in language: " + _render_terms(w))
        report.counterexamples += _witnesses(missing, lambda w: "word not covered: " + _render_terms(w))
    report.timings = {
        "enumerate_cover": t1 - t0,
        "dyck_filter": t2 - t1,
        "trace_language": t3 - t2,
        "total": time.perf_counter() - t0,
    }
    report.notes.append(f"cover enumerated to bracket length {2 * n} (source length {n + 1})")
    return report


def verify_superset(g: DyckGrammar, gr, max_len: int, max_words: int | None = None) -> VerificationReport:
    """Check that the regular approximation contains the language up to a
    bound; the size of the difference is reported as the tightness metric.

    Inclusion is decided word by word against the automaton, so only the
    grammar's own language is materialized; the metric is counted over the
    determinized automaton (and skipped, with a note, when that outgrows its
    cap)."""
    from .approx import NfaMatcher

    t0 = time.perf_counter()
    lang = enumerate_language(g, max_len, max_words)
    t1 = time.perf_counter()
    matcher = NfaMatcher(gr)
    missing = {w for w in lang if not matcher.accepts(w)}
    t2 = time.perf_counter()
    report = VerificationReport("superset", max_len, "holds")
    if missing:
        report.status = "fails"
        report.counterexamples = _witnesses(missing, lambda w: "not approximated: " + _render_terms(w))
    reg_count = matcher.count_words(max_len)
    if reg_count is None:
        report.diff_size = -1
        report.notes.append("tightness metric skipped: determinized automaton too large")
    else:
        report.diff_size = reg_count - len(lang) + len(missing)
    report.timings = {
        "language": t1 - t0,
        "inclusion": t2 - t1,
        "total": time.perf_counter() - t0,
    }
    return report


def verify_dyck_nf(g: DyckGrammar, original, max_len: int) -> VerificationReport:
    """Check the normal-form conditions plus bounded language agreement with
    the grammar the conversion started from."""
    t0 = time.perf_counter()
    report = VerificationReport("dycknf", max_len, "holds")
    bad = g.condition_violations()
    if bad:
        report.status = "fails"
        report.counterexamples += [f"condition violated: {b}" for b in bad]
    mine = enumerate_language(g, max_len)
    theirs = enumerate_language(original, max_len)
    if mine != theirs:
        report.status = "fails"
        diff = mine ^ theirs
        report.diff_size = len(diff)
        report.counterexamples += _witnesses(diff, lambda w: "language mismatch: " + _render_terms(w))
    report.timings = {"total": time.perf_counter() - t0}
    return report
