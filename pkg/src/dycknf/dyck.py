"""Trace words of leftmost derivations and Dyck-language machinery.

A trace word is the sequence of nonterminals rewritten along a leftmost
derivation, axiom excluded; it equals the derivation tree read depth-first
ignoring root and leaves.  For grammars in Dyck normal form every trace word
is a member of the one-sided Dyck language over the grammar's bracket pairs.

Membership is implemented through the matched-pair characterization (a string
belongs iff its full span is matched and every matched span has balanced
per-index projections) and separately through a plain pushdown check; the two
are tested against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .grammar import (
    Bracket,
    Derivation,
    DyckGrammar,
    ExtendedDyckGrammar,
    GrammarError,
    Step,
    replay,
)


class DyckError(ValueError):
    pass


def _require_brackets(word: Sequence, k: int | None = None) -> None:
    for b in word:
        if not isinstance(b, Bracket):
            raise DyckError(f"foreign symbol {b!r}")
        if k is not None and not (1 <= b.index <= k):
            raise DyckError(f"bracket {b} outside pairs 1..{k}")


def is_balanced(word: Sequence) -> bool:
    """Balance check over a single bracket pair: equal counts and no prefix
    closes more than it opens."""
    _require_brackets(word)
    indices = {b.index for b in word}
    if len(indices) > 1:
        raise DyckError(f"expected a single pair, saw indices {sorted(indices)}")
    depth = 0
    for b in word:
        depth += -1 if b.is_right else 1
        if depth < 0:
            return False
    return depth == 0


@dataclass(frozen=True)
class PairKind:
    """Classification of a position pair (1-based, inclusive) in a word."""

    matched: bool
    nested: bool
    reducible: bool


def _h_balanced(word: Sequence, i: int, j: int) -> bool:
    # image under the side-forgetting homomorphism is balanced
    depth = 0
    for b in word[i - 1 : j]:
        depth += -1 if b.is_right else 1
        if depth < 0:
            return False
    return depth == 0


def pair_classify(word: Sequence, i: int, j: int) -> PairKind:
    """Matched / nested / reducible status of the span (i, j) of ``word``."""
    _require_brackets(word)
    if not (1 <= i <= j <= len(word)):
        raise DyckError(f"positions ({i}, {j}) out of range for length {len(word)}")
    matched = _h_balanced(word, i, j)
    nested = matched and (j == i + 1 or (j > i + 1 and _h_balanced(word, i + 1, j - 1)))
    reducible = matched and any(
        _h_balanced(word, i, jj) and _h_balanced(word, jj + 1, j) for jj in range(i, j)
    )
    return PairKind(matched, nested, reducible)


def _span_projections_balanced(word: Sequence, i: int, j: int) -> bool:
    # every per-index projection of the span is balanced
    depths: dict[int, int] = {}
    for b in word[i - 1 : j]:
        d = depths.get(b.index, 0) + (-1 if b.is_right else 1)
        if d < 0:
            return False
        depths[b.index] = d
    return all(d == 0 for d in depths.values())


def dyck_membership(word: Sequence, k: int) -> bool:
    """Membership in the one-sided Dyck language over pairs ``1..k``.

    Matched-pair characterization: the full span must be matched, and every
    matched span must have balanced per-index projections.
    """
    _require_brackets(word, k)
    n = len(word)
    if n == 0:
        return True
    if not _h_balanced(word, 1, n):
        return False
    # prefix depths of the side-forgetting image, for fast matched testing
    depth = [0] * (n + 1)
    for p, b in enumerate(word, start=1):
        depth[p] = depth[p - 1] + (-1 if b.is_right else 1)
    for i in range(1, n + 1):
        low = depth[i - 1]
        for j in range(i, n + 1):
            if depth[j] < low:
                break  # no span starting at i extends past a dip below base
            if depth[j] == low:
                if not _span_projections_balanced(word, i, j):
                    return False
    return True


def stack_dyck_check(word: Sequence, k: int) -> bool:
    """Independent pushdown membership check (the test oracle)."""
    _require_brackets(word, k)
    stack: list[int] = []
    for b in word:
        if b.is_right:
            if not stack or stack[-1] != b.index:
                return False
            stack.pop()
        else:
            stack.append(b.index)
    return not stack


# ---------------------------------------------------------------------------
# trace words


@dataclass(frozen=True)
class TraceWord:
    brackets: tuple
    source_word: tuple
    grammar: object = None

    def __len__(self):
        return len(self.brackets)

    def __str__(self):
        return " ".join(str(b) for b in self.brackets)


def trace_word(g, d: Derivation) -> TraceWord:
    """Trace of a complete leftmost derivation: the rewritten nonterminals in
    order, axiom excluded."""
    word = replay(g, d, require_leftmost=True)
    axiom = g.axiom if not hasattr(g, "start") else g.start
    if not d.steps or d.steps[0].lhs != axiom:
        raise GrammarError("derivation must begin at the axiom")
    brackets = tuple(s.lhs for s in d.steps[1:])
    if any(not isinstance(b, Bracket) for b in brackets):
        raise GrammarError("non-axiom steps must rewrite brackets")
    return TraceWord(brackets, word, g)


def parse_trace(text: str) -> tuple:
    """Whitespace-separated bracket tokens -> tuple of brackets."""
    out = []
    for tok in text.split():
        if not tok or tok[0] not in "[]" or not tok[1:].isdigit():
            raise DyckError(f"bad bracket token {tok!r}")
        out.append(Bracket(int(tok[1:]), tok[0] == "]"))
    return tuple(out)


# ---------------------------------------------------------------------------
# leftmost-derivation enumeration


def iter_leftmost_derivations(
    g, max_len: int, max_items: int | None = None
) -> Iterator[tuple[tuple, Derivation]]:
    """All leftmost derivations of terminal words of length <= max_len.

    Works for CNF-shaped grammars (terminal, binary-pair and axiom-λ rules).
    In such grammars a leftmost sentential form is a terminal prefix followed
    by nonterminals, and every productive nonterminal yields at least one
    terminal, which gives the pruning bound.
    """
    if isinstance(g, ExtendedDyckGrammar):
        prods, axiom = g.productions, g.base.axiom
    elif isinstance(g, DyckGrammar):
        prods, axiom = g.productions, g.axiom
    else:
        prods, axiom = g.productions, g.start
    table: dict = {}
    for p in prods:
        table.setdefault(p.lhs, []).append(p.rhs)
    for lhs in table:
        table[lhs].sort(key=lambda r: tuple(str(x) for x in r))

    # productive nonterminals (those deriving some terminal word)
    productive: set = set()
    changed = True
    while changed:
        changed = False
        for lhs, bodies in table.items():
            if lhs in productive:
                continue
            for rhs in bodies:
                if all((x not in table) or (x in productive) for x in rhs):
                    productive.add(lhs)
                    changed = True
                    break

    yielded = 0
    explored = 0
    stack: list[tuple[tuple, tuple, tuple]] = [((), (axiom,), ())]
    while stack:
        explored += 1
        if max_items is not None and explored > 50 * max_items:
            raise DyckError("derivation enumeration exceeded its work budget")
        prefix, pending, steps = stack.pop()
        if not pending:
            yielded += 1
            if max_items is not None and yielded > max_items:
                raise DyckError(f"derivation enumeration exceeded {max_items} items")
            yield prefix, Derivation(steps)
            continue
        head, rest = pending[0], pending[1:]
        if head not in table or head not in productive:
            continue
        pos = len(prefix)
        for rhs in reversed(table[head]):
            step = Step(head, rhs, pos)
            if len(rhs) == 1 and rhs[0] not in table:
                new_prefix = prefix + (rhs[0],)
                if len(new_prefix) + len(rest) <= max_len:
                    stack.append((new_prefix, rest, steps + (step,)))
            elif rhs == ():
                if len(prefix) + len(rest) <= max_len:
                    stack.append((prefix, rest, steps + (step,)))
            else:
                if len(prefix) + len(rhs) + len(rest) <= max_len:
                    stack.append((prefix, rhs + rest, steps + (step,)))
    return


@dataclass
class TraceEnumeration:
    """Deduplicated trace words plus per-word leftmost-derivation counts."""

    traces: dict  # bracket tuple -> TraceWord
    derivations_per_word: dict  # terminal word -> count

    def trace_set(self) -> set:
        return set(self.traces)


def enumerate_trace_language(
    gx: ExtendedDyckGrammar, max_source_len: int, max_items: int | None = 2_000_000
) -> TraceEnumeration:
    """Trace words of all leftmost derivations of words of length
    <= max_source_len, extension pairs included.

    Computed compositionally: the reading of a subtree of exact yield n is
    assembled from the readings of its two children, so shared subtrees are
    enumerated once.  One-step derivations of the base grammar have an empty
    trace and are not part of the trace language; with an extension, each
    axiom terminal rule contributes its two-bracket trace instead.
    """
    if max_source_len < 1:
        raise DyckError("max_source_len must be >= 1")
    g = gx.base
    term_rules: dict = {}
    bin_rules: dict = {}
    nts: set = set()
    for p in g.productions:
        nts.add(p.lhs)
        if len(p.rhs) == 1 and not isinstance(p.rhs[0], Bracket):
            term_rules.setdefault(p.lhs, set()).add(p.rhs[0])
        elif len(p.rhs) == 2:
            nts |= set(p.rhs)
            bin_rules.setdefault(p.lhs, []).append(p.rhs)

    # readings[x, n]: subtree readings (root excluded) paired with their yield
    readings: dict = {}
    total = 0
    for n in range(1, max_source_len + 1):
        for x in nts:
            bucket: set = set()
            if n == 1 and x in term_rules:
                bucket |= {((), (t,)) for t in term_rules[x]}
            for b, c in bin_rules.get(x, ()):
                for i in range(1, n):
                    us = readings.get((b, i))
                    vs = readings.get((c, n - i))
                    if us and vs:
                        for tb, wb in us:
                            for tc, wc in vs:
                                bucket.add(((b,) + tb + (c,) + tc, wb + wc))
            if bucket:
                total += len(bucket)
                if max_items is not None and total > max_items:
                    raise DyckError(f"trace enumeration exceeded {max_items} items")
                readings[(x, n)] = bucket

    # per-word leftmost-derivation counts (equals the number of parse trees)
    counts: dict = {}
    tree_counts: dict = {}
    for n in range(1, max_source_len + 1):
        for x in nts:
            bucket: dict = {}
            if n == 1:
                for t in term_rules.get(x, ()):
                    bucket[(t,)] = bucket.get((t,), 0) + 1
            for b, c in bin_rules.get(x, ()):
                for i in range(1, n):
                    us = tree_counts.get((b, i))
                    vs = tree_counts.get((c, n - i))
                    if us and vs:
                        for wb, cb in us.items():
                            for wc, cc in vs.items():
                                w = wb + wc
                                bucket[w] = bucket.get(w, 0) + cb * cc
            if bucket:
                tree_counts[(x, n)] = bucket
    for n in range(1, max_source_len + 1):
        for w, c in tree_counts.get((g.axiom, n), {}).items():
            counts[w] = counts.get(w, 0) + c

    traces: dict = {}
    for n in range(2, max_source_len + 1):
        for tr, w in readings.get((g.axiom, n), ()):
            traces.setdefault(tr, TraceWord(tr, w, g))
    for i, t in gx.extra:
        pair = (Bracket.left(i), Bracket.right(i))
        source = (t,) if t is not None else ()
        traces.setdefault(pair, TraceWord(pair, source, gx))
    return TraceEnumeration(traces, counts)
