"""Dependency graphs of a Dyck-normal grammar and the regular cover language.

A dependency graph follows, from the axiom or from the right bracket of a
silent pair, the nonterminal that a leftmost derivation rewrites next, up to
the first core segment (a pair whose both sides emit terminals).  Its finals
are the left brackets of core pairs.  Reading all root-to-final paths gives a
finite set of regular expressions; each is extended with the mirror image of
its loop structure, and the extended expressions are stitched into one
extended graph whose paths describe whole trace words.  The image of those
paths, where every bracket that stands for a pair is expanded back to the
pair, is a regular language whose intersection with the Dyck language is
exactly the trace language of the grammar.

Vertex vocabulary: for a left-emitting pair only the right bracket continues
a derivation, so it is the vertex; core pairs contribute their left bracket
(a final); right-emitting and silent pairs contribute their left bracket.
Right brackets of silent pairs root their own graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import rex
from .grammar import (
    Bracket,
    DyckGrammar,
    Emission,
    ExtendedDyckGrammar,
    GrammarError,
    PairClasses,
    symkey,
)


class GraphError(ValueError):
    pass


def continuation_vertex(cls: PairClasses, index: int) -> Bracket:
    """The vertex a pair contributes: right bracket for left-emitting pairs,
    left bracket otherwise."""
    if cls.of(index) is Emission.LEFT:
        return Bracket.right(index)
    return Bracket.left(index)


def vertex_alphabet(g: DyckGrammar, cls: PairClasses) -> frozenset:
    return frozenset(continuation_vertex(cls, i) for i in range(1, g.k + 1))


@dataclass
class DependencyGraph:
    root: object  # axiom name or right bracket of a silent pair
    vertices: frozenset
    edges: frozenset  # of (vertex, vertex)
    finals: frozenset
    cls: PairClasses

    def successors(self, v) -> list:
        return sorted((w for (u, w) in self.edges if u == v), key=symkey)

    def unreachable(self) -> frozenset:
        """Vertices not reachable from the root (diagnostic only)."""
        seen = {self.root}
        stack = [self.root]
        succ: dict = {}
        for u, w in self.edges:
            succ.setdefault(u, []).append(w)
        while stack:
            u = stack.pop()
            for w in succ.get(u, ()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return frozenset(self.vertices - seen)


def build_dependency_graph(g: DyckGrammar, cls: PairClasses, root) -> DependencyGraph:
    """Graph of Construction: an edge per binary rule, from the rule's source
    vertex to the continuation vertex of the produced pair."""
    g.check()
    if root != g.axiom:
        if not (isinstance(root, Bracket) and root.is_right and cls.of(root.index) is Emission.NONE):
            raise GraphError(f"root must be the axiom or the right bracket of a silent pair, got {root}")
    vertices = set(vertex_alphabet(g, cls)) | {root}
    edges = set()
    for p in g.productions:
        if len(p.rhs) != 2:
            continue
        target = continuation_vertex(cls, p.rhs[0].index)
        if p.lhs == g.axiom:
            if root == g.axiom:
                edges.add((g.axiom, target))
        elif p.lhs in vertices:
            edges.add((p.lhs, target))
    finals = frozenset(Bracket.left(i) for i in cls.cores if Bracket.left(i) in vertices)
    return DependencyGraph(root, frozenset(vertices), frozenset(edges), finals, cls)


def extract_left_regexes(dg: DependencyGraph, max_classes: int = 128) -> list:
    """All root-to-final path classes, one plus/star regex per class.

    State elimination runs farthest-from-root first; top-level unions are
    split into separate classes; classes are ordered longest-shortest-word
    first, with the canonical regex order breaking ties.  Graphs yielding
    more than ``max_classes`` classes are rejected as beyond desk scale.
    """
    out = []
    for final in sorted(dg.finals, key=symkey):
        r = rex.vertex_path_regex(dg.edges, dg.root, final, tie_key=symkey)
        for cls_rx in rex.distribute_top(r, max_branches=max_classes):
            if cls_rx not in out:
                out.append(cls_rx)
    if len(out) > max_classes:
        raise rex.BudgetError(f"dependency graph yields more than {max_classes} path classes")
    out.sort(key=lambda r: (-rex.min_word_len(r), rex.sort_key(r)))
    return out


def mirror_image(cls: PairClasses, r: rex.Regex) -> rex.Regex:
    """Image of the reversed regex: left brackets of right-emitting and
    silent pairs map to their right bracket, everything else to λ."""

    def img(s):
        if isinstance(s, Bracket) and not s.is_right and cls.of(s.index) in (Emission.RIGHT, Emission.NONE):
            return rex.sym(s.mate)
        return rex.EPSILON

    return rex.normalize(rex.map_symbols(rex.reverse(r), img))


def mirror_extend(r: rex.Regex, cls: PairClasses) -> rex.Regex:
    """Concatenate a left path regex with the mirror image of its loops."""
    return rex.normalize(rex.cat(r, mirror_image(cls, r)))


# ---------------------------------------------------------------------------
# extended graph


@dataclass
class ExtendedGraph:
    initial: object
    vertices: frozenset
    edges: dict  # (u, v) -> justification tag
    finals: dict  # v -> justification tag
    cls: PairClasses

    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def mirror_edges(self) -> frozenset:
        """Edges that stitch mirror structure (linking-item justifications)."""
        return frozenset(e for e, tag in self.edges.items() if tag.startswith(("8", "9")))


def _class_of(cls: PairClasses, s) -> str:
    if not isinstance(s, Bracket):
        return "axiom"
    e = cls.of(s.index)
    if e is Emission.BOTH:
        return "core-left" if not s.is_right else "core-right"
    if e is Emission.LEFT:
        return "l2-right" if s.is_right else "l2-left"
    if e is Emission.RIGHT:
        return "r2-right" if s.is_right else "r2-left"
    return "silent-right" if s.is_right else "silent-left"


# adjacency within a cover expression -> extended-graph edge item
_ADJ_ITEMS = {
    ("axiom", "l2-right"): "1",
    ("axiom", "r2-left"): "1",
    ("axiom", "silent-left"): "1",
    ("axiom", "core-left"): "1",
    ("l2-right", "l2-right"): "2",
    ("l2-right", "r2-left"): "3",
    ("l2-right", "silent-left"): "3",
    ("r2-left", "l2-right"): "3",
    ("silent-left", "l2-right"): "3",
    ("r2-left", "r2-left"): "4",
    ("r2-left", "silent-left"): "4",
    ("silent-left", "r2-left"): "4",
    ("silent-left", "silent-left"): "4",
    ("l2-right", "core-left"): "5",
    ("r2-left", "core-left"): "5",
    ("silent-left", "core-left"): "5",
    ("r2-right", "r2-right"): "8.i",
    ("r2-right", "silent-right"): "8.i",
    ("core-left", "r2-right"): "9.i",
    ("core-left", "silent-right"): "9.i",
}

# prefix adjacency inside a silent-rooted expression set
_PREFIX_ITEMS = {
    ("silent-right", "core-left"): "6",
    ("silent-right", "r2-left"): "7",
    ("silent-right", "silent-left"): "7",
    ("silent-right", "l2-right"): "7",
}


def build_extended_graph(
    g: DyckGrammar, cls: PairClasses, regex_sets: Mapping
) -> ExtendedGraph:
    """Stitch the mirrored path expressions into one graph.

    ``regex_sets`` maps each root (the axiom, plus the right bracket of every
    silent pair) to its list of mirrored path expressions.  Direct edges come
    from symbol adjacencies inside the expressions; the linking edges and the
    finals are decided through the reflexive-transitive closure of the
    "some expression of this root ends in that silent right bracket"
    relation.
    """
    g.check()
    if g.axiom not in regex_sets:
        raise GraphError("missing expression set for the axiom")
    silent_roots = {Bracket.right(i) for i in cls.silent}
    mentioned: set = set()
    for rs in regex_sets.values():
        for r in rs:
            mentioned |= {s for s in rex.symbols(r) if isinstance(s, Bracket)}
    for root in silent_roots:
        if root not in regex_sets and root in mentioned:
            raise GraphError(f"missing expression set for reachable silent pair root {root}")

    pair_info: dict = {}  # root -> set of adjacent symbol pairs
    prefix_info: dict = {}
    last_info: dict = {}
    for root, rs in regex_sets.items():
        pairs: set = set()
        prefixes: set = set()
        lasts: set = set()
        for r in rs:
            pa = rex.glushkov(r)
            pairs |= pa.follow_pairs()
            firsts = pa.first_symbols()
            if len(firsts) != 1 or next(iter(firsts)) != root:
                raise GraphError(f"expression of root {root} does not start with it")
            first_pos = next(iter(pa.firsts))
            prefixes |= {(root, pa.positions[q]) for q in pa.follow[first_pos]}
            lasts |= pa.last_symbols()
        pair_info[root] = pairs
        prefix_info[root] = prefixes
        last_info[root] = lasts

    all_pairs = set().union(*pair_info.values()) if pair_info else set()

    vertices = set(vertex_alphabet(g, cls)) | {g.axiom}
    vertices |= {Bracket.right(i) for i in cls.right_emitting | cls.silent}
    edges: dict = {}
    finals: dict = {}

    def put(u, v, tag):
        if (u, v) not in edges:
            edges[(u, v)] = tag

    for a, b in sorted(all_pairs, key=lambda p: (symkey(p[0]), symkey(p[1]))):
        tag = _ADJ_ITEMS.get((_class_of(cls, a), _class_of(cls, b)))
        if tag:
            put(a, b, tag)
    for root in sorted(regex_sets, key=symkey):
        if root == g.axiom:
            continue
        for a, b in sorted(prefix_info[root], key=lambda p: (symkey(p[0]), symkey(p[1]))):
            tag = _PREFIX_ITEMS.get((_class_of(cls, a), _class_of(cls, b)))
            if tag:
                put(a, b, tag)

    # closure of "a regex of root ]j ends in ]j'" over silent pairs
    ends_in_silent: dict = {}
    for root in regex_sets:
        if root == g.axiom:
            continue
        j = root.index
        ends_in_silent[j] = {
            s.index for s in last_info[root] if isinstance(s, Bracket) and s.is_right and cls.of(s.index) is Emission.NONE
        }
    closure: dict = {j: {j} for j in ends_in_silent}
    changed = True
    while changed:
        changed = False
        for j in closure:
            for j2 in list(closure[j]):
                for j3 in ends_in_silent.get(j2, ()):
                    if j3 in closure and j3 not in closure[j]:
                        closure[j].add(j3)
                        changed = True

    def chained_lasts(j: int):
        """Yield (last symbol, direct?) over the closure of silent pair j."""
        for j2 in sorted(closure.get(j, ())):
            root = Bracket.right(j2)
            if root in last_info:
                for s in sorted(last_info[root], key=symkey):
                    yield s, j2 == j

    # linking edges: evidence is a ]k ]j adjacency with k silent
    for a, b in sorted(all_pairs, key=lambda p: (symkey(p[0]), symkey(p[1]))):
        if not (isinstance(a, Bracket) and a.is_right and cls.of(a.index) is Emission.NONE):
            continue
        if not (isinstance(b, Bracket) and b.is_right and cls.of(b.index) in (Emission.RIGHT, Emission.NONE)):
            continue
        for s, direct in chained_lasts(a.index):
            if isinstance(s, Bracket) and s.is_right and cls.of(s.index) is Emission.RIGHT:
                put(s, b, "8.ii" if direct else "8.iii")
            elif isinstance(s, Bracket) and not s.is_right and cls.of(s.index) is Emission.BOTH:
                put(s, b, "9.ii" if direct else "9.iii")

    # finals
    for s in sorted(last_info[g.axiom], key=symkey):
        if not isinstance(s, Bracket):
            continue
        if not s.is_right and cls.of(s.index) is Emission.BOTH:
            finals.setdefault(s, "10.i")
        elif s.is_right and cls.of(s.index) is Emission.RIGHT:
            finals.setdefault(s, "11.i")
        elif s.is_right and cls.of(s.index) is Emission.NONE:
            for s2, direct in chained_lasts(s.index):
                if isinstance(s2, Bracket) and not s2.is_right and cls.of(s2.index) is Emission.BOTH:
                    finals.setdefault(s2, "10.ii" if direct else "10.iii")
                elif isinstance(s2, Bracket) and s2.is_right and cls.of(s2.index) is Emission.RIGHT:
                    finals.setdefault(s2, "11.ii" if direct else "11.iii")

    return ExtendedGraph(g.axiom, frozenset(vertices), edges, finals, cls)


# ---------------------------------------------------------------------------
# the cover language


def pair_expansion(cls: PairClasses, s) -> rex.Regex:
    """Bracket image used to turn path words into cover words: brackets that
    stand for a whole pair are expanded back to the pair, the axiom vanishes,
    and brackets of right-emitting/silent pairs stay as they are."""
    if not isinstance(s, Bracket):
        return rex.EPSILON
    e = cls.of(s.index)
    if e is Emission.LEFT and s.is_right:
        return rex.cat(rex.sym(s.mate), rex.sym(s))
    if e is Emission.BOTH and not s.is_right:
        return rex.cat(rex.sym(s), rex.sym(s.mate))
    return rex.sym(s)


def graph_paths_regex(edges: Iterable, initial, finals: Iterable) -> rex.Regex:
    parts = []
    for f in sorted(finals, key=symkey):
        r = rex.vertex_path_regex(edges, initial, f, tie_key=symkey)
        if not isinstance(r, rex.Empty):
            parts.append(r)
    return rex.normalize(rex.alt(*parts)) if parts else rex.EMPTY


def regular_cover(gx: ExtendedDyckGrammar, eg: ExtendedGraph) -> rex.Regex:
    """The regular cover: the pair-expanded image of all initial-to-final
    path words of the extended graph, plus one two-bracket word per extension
    pair."""
    base = graph_paths_regex(eg.edge_set(), eg.initial, eg.finals)
    cls = eg.cls
    img = rex.map_symbols(base, lambda s: pair_expansion(cls, s)) if not isinstance(base, rex.Empty) else base
    extras = [
        rex.cat(rex.sym(Bracket.left(i)), rex.sym(Bracket.right(i)))
        for i, _ in gx.extra
    ]
    return rex.normalize(rex.alt(img, *extras))


def path_words(edges: Iterable, initial, finals, max_len: int) -> set:
    """Label sequences of initial-to-final paths, bounded; the initial vertex
    is not part of the word (mirrors the cover-word reading)."""
    succ: dict = {}
    for u, v in edges:
        succ.setdefault(u, []).append(v)
    final_set = set(finals)
    out: set = set()
    frontier: dict = {(): {initial}}
    while frontier:
        nxt: dict = {}
        for word, ends in frontier.items():
            for u in ends:
                if u in final_set:
                    out.add(word)
                if len(word) == max_len:
                    continue
                for v in succ.get(u, ()):
                    w2 = word + (v,)
                    nxt.setdefault(w2, set()).add(v)
        frontier = nxt
    return out
