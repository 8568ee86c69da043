"""Refined assembly of the cover language.

Star loops allow a mirror segment to iterate without its left-hand
counterpart, which bloats the cover with junk.  The refinement first rewrites
every path expression as a finite union of plus-only expressions, labels each
expression and its brackets with a unique number, turns each into a small
digraph (repeated brackets get distinct occurrence marks so the digraph reads
back to the expression), and then stitches the digraphs together:

* step 1 hangs all axiom-rooted digraphs off the axiom vertex;
* step 2 repeatedly connects, for every silent right bracket that still needs
  a continuation (a *dummy* vertex, one with an outgoing edge into a right
  bracket, or a *pop* vertex, one with no continuation at all), the digraphs
  rooted at that bracket, rerouting the interrupted edge through the
  connected digraph's final vertex (a *glue* edge when the final emits).

Two relabeling rules keep junk paths out: a terminal digraph whose final sits
right after a same-index dummy creates a loop when reconnected, so the other
terminal digraphs of the family are attached to the outer connection point as
freshly labeled copies (keeping loop paths and direct paths apart); and a pop
connection to an already-placed digraph would force one final vertex to be
both a continuation and an exit, so pop connections get fresh copies unless
the digraph was placed at that very vertex.
"""

from __future__ import annotations

import itertools
import os
from collections import deque
from dataclasses import dataclass, field

from . import rex
from .grammar import (
    Bracket,
    DyckGrammar,
    Emission,
    ExtendedDyckGrammar,
    PairClasses,
    symkey,
)
from .depgraph import pair_expansion


class RefinementError(ValueError):
    pass


ITER_CAP_ENV = "DYCKNF_MAX_ITER"


@dataclass(frozen=True, order=True)
class LBracket:
    """A bracket vertex carrying its expression label and occurrence mark."""

    bracket: Bracket
    label: int | None
    mark: int = 0

    def __post_init__(self):
        object.__setattr__(self, "_h", hash((self.bracket, self.label, self.mark)))

    def __hash__(self):
        return self._h

    def __str__(self):
        out = str(self.bracket)
        if self.mark:
            out += "'" * self.mark
        if self.label is not None:
            out += f"^{self.label}"
        return out

    def __repr__(self):
        return str(self)


def lkey(v) -> tuple:
    if isinstance(v, LBracket):
        return (1, symkey(v.bracket), v.label if v.label is not None else -1, v.mark)
    return (0, str(v), 0, 0)


# ---------------------------------------------------------------------------
# plus expansion


def plus_expand(r: rex.Regex, max_results: int = 4096) -> list[rex.Regex]:
    """Fork every star into its plus and its empty branch, distributing over
    concatenation and union; the union of the results equals the input."""

    def expand(node) -> list[rex.Regex]:
        if isinstance(node, (rex.Empty, rex.Epsilon, rex.Sym)):
            return [node]
        if isinstance(node, rex.Cat):
            pools = [expand(p) for p in node.parts]
            n = 1
            for pool in pools:
                n *= max(1, len(pool))
            if n > max_results:
                raise RefinementError(f"plus expansion exceeded {max_results} branches")
            return [rex.cat(*combo) for combo in itertools.product(*pools)]
        if isinstance(node, rex.Alt):
            out = []
            for o in node.options:
                out.extend(expand(o))
            return out
        if isinstance(node, rex.Star):
            bodies = expand(node.body)
            return [rex.plus(rex.alt(*bodies)), rex.EPSILON]
        if isinstance(node, rex.Plus):
            bodies = expand(node.body)
            return [rex.plus(rex.alt(*bodies))]
        raise TypeError(node)

    out: list[rex.Regex] = []
    for cand in expand(rex.normalize(r)):
        c = rex.normalize(cand)
        if rex.star_height(c):
            raise RefinementError(f"star survived plus expansion: {rex.pretty(c)}")
        if c not in out:
            out.append(c)
    return out


# ---------------------------------------------------------------------------
# labeled digraphs


@dataclass
class LabeledDigraph:
    """Digraph of one labeled plus-only expression; reading it from the root
    to the final reproduces the expression."""

    label: int
    root: object  # axiom name or unlabeled right bracket of a silent pair
    regex: rex.Regex  # over LBracket symbols (root symbol excluded)
    vertices: tuple
    edges: frozenset
    siblings: tuple  # successors of the root
    finals: tuple
    core: LBracket
    mirror: frozenset  # vertices of the mirror segment
    cls: PairClasses

    @property
    def terminal(self) -> bool:
        """No further connection needed after the final vertex."""
        return all(_is_exit(self.cls, f) for f in self.finals)


def _is_exit(cls: PairClasses, v: LBracket) -> bool:
    b = v.bracket
    if not b.is_right and cls.of(b.index) is Emission.BOTH:
        return True
    return b.is_right and cls.of(b.index) is Emission.RIGHT


def _label_regex(r: rex.Regex, label: int, root) -> rex.Regex:
    """Attach the expression label to every bracket, with occurrence marks
    for repetitions; the leading root symbol stays unlabeled."""
    seen: dict = {}
    state = {"first": True}

    def walk(node):
        if isinstance(node, rex.Sym):
            if state["first"]:
                state["first"] = False
                if node.symbol == root or (isinstance(root, Bracket) and node.symbol == root):
                    return rex.sym(root if not isinstance(root, Bracket) else LBracket(root, None))
            b = node.symbol
            mark = seen.get(b, 0)
            seen[b] = mark + 1
            return rex.sym(LBracket(b, label, mark))
        if isinstance(node, rex.Cat):
            return rex.cat(*[walk(p) for p in node.parts])
        if isinstance(node, rex.Alt):
            return rex.alt(*[walk(o) for o in node.options])
        if isinstance(node, rex.Plus):
            return rex.plus(walk(node.body))
        if isinstance(node, (rex.Epsilon, rex.Empty)):
            return node
        raise TypeError(node)

    return walk(r)


def label_and_digraph(plus_sets: dict, cls: PairClasses) -> list[LabeledDigraph]:
    """Label the plus expressions of every root consecutively (axiom first,
    then silent pairs by index) and build one digraph per expression."""
    roots = sorted(plus_sets, key=lambda r: (isinstance(r, Bracket), symkey(r)))
    out: list[LabeledDigraph] = []
    q = 0
    for root in roots:
        for r in plus_sets[root]:
            q += 1
            out.append(_digraph_for(r, q, root, cls))
    return out


def _digraph_for(r: rex.Regex, label: int, root, cls: PairClasses) -> LabeledDigraph:
    labeled = _label_regex(rex.normalize(r), label, root)
    pa = rex.glushkov(labeled)
    if pa.nullable or len(pa.firsts) != 1:
        raise RefinementError(f"expression of root {root} must start with it: {rex.pretty(r)}")
    syms = pa.positions
    root_vertex = syms[next(iter(pa.firsts))]
    edges = frozenset((syms[p], syms[q]) for p, qs in pa.follow.items() for q in qs)
    vertices = tuple(syms)
    finals = tuple(sorted((syms[p] for p in pa.lasts), key=lkey))
    cores = [v for v in vertices if isinstance(v, LBracket) and v.label is not None
             and not v.bracket.is_right and cls.of(v.bracket.index) is Emission.BOTH]
    if len(cores) != 1:
        raise RefinementError(f"expected exactly one core segment, found {cores} in {rex.pretty(r)}")
    order = {v: i for i, v in enumerate(vertices)}
    mirror = frozenset(v for v in vertices if order[v] > order[cores[0]])
    siblings = tuple(sorted((syms[p] for p in pa.follow[next(iter(pa.firsts))]), key=lkey))
    return LabeledDigraph(
        label=label,
        root=root,
        regex=labeled,
        vertices=vertices,
        edges=edges,
        siblings=siblings,
        finals=finals,
        core=cores[0],
        mirror=mirror,
        cls=cls,
    )


# ---------------------------------------------------------------------------
# refined graph


def _edge_kind(cls: PairClasses, u, v) -> str:
    if (
        isinstance(u, LBracket)
        and u.bracket.is_right
        and cls.of(u.bracket.index) is Emission.NONE
        and isinstance(v, LBracket)
        and v.bracket.is_right
        and cls.of(v.bracket.index) in (Emission.RIGHT, Emission.NONE)
    ):
        return "dummy"
    return "stable"


class _Copy:
    __slots__ = ("src", "label", "vmap", "siblings", "finals", "terminal")

    def __init__(self, src, label, vmap):
        self.src = src
        self.label = label
        self.vmap = vmap
        self.siblings = [vmap[s] for s in src.siblings]
        self.finals = [vmap[f] for f in src.finals]
        self.terminal = src.terminal


@dataclass
class RefinedGraph:
    initial: object
    vertices: set = field(default_factory=set)
    edges: dict = field(default_factory=dict)  # (u, v) -> kind
    finals: set = field(default_factory=set)
    cls: PairClasses | None = None
    report: list = field(default_factory=list)
    copies: list = field(default_factory=list)
    mirror_vertices: set = field(default_factory=set)

    def successors(self, v) -> list:
        return sorted((w for (u, w) in self.edges if u == v), key=lkey)

    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def dummy_vertices(self) -> set:
        return {u for (u, v), kind in self.edges.items() if kind == "dummy"}

    def pop_vertices(self) -> set:
        out = set()
        for v in self.vertices:
            if not isinstance(v, LBracket):
                continue
            b = v.bracket
            if b.is_right and self.cls.of(b.index) is Emission.NONE:
                if not any(u == v for (u, _w) in self.edges):
                    out.add(v)
        return out

    def core_vertices(self) -> set:
        return {
            v
            for v in self.vertices
            if isinstance(v, LBracket)
            and not v.bracket.is_right
            and self.cls.of(v.bracket.index) is Emission.BOTH
        }

    def context_violations(self) -> list[str]:
        """Silent right brackets may only stand between an emitting vertex and
        a continuation: predecessors must emit (right of a right-emitting pair
        or left of a core pair), successors must be left brackets or right
        brackets of left-emitting pairs."""
        out = []
        for v in self.vertices:
            if not isinstance(v, LBracket):
                continue
            b = v.bracket
            if not (b.is_right and self.cls.of(b.index) is Emission.NONE):
                continue
            preds = [u for (u, w) in self.edges if w == v]
            succs = [w for (u, w) in self.edges if u == v]
            if not succs:
                out.append(f"{v} has no continuation (pop vertex)")
            for u in preds:
                ub = u.bracket if isinstance(u, LBracket) else None
                ok = ub is not None and (
                    (ub.is_right and self.cls.of(ub.index) is Emission.RIGHT)
                    or (not ub.is_right and self.cls.of(ub.index) is Emission.BOTH)
                )
                if not ok:
                    out.append(f"bad predecessor {u} of {v}")
            for w in succs:
                wb = w.bracket if isinstance(w, LBracket) else None
                ok = wb is not None and (
                    not wb.is_right or self.cls.of(wb.index) is Emission.LEFT
                )
                if not ok:
                    out.append(f"bad successor {w} of {v}")
        return out


def build_refined_graph(
    g: DyckGrammar,
    cls: PairClasses,
    digraphs: list[LabeledDigraph],
    relabel_pops_always: bool = False,
    max_events: int | None = None,
) -> RefinedGraph:
    """Assemble the refined graph from the labeled digraphs.

    The worklist processes dummy and pop vertices first-in-first-out; a
    vertex's dummy continuation is processed before its pop role.  The event
    cap defaults to 4 connection rounds per digraph and silent pair and can
    be overridden by the DYCKNF_MAX_ITER environment variable.
    """
    g.check()
    rg = RefinedGraph(initial=g.axiom, cls=cls)
    rg.vertices.add(g.axiom)
    families: dict = {}
    axiom_graphs: list[LabeledDigraph] = []
    for d in sorted(digraphs, key=lambda d: d.label):
        if d.root == g.axiom:
            axiom_graphs.append(d)
        else:
            families.setdefault(d.root.index, []).append(d)
    loopers: dict = {}
    for j, fam in families.items():
        loopers[j] = {
            d.label
            for d in fam
            if d.terminal
            and any(
                isinstance(u, LBracket) and u.bracket == Bracket.right(j)
                for f in d.finals
                for (u, w) in d.edges
                if w == f
            )
        }

    if max_events is None:
        env = os.environ.get(ITER_CAP_ENV)
        if env is not None:
            max_events = int(env)
        else:
            max_events = max(16, len(digraphs) * max(1, len(families)) * 4)

    next_label = max((d.label for d in digraphs), default=0)
    canonical: dict = {}  # src label -> _Copy
    connected_at: dict = {}  # vertex -> list[_Copy]
    container: dict = {}  # vertex -> _Copy
    events: deque = deque()
    dummy_done: set = set()
    dummy_scheduled: set = set()
    pop_scheduled: set = set()
    out_dummy: dict = {}  # vertex -> set of dummy-edge targets
    returns_done: set = set()
    vertex_budget = max(512, 64 * max(1, len(digraphs)))

    def set_edge(u, w, kind) -> None:
        rg.edges[(u, w)] = kind
        if kind == "dummy":
            out_dummy.setdefault(u, set()).add(w)
        else:
            out_dummy.get(u, set()).discard(w)

    def del_edge(u, w) -> None:
        rg.edges.pop((u, w), None)
        out_dummy.get(u, set()).discard(w)

    def schedule_dummy(u) -> None:
        if u not in dummy_scheduled and u not in dummy_done:
            dummy_scheduled.add(u)
            events.append(("dummy", u))

    def insert(src: LabeledDigraph, label: int) -> _Copy:
        if len(rg.vertices) > vertex_budget:
            raise RefinementError(f"refined graph exceeded {vertex_budget} vertices")
        vmap: dict = {}
        root_vertex = src.root if not isinstance(src.root, Bracket) else LBracket(src.root, None)
        for v in src.vertices:
            if v == root_vertex:
                continue
            nv = v if label == src.label else LBracket(v.bracket, label, v.mark)
            vmap[v] = nv
            rg.vertices.add(nv)
        copy = _Copy(src, label, vmap)
        for v, nv in vmap.items():
            container[nv] = copy
            if v in src.mirror:
                rg.mirror_vertices.add(nv)
        body_sources = set()
        for u, w in sorted(src.edges, key=lambda e: (lkey(e[0]), lkey(e[1]))):
            if u == root_vertex:
                continue  # the root is never materialized; siblings attach at sites
            body_sources.add(u)
            set_edge(vmap[u], vmap[w], _edge_kind(cls, vmap[u], vmap[w]))
        rg.copies.append(copy)
        # interior silent right brackets with a continued edge need connecting
        for v, nv in vmap.items():
            b = nv.bracket
            if b.is_right and cls.of(b.index) is Emission.NONE and v in body_sources:
                schedule_dummy(nv)
        if label == src.label:
            canonical[src.label] = copy
        return copy

    def add_return(u, z, seen=None):
        """Continuation edge from a connected digraph's final back to the
        interrupted target; glue if the final emits, else a further dummy."""
        if (u, z) in returns_done:
            return
        seen = seen or set()
        if u in seen:
            return
        seen.add(u)
        returns_done.add((u, z))
        if _is_exit(cls, u):
            set_edge(u, z, "glue")
        elif u in dummy_done:
            for c in connected_at.get(u, ()):
                for f in c.finals:
                    add_return(f, z, seen)
        else:
            set_edge(u, z, "dummy")
            schedule_dummy(u)

    def connect_family(v, zs) -> None:
        nonlocal next_label
        j = v.bracket.index
        fam = families.get(j)
        if fam is None:
            raise RefinementError(f"no digraphs rooted at ]{j} to continue {v}")
        fam_loopers = loopers[j]
        inner = (
            container.get(v) is not None
            and container[v].src.label in fam_loopers
            and container[v].src.root != g.axiom
            and container[v].src.root.index == j
        )
        site: list[_Copy] = connected_at.setdefault(v, [])
        for src in fam:
            own = container.get(v)
            if own is not None and own.src is src:
                copy = own  # reconnecting the digraph around its own interior dummy
            elif not inner and fam_loopers and src.terminal and src.label not in fam_loopers:
                next_label += 1
                copy = insert(src, next_label)
                rg.report.append(f"relabel: copy of digraph {src.label} as {next_label} at {v}")
            elif src.label in canonical:
                copy = canonical[src.label]
            else:
                copy = insert(src, src.label)
            if copy not in site:
                site.append(copy)
            for s in copy.siblings:
                if (v, s) not in rg.edges:
                    set_edge(v, s, "stable")
        # continuation edges only once the whole site is connected, so a
        # digraph whose final is this very vertex redistributes over all of it
        for copy in site:
            for f in copy.finals:
                for z in zs:
                    add_return(f, z)

    def process_dummy(v) -> None:
        if v in dummy_done:
            return
        zs = sorted(out_dummy.get(v, ()), key=lkey)
        for z in zs:
            del_edge(v, z)
        dummy_done.add(v)
        connect_family(v, zs)

    def process_pop(v) -> None:
        nonlocal next_label
        fresh = relabel_pops_always or v not in connected_at
        if fresh:
            j = v.bracket.index
            fam = families.get(j)
            if fam is None:
                raise RefinementError(f"no digraphs rooted at ]{j} to continue pop vertex {v}")
            copies = []
            for src in fam:
                next_label += 1
                copy = insert(src, next_label)
                rg.report.append(f"relabel: pop connection of digraph {src.label} as {next_label} at {v}")
                copies.append(copy)
                for s in copy.siblings:
                    if (v, s) not in rg.edges:
                        set_edge(v, s, "stable")
            connected_at.setdefault(v, []).extend(copies)
        else:
            copies = connected_at[v]
        for c in copies:
            for f in c.finals:
                if _is_exit(cls, f):
                    rg.finals.add(f)
                elif ("pop", f) not in events and f not in pop_scheduled:
                    events.append(("pop", f))
                    pop_scheduled.add(f)

    # step 1: hang the axiom-rooted digraphs off the axiom
    for d in axiom_graphs:
        copy = insert(d, d.label)
        for s in copy.siblings:
            if (g.axiom, s) not in rg.edges:
                set_edge(g.axiom, s, "stable")
        for f in copy.finals:
            if _is_exit(cls, f):
                rg.finals.add(f)
            elif ("pop", f) not in events and f not in pop_scheduled:
                events.append(("pop", f))
                pop_scheduled.add(f)

    # step 2: work off dummy and pop vertices
    processed = 0
    while events:
        processed += 1
        if processed > max_events:
            pending = ", ".join(f"{kind}:{v}" for kind, v in itertools.islice(events, 10))
            raise RefinementError(
                f"refinement did not settle within {max_events} events; pending {pending}"
            )
        kind, v = events.popleft()
        if kind == "dummy":
            process_dummy(v)
        else:
            process_pop(v)

    leftovers = rg.dummy_vertices() | rg.pop_vertices()
    if leftovers:
        raise RefinementError(f"unconnected silent brackets remain: {sorted(map(str, leftovers))}")
    return rg


# ---------------------------------------------------------------------------
# the refined cover


def refined_cover(gx: ExtendedDyckGrammar, rg: RefinedGraph) -> rex.Regex:
    """Pair-expanded image of all initial-to-final path words of the refined
    graph (labels and marks drop out), plus extension pair words."""
    parts = []
    for f in sorted(rg.finals, key=lkey):
        r = rex.vertex_path_regex(rg.edge_set(), rg.initial, f, tie_key=lkey)
        if not isinstance(r, rex.Empty):
            parts.append(r)
    base = rex.normalize(rex.alt(*parts)) if parts else rex.EMPTY
    cls = rg.cls

    def img(s):
        if isinstance(s, LBracket):
            return pair_expansion(cls, s.bracket)
        return rex.EPSILON

    image = rex.map_symbols(base, img) if not isinstance(base, rex.Empty) else base
    extras = [
        rex.cat(rex.sym(Bracket.left(i)), rex.sym(Bracket.right(i)))
        for i, _ in gx.extra
    ]
    return rex.normalize(rex.alt(image, *extras))
