"""Small regular-expression engine over arbitrary hashable symbols.

Expressions are immutable trees built from symbols, concatenation, union and
the two Kleene closures.  The rest of the toolkit leans on this module for
normalization, mirroring, homomorphic images, position (Glushkov) automata
and bounded word enumeration.

Normalization does more than flattening: it rewrites loop patterns into the
compact closure forms used throughout the graph constructions, namely

* ``b b* -> b+`` (and the mirrored ``b* b -> b+``, for multi-factor bodies),
* the rotation ``f (g f)* -> (f g)* f``, which pushes stars leftwards so the
  plus rule above can fire,
* the suffix identity ``p a (a | p a)* -> (p a+)+``, which restores loop
  nesting lost when a graph's final vertex carries several self-loops.

All three are language-preserving.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Iterator

Symbol = Hashable


class BudgetError(ValueError):
    """A construction outgrew its work budget (pathological input)."""


class Regex:
    """Base class of all regex nodes.

    Nodes are immutable and hash-consed: structurally equal expressions are
    the same object, so equality and hashing are identity checks no matter
    how large the tree is."""

    __slots__ = ()


_NODES: dict = {}


def _intern(cls, key, **fields):
    inst = _NODES.get(key)
    if inst is None:
        inst = object.__new__(cls)
        for name, value in fields.items():
            object.__setattr__(inst, name, value)
        _NODES[key] = inst
    return inst


class Empty(Regex):
    """The empty language."""

    __slots__ = ()

    def __new__(cls):
        return _intern(cls, (0,))

    def __repr__(self):
        return "EMPTY"


class Epsilon(Regex):
    """The language containing only the empty word."""

    __slots__ = ()

    def __new__(cls):
        return _intern(cls, (1,))

    def __repr__(self):
        return "EPSILON"


class Sym(Regex):
    __slots__ = ("symbol",)

    def __new__(cls, symbol):
        return _intern(cls, (2, symbol), symbol=symbol)

    def __repr__(self):
        return f"Sym({self.symbol})"


class Cat(Regex):
    __slots__ = ("parts",)

    def __new__(cls, parts):
        parts = tuple(parts)
        return _intern(cls, (3, parts), parts=parts)

    def __repr__(self):
        return "Cat(%s)" % ", ".join(map(repr, self.parts))


class Alt(Regex):
    __slots__ = ("options",)

    def __new__(cls, options):
        options = tuple(options)
        return _intern(cls, (4, options), options=options)

    def __repr__(self):
        return "Alt(%s)" % ", ".join(map(repr, self.options))


class Star(Regex):
    __slots__ = ("body",)

    def __new__(cls, body):
        return _intern(cls, (5, body), body=body)

    def __repr__(self):
        return f"Star({self.body!r})"


class Plus(Regex):
    __slots__ = ("body",)

    def __new__(cls, body):
        return _intern(cls, (6, body), body=body)

    def __repr__(self):
        return f"Plus({self.body!r})"


EMPTY = Empty()
EPSILON = Epsilon()


def sym(s: Symbol) -> Sym:
    return Sym(s)


def cat(*parts: Regex) -> Regex:
    """Concatenation with flattening and unit/zero absorption."""
    flat: list[Regex] = []
    for p in parts:
        if isinstance(p, Empty):
            return EMPTY
        if isinstance(p, Epsilon):
            continue
        if isinstance(p, Cat):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return EPSILON
    if len(flat) == 1:
        return flat[0]
    return Cat(tuple(flat))


def alt(*options: Regex) -> Regex:
    """Union with flattening, EMPTY absorption and duplicate removal."""
    flat: list[Regex] = []
    for o in options:
        if isinstance(o, Empty):
            continue
        if isinstance(o, Alt):
            flat.extend(o.options)
        else:
            flat.append(o)
    seen: list[Regex] = []
    for o in flat:
        if o not in seen:
            seen.append(o)
    if not seen:
        return EMPTY
    if len(seen) == 1:
        return seen[0]
    return Alt(tuple(seen))


def star(body: Regex) -> Regex:
    if isinstance(body, (Empty, Epsilon)):
        return EPSILON
    if isinstance(body, (Star, Plus)):
        return Star(body.body)
    return Star(body)


def plus(body: Regex) -> Regex:
    if isinstance(body, Empty):
        return EMPTY
    if isinstance(body, Epsilon):
        return EPSILON
    if isinstance(body, Plus):
        return body
    if isinstance(body, Star):
        return Star(body.body)
    return Plus(body)


# ---------------------------------------------------------------------------
# canonical ordering


def _symkey(s: Symbol) -> tuple:
    return (type(s).__name__, str(s))


_SKEYS: dict = {}  # id(node) -> key; sound because nodes are interned forever


def sort_key(r: Regex) -> tuple:
    k = _SKEYS.get(id(r))
    if k is not None:
        return k
    if isinstance(r, Empty):
        k = (0,)
    elif isinstance(r, Epsilon):
        k = (1,)
    elif isinstance(r, Sym):
        k = (2, _symkey(r.symbol))
    elif isinstance(r, Plus):
        k = (3, sort_key(r.body))
    elif isinstance(r, Star):
        k = (4, sort_key(r.body))
    elif isinstance(r, Cat):
        k = (5,) + tuple(sort_key(p) for p in r.parts)
    elif isinstance(r, Alt):
        k = (6,) + tuple(sort_key(o) for o in r.options)
    else:
        raise TypeError(r)
    _SKEYS[id(r)] = k
    return k


# ---------------------------------------------------------------------------
# normalization


def _factors(r: Regex) -> tuple:
    return r.parts if isinstance(r, Cat) else (r,)


def _rewrite_catlist(parts: list[Regex]) -> list[Regex] | None:
    """One rewrite step on a concatenation; None when nothing applies."""
    n = len(parts)
    # b* adjacent to a full copy of its factor sequence -> b+
    for i, p in enumerate(parts):
        if not isinstance(p, Star):
            continue
        bseq = _factors(p.body)
        m = len(bseq)
        if tuple(parts[i + 1 : i + 1 + m]) == bseq:
            return parts[:i] + [plus(p.body)] + parts[i + 1 + m :]
        if i >= m and tuple(parts[i - m : i]) == bseq:
            return parts[: i - m] + [plus(p.body)] + parts[i + 1 :]
    # rotation f (g f)* -> (f g)* f
    for i in range(n - 1):
        nxt = parts[i + 1]
        if isinstance(nxt, Star):
            bseq = _factors(nxt.body)
            if bseq and bseq[-1] == parts[i]:
                rotated = star(cat(parts[i], *bseq[:-1]))
                return parts[:i] + [rotated, parts[i]] + parts[i + 2 :]
    # suffix loops: p a (a | p a)* -> (p a+)+
    for i, p in enumerate(parts):
        if not (isinstance(p, Star) and isinstance(p.body, Alt) and len(p.body.options) == 2):
            continue
        for a, c in (p.body.options, p.body.options[::-1]):
            aseq, cseq = _factors(a), _factors(c)
            if len(cseq) <= len(aseq) or cseq[-len(aseq) :] != aseq:
                continue
            pseq = cseq[: -len(aseq)]
            full = pseq + aseq
            if i >= len(full) and tuple(parts[i - len(full) : i]) == full:
                repl = plus(cat(cat(*pseq), plus(cat(*aseq))))
                return parts[: i - len(full)] + [repl] + parts[i + 1 :]
    return None


def _norm(r: Regex) -> Regex:
    if isinstance(r, (Empty, Epsilon, Sym)):
        return r
    if isinstance(r, Star):
        return star(_norm(r.body))
    if isinstance(r, Plus):
        return plus(_norm(r.body))
    if isinstance(r, Alt):
        opts = sorted({_norm(o) for o in r.options}, key=sort_key)
        return alt(*opts)
    if isinstance(r, Cat):
        parts = list(_factors(cat(*[_norm(p) for p in r.parts])))
        if len(parts) < 2:
            return cat(*parts)
        while True:
            out = _rewrite_catlist(parts)
            if out is None:
                break
            parts = list(_factors(cat(*out)))
        return cat(*parts)
    raise TypeError(r)


def normalize(r: Regex) -> Regex:
    cur = _norm(r)
    for _ in range(100):
        nxt = _norm(cur)
        if nxt == cur:
            return cur
        cur = nxt
    raise RuntimeError("regex normalization did not reach a fixpoint")


# ---------------------------------------------------------------------------
# structural queries


def symbols(r: Regex) -> set:
    if isinstance(r, Sym):
        return {r.symbol}
    if isinstance(r, (Star, Plus)):
        return symbols(r.body)
    if isinstance(r, Cat):
        return set().union(*[symbols(p) for p in r.parts]) if r.parts else set()
    if isinstance(r, Alt):
        return set().union(*[symbols(o) for o in r.options]) if r.options else set()
    return set()


def closure_height(r: Regex, kinds: tuple = (Star, Plus)) -> int:
    """Nesting depth of closure operators (star-height / plus-height)."""
    if isinstance(r, kinds):
        return 1 + closure_height(r.body, kinds)
    if isinstance(r, (Star, Plus)):
        return closure_height(r.body, kinds)
    if isinstance(r, Cat):
        return max((closure_height(p, kinds) for p in r.parts), default=0)
    if isinstance(r, Alt):
        return max((closure_height(o, kinds) for o in r.options), default=0)
    return 0


def star_height(r: Regex) -> int:
    return closure_height(r, (Star,))


def plus_height(r: Regex) -> int:
    return closure_height(r, (Plus,))


def node_count(r: Regex) -> int:
    if isinstance(r, (Empty, Epsilon, Sym)):
        return 1
    if isinstance(r, (Star, Plus)):
        return 1 + node_count(r.body)
    if isinstance(r, Cat):
        return 1 + sum(node_count(p) for p in r.parts)
    if isinstance(r, Alt):
        return 1 + sum(node_count(o) for o in r.options)
    raise TypeError(r)


def min_word_len(r: Regex) -> float:
    """Length of the shortest word, inf for the empty language."""
    if isinstance(r, Empty):
        return float("inf")
    if isinstance(r, Epsilon):
        return 0
    if isinstance(r, Sym):
        return 1
    if isinstance(r, Star):
        return 0
    if isinstance(r, Plus):
        return min_word_len(r.body)
    if isinstance(r, Cat):
        return sum(min_word_len(p) for p in r.parts)
    if isinstance(r, Alt):
        return min((min_word_len(o) for o in r.options), default=float("inf"))
    raise TypeError(r)


def reverse(r: Regex) -> Regex:
    if isinstance(r, (Empty, Epsilon, Sym)):
        return r
    if isinstance(r, Star):
        return star(reverse(r.body))
    if isinstance(r, Plus):
        return plus(reverse(r.body))
    if isinstance(r, Cat):
        return cat(*[reverse(p) for p in reversed(r.parts)])
    if isinstance(r, Alt):
        return alt(*[reverse(o) for o in r.options])
    raise TypeError(r)


def map_symbols(r: Regex, image: Callable[[Symbol], Regex]) -> Regex:
    """Homomorphic image: replace every symbol by ``image(symbol)``."""
    if isinstance(r, (Empty, Epsilon)):
        return r
    if isinstance(r, Sym):
        return image(r.symbol)
    if isinstance(r, Star):
        return star(map_symbols(r.body, image))
    if isinstance(r, Plus):
        return plus(map_symbols(r.body, image))
    if isinstance(r, Cat):
        return cat(*[map_symbols(p, image) for p in r.parts])
    if isinstance(r, Alt):
        return alt(*[map_symbols(o, image) for o in r.options])
    raise TypeError(r)


# ---------------------------------------------------------------------------
# position automaton (Glushkov construction)


@dataclass
class PositionAutomaton:
    positions: list  # position index -> symbol
    firsts: frozenset
    lasts: frozenset
    follow: dict  # position -> frozenset of positions
    nullable: bool

    def follow_pairs(self) -> set[tuple[Symbol, Symbol]]:
        out = set()
        for p, qs in self.follow.items():
            for q in qs:
                out.add((self.positions[p], self.positions[q]))
        return out

    def first_symbols(self) -> set:
        return {self.positions[p] for p in self.firsts}

    def last_symbols(self) -> set:
        return {self.positions[p] for p in self.lasts}


def glushkov(r: Regex) -> PositionAutomaton:
    positions: list = []
    follow: dict[int, set[int]] = {}

    def go(node: Regex) -> tuple[bool, frozenset, frozenset]:
        if isinstance(node, Empty):
            raise ValueError("EMPTY inside a regex; normalize first")
        if isinstance(node, Epsilon):
            return True, frozenset(), frozenset()
        if isinstance(node, Sym):
            p = len(positions)
            positions.append(node.symbol)
            follow[p] = set()
            return False, frozenset([p]), frozenset([p])
        if isinstance(node, (Star, Plus)):
            bn, fs, ls = go(node.body)
            for l in ls:
                follow[l] |= fs
            return (True if isinstance(node, Star) else bn), fs, ls
        if isinstance(node, Cat):
            nullable = True
            firsts: frozenset = frozenset()
            lasts: frozenset = frozenset()
            for part in node.parts:
                pn, pf, pl = go(part)
                for l in lasts:
                    follow[l] |= pf
                if nullable:
                    firsts |= pf
                lasts = pl | (lasts if pn else frozenset())
                nullable = nullable and pn
            return nullable, firsts, lasts
        if isinstance(node, Alt):
            nullable = False
            firsts: frozenset = frozenset()
            lasts: frozenset = frozenset()
            for o in node.options:
                on, of, ol = go(o)
                nullable = nullable or on
                firsts |= of
                lasts |= ol
            return nullable, firsts, lasts
        raise TypeError(node)

    r = normalize(r)
    if isinstance(r, Empty):
        return PositionAutomaton([], frozenset(), frozenset(), {}, False)
    nullable, firsts, lasts = go(r)
    return PositionAutomaton(
        positions, frozenset(firsts), frozenset(lasts), {p: frozenset(q) for p, q in follow.items()}, nullable
    )


def enumerate_words(r: Regex, max_len: int, max_words: int | None = None) -> set[tuple]:
    """All words of the regex of length <= max_len, as symbol tuples."""
    pa = glushkov(r)
    out: set[tuple] = set()
    if pa.nullable:
        out.add(())
    frontier: dict[tuple, frozenset] = {}
    for p in pa.firsts:
        w = (pa.positions[p],)
        frontier[w] = frontier.get(w, frozenset()) | {p}
    while frontier:
        nxt: dict[tuple, frozenset] = {}
        for w, ps in frontier.items():
            if len(w) > max_len:
                continue
            if any(p in pa.lasts for p in ps):
                out.add(w)
            if len(w) == max_len:
                continue
            for p in ps:
                for q in pa.follow[p]:
                    w2 = w + (pa.positions[q],)
                    nxt[w2] = nxt.get(w2, frozenset()) | {q}
        if max_words is not None and len(nxt) + len(out) > max_words:
            raise BudgetError(f"regex enumeration exceeded {max_words} words")
        frontier = nxt
    return out


# ---------------------------------------------------------------------------
# graph-to-regex extraction


def vertex_path_regex(edges: Iterable[tuple], root, final, tie_key=None, max_nodes: int = 500_000) -> Regex:
    """Regex of all root-to-final paths in a vertex-labeled digraph.

    The word of a path is its vertex sequence, root included.  Interior
    vertices are eliminated farthest-from-root first, which together with the
    normalization rules keeps loop nesting intact.
    """
    if tie_key is None:
        tie_key = _symkey
    edges = set(edges)
    succ: dict = {}
    pred: dict = {}
    for u, v in edges:
        succ.setdefault(u, set()).add(v)
        pred.setdefault(v, set()).add(u)
    # reachability pruning
    fwd = {root}
    stack = [root]
    while stack:
        u = stack.pop()
        for v in succ.get(u, ()):
            if v not in fwd:
                fwd.add(v)
                stack.append(v)
    if final not in fwd:
        return EMPTY
    bwd = {final}
    stack = [final]
    while stack:
        v = stack.pop()
        for u in pred.get(v, ()):
            if u not in bwd:
                bwd.add(u)
                stack.append(u)
    keep = fwd & bwd
    # BFS depth from root
    depth = {root: 0}
    frontier = [root]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for u in frontier:
            for v in succ.get(u, ()):
                if v in keep and v not in depth:
                    depth[v] = d
                    nxt.append(v)
        frontier = nxt

    lab: dict[tuple, Regex] = {}
    size: dict[tuple, int] = {}
    for u, v in edges:
        if u in keep and v in keep:
            prev = lab.get((u, v), EMPTY)
            lab[(u, v)] = alt(prev, Sym(v))
            size[(u, v)] = size.get((u, v), 0) + 1
    order = sorted(
        (v for v in keep if v not in (root, final)),
        key=lambda v: (-depth[v], tie_key(v)),
    )
    for v in order:
        if sum(size.values()) > max_nodes:
            raise BudgetError(f"state elimination exceeded {max_nodes} regex nodes")
        self_loop = lab.pop((v, v), None)
        loop_size = size.pop((v, v), 0)
        loop = star(self_loop) if self_loop is not None else EPSILON
        ins = sorted(((u, r) for (u, w), r in lab.items() if w == v), key=lambda t: tie_key(t[0]))
        outs = sorted(((w, r) for (u, w), r in lab.items() if u == v), key=lambda t: tie_key(t[0]))
        in_sizes = {u: size.pop((u, v)) for (u, _r) in ins}
        out_sizes = {w: size.pop((v, w)) for (w, _r) in outs}
        for (u, _r) in ins:
            del lab[(u, v)]
        for (w, _r) in outs:
            del lab[(v, w)]
        for u, rin in ins:
            for w, rout in outs:
                piece = cat(rin, loop, rout)
                lab[(u, w)] = alt(lab.get((u, w), EMPTY), piece)
                size[(u, w)] = size.get((u, w), 0) + in_sizes[u] + loop_size + out_sizes[w] + 2
    main = lab.get((root, final), EMPTY)
    if isinstance(main, Empty):
        return EMPTY
    if sum(size.values()) > max_nodes:
        raise BudgetError(f"state elimination exceeded {max_nodes} regex nodes")
    tail = lab.get((final, final))
    result = cat(Sym(root), main, star(tail) if tail is not None else EPSILON)
    return normalize(result)


def distribute_top(r: Regex, max_branches: int = 4096) -> list[Regex]:
    """Split top-level unions (also inside top-level concatenations)."""
    r = normalize(r)
    if isinstance(r, Empty):
        return []
    if isinstance(r, Alt):
        out = []
        for o in r.options:
            out.extend(distribute_top(o, max_branches))
            if len(out) > max_branches:
                raise BudgetError(f"path classes exceeded {max_branches}")
        return out
    if isinstance(r, Cat):
        pools = [distribute_top(p, max_branches) if isinstance(p, (Alt, Cat)) else [p] for p in r.parts]
        n = 1
        for pool in pools:
            n *= max(1, len(pool))
        if n > max_branches:
            raise BudgetError(f"path classes exceeded {max_branches}")
        return [normalize(cat(*combo)) for combo in itertools.product(*pools)]
    return [r]


# ---------------------------------------------------------------------------
# printing


def pretty(r: Regex) -> str:
    if isinstance(r, Empty):
        return "∅"
    if isinstance(r, Epsilon):
        return "λ"
    if isinstance(r, Sym):
        return str(r.symbol)
    if isinstance(r, Star):
        return f"({pretty(r.body)})*"
    if isinstance(r, Plus):
        return f"({pretty(r.body)})+"
    if isinstance(r, Cat):
        return "".join(pretty(p) for p in r.parts)
    if isinstance(r, Alt):
        return "(" + "|".join(pretty(o) for o in r.options) + ")"
    raise TypeError(r)
