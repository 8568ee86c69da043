"""Graphviz export with the color conventions used throughout the figures:
initial vertices red, finals blue (green on refined graphs and automata),
core-segment vertices purple, mirror edges orange, glue edges green."""

from __future__ import annotations

from .approx import Nfa
from .depgraph import DependencyGraph, ExtendedGraph
from .grammar import symkey
from .refine import RefinedGraph, lkey


def _quote(x) -> str:
    return '"%s"' % str(x).replace('"', '\\"')


def _lines(name, nodes, edges) -> str:
    out = [f"digraph {name} {{", "  rankdir=LR;"]
    out.extend(f"  {n}" for n in nodes)
    out.extend(f"  {e}" for e in edges)
    out.append("}")
    return "\n".join(out) + "\n"


def dependency_graph_dot(dg: DependencyGraph) -> str:
    nodes = []
    for v in sorted(dg.vertices, key=symkey):
        attrs = []
        if v == dg.root:
            attrs.append("color=red, fontcolor=red")
        if v in dg.finals:
            attrs.append("color=blue, fontcolor=blue")
        nodes.append(f"{_quote(v)} [{', '.join(attrs)}];" if attrs else f"{_quote(v)};")
    edges = [
        f"{_quote(u)} -> {_quote(w)};"
        for u, w in sorted(dg.edges, key=lambda e: (symkey(e[0]), symkey(e[1])))
    ]
    return _lines("dependency", nodes, edges)


def extended_graph_dot(eg: ExtendedGraph) -> str:
    mirror = eg.mirror_edges()
    nodes = []
    for v in sorted(eg.vertices, key=symkey):
        attrs = []
        if v == eg.initial:
            attrs.append("color=red, fontcolor=red")
        if v in eg.finals:
            attrs.append("color=blue, fontcolor=blue")
        nodes.append(f"{_quote(v)} [{', '.join(attrs)}];" if attrs else f"{_quote(v)};")
    edges = []
    for (u, w), tag in sorted(eg.edges.items(), key=lambda e: (symkey(e[0][0]), symkey(e[0][1]))):
        attrs = [f'label="{tag}"']
        if (u, w) in mirror:
            attrs.append("color=orange")
        edges.append(f"{_quote(u)} -> {_quote(w)} [{', '.join(attrs)}];")
    return _lines("extended", nodes, edges)


def refined_graph_dot(rg: RefinedGraph) -> str:
    cores = rg.core_vertices()
    nodes = []
    for v in sorted(rg.vertices, key=lkey):
        attrs = []
        if v == rg.initial:
            attrs.append("color=red, fontcolor=red")
        if v in rg.finals:
            attrs.append("color=green, fontcolor=green")
        if v in cores:
            attrs.append("color=purple, fontcolor=purple")
        nodes.append(f"{_quote(v)} [{', '.join(attrs)}];" if attrs else f"{_quote(v)};")
    edges = []
    for (u, w), kind in sorted(rg.edges.items(), key=lambda e: (lkey(e[0][0]), lkey(e[0][1]))):
        attrs = []
        if kind == "glue":
            attrs.append("color=green")
        elif w in rg.mirror_vertices:
            attrs.append("color=orange")
        edges.append(
            f"{_quote(u)} -> {_quote(w)} [{', '.join(attrs)}];" if attrs else f"{_quote(u)} -> {_quote(w)};"
        )
    return _lines("refined", nodes, edges)


def automaton_dot(a: Nfa) -> str:
    prefinal = {src for (src, t, dst) in a.transitions if dst == a.accept and t is None}
    nodes = []
    for s in a.states:
        attrs = ["shape=circle"]
        if s == a.start:
            attrs.append("color=red, fontcolor=red")
        if s == a.accept:
            attrs = ["shape=doublecircle"]
        if s in prefinal:
            attrs.append("color=green, fontcolor=green")
        nodes.append(f"{_quote(s)} [{', '.join(attrs)}];")
    edges = []
    for src, t, dst in sorted(a.transitions, key=lambda tr: (str(tr[0]), str(tr[1] or ""), str(tr[2]))):
        label = t if t is not None else "λ"
        edges.append(f'{_quote(src)} -> {_quote(dst)} [label="{label}"];')
    return _lines("automaton", nodes, edges)


def export_dot(obj) -> str:
    if isinstance(obj, DependencyGraph):
        return dependency_graph_dot(obj)
    if isinstance(obj, ExtendedGraph):
        return extended_graph_dot(obj)
    if isinstance(obj, RefinedGraph):
        return refined_graph_dot(obj)
    if isinstance(obj, Nfa):
        return automaton_dot(obj)
    raise TypeError(f"no DOT export for {type(obj).__name__}")
