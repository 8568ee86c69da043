"""End-to-end pipeline: grammar text to regular superset approximation.

Bundles the stage outputs so the command-line front end and the verification
suites can share one code path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import approx, depgraph, grammar, refine, rex
from .grammar import Bracket, Cfg, DyckGrammar


@dataclass
class Pipeline:
    cfg: Cfg | None
    cnf: grammar.CnfGrammar | None
    cnf_report: grammar.CnfReport | None
    dyck: DyckGrammar
    renaming: grammar.RenamingMap | None
    cls: grammar.PairClasses
    extended: grammar.ExtendedDyckGrammar
    dep_graphs: dict = field(default_factory=dict)
    left_regexes: dict = field(default_factory=dict)
    mirrored: dict = field(default_factory=dict)
    ext_graph: depgraph.ExtendedGraph | None = None
    cover: rex.Regex | None = None
    plus_sets: dict = field(default_factory=dict)
    digraphs: list = field(default_factory=list)
    refined: refine.RefinedGraph | None = None
    refined_cover_rx: rex.Regex | None = None
    automaton: approx.Nfa | None = None
    regular: approx.RegularGrammar | None = None


def dyck_of(source) -> tuple:
    """Normalize any accepted input into a Dyck-normal grammar.

    Returns (cfg, cnf, report, dyck, renaming); the first three are None when
    the input already is a Dyck grammar (or a bracket grammar file)."""
    if isinstance(source, DyckGrammar):
        return None, None, None, source, None
    if isinstance(source, str):
        source = grammar.parse_grammar(source)
    if any(isinstance(s, Bracket) for s in source.nonterminals):
        return source, None, None, grammar.dyck_grammar_from_cfg(source), None
    cnf, report = grammar.to_cnf(source)
    dg, renaming = grammar.to_dyck_nf(cnf)
    return source, cnf, report, dg, renaming


def run_pipeline(
    source,
    relabel_pops_always: bool = False,
    max_events: int | None = None,
    covers: bool = True,
) -> Pipeline:
    """Run every stage; with ``covers=False`` the cover expressions (used by
    the representation checks, not by the approximation) are skipped."""
    cfg, cnf, report, dg, renaming = dyck_of(source)
    cls = grammar.classify_pairs(dg)
    gx = grammar.extend_grammar(dg)
    p = Pipeline(cfg, cnf, report, dg, renaming, cls, gx)

    roots = [dg.axiom] + [Bracket.right(i) for i in sorted(cls.silent)]
    total_classes = 0
    for root in roots:
        dgph = depgraph.build_dependency_graph(dg, cls, root)
        p.dep_graphs[root] = dgph
        lefts = depgraph.extract_left_regexes(dgph)
        total_classes += len(lefts)
        if total_classes > 128:
            raise rex.BudgetError("more than 128 path classes across all roots")
        p.left_regexes[root] = lefts
        p.mirrored[root] = [depgraph.mirror_extend(r, cls) for r in lefts]
    p.ext_graph = depgraph.build_extended_graph(dg, cls, p.mirrored)
    if covers:
        p.cover = depgraph.regular_cover(gx, p.ext_graph)

    for root in roots:
        expanded = []
        for r in p.left_regexes[root]:
            expanded.extend(refine.plus_expand(r))
        p.plus_sets[root] = [depgraph.mirror_extend(r, cls) for r in expanded]
        p.plus_sets[root].sort(key=lambda r: (-rex.min_word_len(r), rex.sort_key(r)))
    p.digraphs = refine.label_and_digraph(p.plus_sets, cls)
    p.refined = refine.build_refined_graph(
        dg, cls, p.digraphs, relabel_pops_always=relabel_pops_always, max_events=max_events
    )
    if covers:
        p.refined_cover_rx = refine.refined_cover(gx, p.refined)

    p.automaton = approx.build_automaton(dg, cls, p.refined)
    p.regular = approx.to_regular_grammar(p.automaton)
    return p
