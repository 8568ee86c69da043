"""Grammar toolkit around the pairwise-bracket normal form.

Converts context-free grammars to Dyck normal form, reads trace words off
leftmost derivations, builds the dependency-graph machinery that yields the
regular cover of the trace language and its plus-form refinement, and emits a
regular grammar that over-approximates the original language.  Everything is
verified at desk scale by bounded enumeration.
"""

from .grammar import (
    Bracket,
    Cfg,
    CnfGrammar,
    ConversionError,
    Derivation,
    DyckGrammar,
    Emission,
    ExtendedDyckGrammar,
    GrammarError,
    PairClasses,
    ParseError,
    Production,
    RenamingMap,
    Step,
    apply_phi,
    classify_pairs,
    dyck_grammar_from_cfg,
    extend_grammar,
    grammar_text,
    parse_grammar,
    rename_derivation,
    replay,
    to_cnf,
    to_dyck_nf,
)
from .dyck import (
    TraceWord,
    dyck_membership,
    enumerate_trace_language,
    is_balanced,
    iter_leftmost_derivations,
    pair_classify,
    stack_dyck_check,
    trace_word,
)
from .depgraph import (
    DependencyGraph,
    ExtendedGraph,
    build_dependency_graph,
    build_extended_graph,
    extract_left_regexes,
    mirror_extend,
    regular_cover,
)
from .refine import (
    LabeledDigraph,
    LBracket,
    RefinedGraph,
    RefinementError,
    build_refined_graph,
    label_and_digraph,
    plus_expand,
    refined_cover,
)
from .approx import (
    Nfa,
    RegularGrammar,
    build_automaton,
    enumerate_regular,
    to_regular_grammar,
)
from .oracle import (
    VerificationReport,
    cyk_membership,
    enumerate_language,
    verify_cs,
    verify_superset,
)
from .pipeline import Pipeline, run_pipeline

__version__ = "0.1.0"
