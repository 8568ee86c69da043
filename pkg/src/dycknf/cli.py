"""Command-line front end.

Subcommands: convert (normal forms), trace (trace words of a given word),
graph (DOT export of the dependency / extended / refined graphs), approx
(regular superset approximation), verify (cs / superset / dycknf suites).
Exit codes: 0 success, 1 verification failure, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import approx, depgraph, dot, grammar, oracle, rex
from .dyck import iter_leftmost_derivations, trace_word
from .grammar import Bracket, GrammarError
from .pipeline import dyck_of, run_pipeline
from .refine import RefinementError

USAGE_ERROR = 2
VERIFY_ERROR = 1


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise SystemExit(_fail(f"cannot read {path}: {e}"))


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return USAGE_ERROR


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise SystemExit(_fail(f"cannot write {path}: {e}"))


def cmd_convert(args) -> int:
    text = _read(args.file)
    try:
        if args.to == "cnf":
            g = grammar.parse_grammar(text)
            cnf, report = grammar.to_cnf(g)
            print(f"# {report}")
            sys.stdout.write(grammar.grammar_text(cnf))
        else:
            cfg, cnf, _report, dg, renaming = dyck_of(text)
            sys.stdout.write(grammar.grammar_text(dg))
            if renaming is not None:
                for sym in sorted(renaming.mapping, key=grammar.symkey):
                    print(f"# {sym} renames {renaming.mapping[sym]}")
    except GrammarError as e:
        return _fail(str(e))
    return 0


def cmd_trace(args) -> int:
    text = _read(args.file)
    try:
        _cfg, _cnf, _rep, dg, _m = dyck_of(text)
    except GrammarError as e:
        return _fail(str(e))
    word = tuple(args.word)
    traces = set()
    for w, d in iter_leftmost_derivations(dg, len(word)):
        if w == word and len(d.steps) >= 2:
            traces.add(trace_word(dg, d).brackets)
    for t in sorted(traces, key=lambda t: tuple(grammar.symkey(b) for b in t)):
        print(" ".join(str(b) for b in t))
    return 0


def cmd_graph(args) -> int:
    text = _read(args.file)
    try:
        p = run_pipeline(text)
        if args.kind == "dep":
            root = p.dyck.axiom
            if args.root not in (None, "S", p.dyck.axiom):
                tok = args.root.strip()
                if not tok.startswith("]"):
                    return _fail("--root must be S or a right bracket like ']3'")
                root = Bracket.right(int(tok[1:]))
            obj = p.dep_graphs.get(root) or depgraph.build_dependency_graph(p.dyck, p.cls, root)
        elif args.kind == "ext":
            obj = p.ext_graph
        else:
            obj = p.refined
    except (GrammarError, depgraph.GraphError, RefinementError, ValueError) as e:
        return _fail(str(e))
    _write(args.dot, dot.export_dot(obj))
    return 0


def cmd_approx(args) -> int:
    text = _read(args.file)
    try:
        p = run_pipeline(text)
    except (GrammarError, RefinementError, ValueError) as e:
        return _fail(str(e))
    _write(args.out, approx.regular_grammar_text(p.regular))
    if args.dot:
        _write(args.dot, dot.export_dot(p.automaton))
    if args.table:
        _write(args.table, json.dumps(approx.transition_table(p.automaton), indent=2) + "\n")
    return 0


def cmd_verify(args) -> int:
    text = _read(args.file)
    try:
        p = run_pipeline(text)
    except (GrammarError, RefinementError, ValueError) as e:
        return _fail(str(e))
    reports = []
    if args.suite == "cs":
        reports.append(oracle.verify_cs(p.extended, p.cover, args.max_len))
        reports.append(oracle.verify_cs(p.extended, p.refined_cover_rx, args.max_len))
    elif args.suite == "superset":
        reports.append(oracle.verify_superset(p.dyck, p.regular, args.max_len))
    else:  # dycknf
        original = p.cfg if p.cfg is not None else p.dyck
        reports.append(oracle.verify_dyck_nf(p.dyck, original, args.max_len))
        if p.renaming is not None and p.cnf is not None:
            rng = random.Random(args.seed)
            bad = 0
            derivs = list(iter_leftmost_derivations(p.dyck, 8))
            rng.shuffle(derivs)
            for _w, d in derivs[:50]:
                mapped = grammar.rename_derivation(p.renaming, d)
                try:
                    grammar.replay(p.cnf, mapped)
                except GrammarError:
                    bad += 1
            rep = oracle.VerificationReport("dycknf-renaming", 8, "holds" if bad == 0 else "fails")
            rep.diff_size = bad
            reports.append(rep)
    ok = True
    for r in reports:
        print(r.text())
        ok = ok and r.holds
    return 0 if ok else VERIFY_ERROR


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dycknf", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("convert", help="convert a grammar to a normal form")
    c.add_argument("--to", choices=["cnf", "dnf"], required=True)
    c.add_argument("file")
    c.set_defaults(func=cmd_convert)

    t = sub.add_parser("trace", help="print the trace words of a given word")
    t.add_argument("--word", required=True, help="terminal word, one character per terminal")
    t.add_argument("file")
    t.set_defaults(func=cmd_trace)

    gph = sub.add_parser("graph", help="export a construction graph as DOT")
    gph.add_argument("--kind", choices=["dep", "ext", "refined"], required=True)
    gph.add_argument("--root", help="root for --kind dep: S or a right bracket like ']3'")
    gph.add_argument("--dot", help="output path (default stdout)")
    gph.add_argument("file")
    gph.set_defaults(func=cmd_graph)

    ax = sub.add_parser("approx", help="emit the regular superset approximation")
    ax.add_argument("-o", "--out", help="regular grammar output path (default stdout)")
    ax.add_argument("--dot", help="also write the transition diagram as DOT")
    ax.add_argument("--table", help="also write the transition table as JSON")
    ax.add_argument("file")
    ax.set_defaults(func=cmd_approx)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=["cs", "superset", "dycknf"])
    v.add_argument("--max-len", type=int, default=8)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("file")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return USAGE_ERROR if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
