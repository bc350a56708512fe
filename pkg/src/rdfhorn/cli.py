"""Command-line front end.

Exit codes: ``entail`` 0 entailed / 1 not entailed, ``sat`` 0 satisfiable /
1 unsatisfiable, and 2 for usage errors, unsupported inputs and resource
limits. Payloads go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from pathlib import Path

from .datatypes import load_datatype_map, normalize, xsd_map
from .dllite import export_dllite
from .engine import Limits
from .entailment import Prepared, decide, theory_for
from .errors import RdfHornError, ResourceLimitError
from .ntriples import format_term, load_graph, serialize
from .reductions import (
    accessibility_oracle,
    coloring_from_spec,
    coloring_oracle,
    gen_k_coloring,
    gen_path_system,
    load_spec,
    path_system_from_spec,
)

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


def _global_flags(p: argparse.ArgumentParser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--max-facts", type=int, default=d, metavar="N", help="abort once the store holds N facts")
    p.add_argument("--timeout-ms", type=int, default=d, metavar="N", help="abort after N milliseconds")
    p.add_argument("--dump-theory", action="store_true", default=argparse.SUPPRESS if suppress else False,
                   help="print the Horn theory before evaluating it")
    p.add_argument("--stats", action="store_true", default=argparse.SUPPRESS if suppress else False,
                   help="print evaluation counters as JSON")
    p.add_argument("--seed", type=int, default=d, help="seed for the random instance generators")


def _regime_flags(p: argparse.ArgumentParser):
    p.add_argument("--regime", choices=["simple", "rdf", "rdfs", "erdfs"], default="rdfs")
    p.add_argument("--datatypes", choices=["none", "dstar", "d"], default="none")
    p.add_argument("--dtmap", metavar="FILE", help="datatype map (JSON); defaults to the built-in XSD map")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdfhorn", description="RDF entailment via Horn logic")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entail", parents=[common], help="decide S |= E")
    _regime_flags(p)
    p.add_argument("S")
    p.add_argument("E")

    p = sub.add_parser("sat", parents=[common], help="decide satisfiability of S")
    _regime_flags(p)
    p.add_argument("S")

    p = sub.add_parser("normalize", parents=[common], help="replace literals by canonical representatives")
    p.add_argument("--dtmap", metavar="FILE")
    p.add_argument("S")

    p = sub.add_parser("export-dllite", parents=[common], help="export S as a DL-Lite_R knowledge base")
    p.add_argument("S")

    p = sub.add_parser("gen-reduction", parents=[common], help="generate a hardness-reduction instance")
    p.add_argument("kind", choices=["path-system", "k-coloring"])
    p.add_argument("spec", metavar="SPEC.json")
    p.add_argument("--out", metavar="DIR", help="also write the instance files into DIR")
    return parser


def _limits(args) -> Limits:
    return Limits(max_facts=args.max_facts, timeout_ms=args.timeout_ms)


def _dtmap(args):
    if args.dtmap:
        return load_datatype_map(args.dtmap)
    return xsd_map() if args.datatypes != "none" else None


def _emit_stats(stats: dict, out):
    print("STATS: " + json.dumps(stats, sort_keys=True), file=out)


def _cmd_entail(args, out) -> int:
    S, E = load_graph(args.S), load_graph(args.E)
    D = _dtmap(args)
    if args.dump_theory:
        print(theory_for(S, args.regime, D, args.datatypes, E=E).to_text(), file=out)
    res = decide(S, E, args.regime, D, args.datatypes, _limits(args))
    print(res.verdict_line(), file=out)
    for b, t in (res.witness or {}).items():
        print(f"WITNESS: _:{b.id} -> {format_term(t)}", file=out)
    if args.stats:
        _emit_stats(res.stats, out)
    return EXIT_YES if res.entailed else EXIT_NO


def _cmd_sat(args, out) -> int:
    S = load_graph(args.S)
    D = _dtmap(args)
    if args.dump_theory:
        print(theory_for(S, args.regime, D, args.datatypes).to_text(), file=out)
    P = Prepared(S, args.regime, D, args.datatypes, _limits(args))
    print("SATISFIABLE" if P.satisfiable else "UNSATISFIABLE", file=out)
    if args.stats:
        _emit_stats(P.stats(), out)
    return EXIT_YES if P.satisfiable else EXIT_NO


def _cmd_normalize(args, out) -> int:
    D = load_datatype_map(args.dtmap) if args.dtmap else xsd_map()
    out.write(serialize(normalize(load_graph(args.S), D)))
    return EXIT_YES


def _cmd_export(args, out) -> int:
    out.write(export_dllite(load_graph(args.S)).to_text())
    return EXIT_YES


def _write(outdir, name: str, text: str):
    if outdir is not None:
        (outdir / name).write_text(text, encoding="utf-8")


def _cmd_gen(args, out) -> int:
    spec = load_spec(args.spec)
    outdir = None
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
    if args.kind == "path-system":
        X, Srcs, T, R = path_system_from_spec(spec, args.seed)
        red = gen_path_system(X, Srcs, T, R)
        acc = accessibility_oracle(X, Srcs, R)
        expected = {t: "ENTAILED" if t in acc else "NOT-ENTAILED" for t in T}
        any_expected = "ENTAILED" if acc & set(T) else "NOT-ENTAILED"
        print(f"# path system: {len(X)} nodes, {len(Srcs)} sources, {len(T)} terminals, {len(R)} tuples", file=out)
        out.write(serialize(red.graph))
        for t, q in red.queries.items():
            print(f"# query {serialize(q).strip()} expected {expected[t]}", file=out)
        print(f"# query {serialize(red.any_query).strip()} expected {any_expected}", file=out)
        _write(outdir, "S.nt", serialize(red.graph))
        _write(outdir, "E_any.nt", serialize(red.any_query))
        for i, (t, q) in enumerate(red.queries.items()):
            _write(outdir, f"E_{i}.nt", serialize(q))
        _write(outdir, "expected.json", json.dumps(
            {"regime": "rdfs", "any": any_expected, "accessible": sorted(acc),
             "queries": {f"E_{i}.nt": expected[t] for i, t in enumerate(red.queries)}}, indent=2) + "\n")
    else:
        V, E, k = coloring_from_spec(spec, args.seed)
        red = gen_k_coloring(V, E, k)
        col = coloring_oracle(V, E, k)
        expected = "NOT-ENTAILED" if col is not None else "ENTAILED"
        print(f"# {k}-coloring: {len(V)} nodes, {len(E)} edges, colorable={col is not None}", file=out)
        out.write(serialize(red.S))
        print(f"# query {serialize(red.H).strip()} expected {expected} (simple-D; map is not definite)", file=out)
        _write(outdir, "S.nt", serialize(red.S))
        _write(outdir, "H.nt", serialize(red.H))
        _write(outdir, "dtmap.json", json.dumps(red.dtmap, indent=2) + "\n")
        _write(outdir, "expected.json", json.dumps(
            {"regime": "simple", "datatypes": "d", "expected": expected, "coloring": col}, indent=2) + "\n")
    return EXIT_YES


_COMMANDS = {
    "entail": _cmd_entail,
    "sat": _cmd_sat,
    "normalize": _cmd_normalize,
    "export-dllite": _cmd_export,
    "gen-reduction": _cmd_gen,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code not in (0, None) else EXIT_YES
    try:
        return _COMMANDS[args.command](args, out)
    except ResourceLimitError as e:
        print(f"error: {e}", file=err)
        if args.stats:
            _emit_stats(e.stats, err)
        return EXIT_ERROR
    except RdfHornError as e:
        print(f"error: {e}", file=err)
        return EXIT_ERROR
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=err)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
