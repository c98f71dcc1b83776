"""Command line: ``cliquewidth {cwd,encode,verify,survey,sweep,catalog,table}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .catalog import catalog_entries, catalog_entry
from .derivation import InvariantError
from .encoder import ENCODINGS, REPRESENTATIVE, emit_dimacs, encode
from .graph import Graph, GraphError, generate_named, parse_edge_list, parse_graph6
from .search import STRATEGIES, Certificate, SearchOptions, clique_width, verify_certificate
from .solvers import SolverConfig, SolverError

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2

log = logging.getLogger("cliquewidth")


def read_graph_file(path: str, fmt: str = "auto") -> Graph:
    text = Path(path).read_text()
    name = Path(path).stem
    if fmt == "auto":
        first = next((ln.strip() for ln in text.splitlines() if ln.strip()), "")
        looks_g6 = path.endswith(".g6") or (
            first != "" and " " not in first and all(63 <= ord(c) <= 126 for c in first))
        fmt = "graph6" if looks_g6 else "edgelist"
    if fmt == "graph6":
        first = next(ln.strip() for ln in text.splitlines() if ln.strip())
        return parse_graph6(first, name=name)
    return parse_edge_list(text, name=name)


def load_graph(args) -> Graph:
    if args.graph:
        return read_graph_file(args.graph, args.format)
    return generate_named(args.named, *args.param)


def _add_graph_args(p, required=True):
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--graph", metavar="PATH", help="edge list or graph6 file")
    src.add_argument("--named", metavar="NAME", help="generator or catalog name")
    p.add_argument("--param", type=int, nargs="*", default=[], help="generator parameters")
    p.add_argument("--format", choices=["auto", "edgelist", "graph6"], default="auto")


def _add_search_args(p):
    p.add_argument("--encoding", choices=ENCODINGS, default=REPRESENTATIVE)
    p.add_argument("--strategy", choices=STRATEGIES, default="down")
    p.add_argument("--solver", metavar="CMD",
                   help="python-sat solver name or 'embedded'; anything else runs as an external "
                        "command with optional {cnf} placeholder (default: $CWD_SAT_SOLVER)")
    p.add_argument("--timeout", type=float, default=None, help="seconds per solver call")
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--no-reductions", action="store_true")


def search_options(args) -> SearchOptions:
    solver = SolverConfig.parse(args.solver, args.timeout) if args.solver else \
        SolverConfig.from_env(args.timeout)
    return SearchOptions(encoding=args.encoding, strategy=args.strategy, timeout=args.timeout,
                         parallel=args.parallel, reductions=not args.no_reductions, solver=solver)


def cmd_cwd(args) -> int:
    g = load_graph(args)
    cert = clique_width(g, search_options(args))
    label = g.name or "graph"
    if cert.exact:
        print(f"{label}: cwd = {cert.cwd}")
    else:
        print(f"{label}: cwd in [{cert.lower}, {cert.upper}] (inconclusive)")
    print(f"expression: {cert.expression}")
    if args.certificate:
        Path(args.certificate).write_text(cert.to_json())
        print(f"certificate written to {args.certificate}")
        if args.verify:
            rep = verify_certificate(Certificate.from_json(Path(args.certificate).read_text()), g)
            _print_report(rep)
            if not rep.ok:
                return EXIT_ERROR
    elif args.verify:
        rep = verify_certificate(Certificate.from_json(cert.to_json()), g)
        _print_report(rep)
        if not rep.ok:
            return EXIT_ERROR
    return EXIT_OK if cert.exact else EXIT_INCONCLUSIVE


def cmd_encode(args) -> int:
    g = load_graph(args)
    inst = encode(g, args.k, args.t, args.encoding)
    text = emit_dimacs(inst)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    counts = ", ".join(f"{k}={v}" for k, v in inst.family_counts().items())
    print(f"{inst.num_vars} variables, {inst.num_clauses} clauses ({counts})",
          file=sys.stderr if not args.output else sys.stdout)
    return EXIT_OK


def _print_report(rep):
    for name, ok, detail in rep.checks:
        print(f"  {'ok  ' if ok else 'FAIL'} {name}" + ("" if ok else f": {detail}"))
    print("verification " + ("passed" if rep.ok else "FAILED"))


def cmd_verify(args) -> int:
    cert = Certificate.from_json(Path(args.certificate).read_text())
    g = read_graph_file(args.graph, args.format) if args.graph else None
    resolve = None
    if args.resolve:
        resolve = SolverConfig.parse(args.solver) if args.solver else SolverConfig.from_env()
    rep = verify_certificate(cert, g, resolve)
    _print_report(rep)
    return EXIT_OK if rep.ok else EXIT_ERROR


def _write(path, writer, items, meta):
    text = ex.to_csv_text(writer, items, meta)
    if path:
        Path(path).write_text(text)
    sys.stdout.write(text)


def cmd_survey(args) -> int:
    opts = search_options(args)
    meta = {"encoding": opts.encoding, "solver": opts.solver_config().describe()}
    if args.graph6_stream:
        with open(args.graph6_stream) as fh:
            rows = [ex.survey(graphs=ex.read_graph6_stream(fh), opts=opts, workers=args.workers)]
    else:
        if not 1 <= args.n <= 7:
            raise GraphError("survey enumeration supports 1 <= n <= 7")
        lo = args.n if args.only else 1
        rows = [ex.survey(n, opts=opts, workers=args.workers) for n in range(lo, args.n + 1)]
    _write(args.out, ex.write_survey_csv, rows, meta)
    for r in rows:
        if r.widest:
            print(f"n={r.n}: largest width {r.max_width} attained by {r.widths[r.max_width]} "
                  f"graph(s), e.g. {r.widest[0]}")
    return EXIT_INCONCLUSIVE if any(r.inconclusive for r in rows) else EXIT_OK


def cmd_sweep(args) -> int:
    opts = search_options(args)
    points = ex.sweep(args.n, ex.p_grid(args.p_grid), args.samples, args.seed, opts)
    meta = {"n": args.n, "samples": args.samples, "seed": args.seed,
            "solver": opts.solver_config().describe()}
    _write(args.out, ex.write_sweep_csv, points, meta)
    return EXIT_INCONCLUSIVE if any(p.inconclusive for p in points) else EXIT_OK


def cmd_catalog(args) -> int:
    if args.show:
        e = catalog_entry(args.show)
        print(f"{e.name}: |V|={e.n} |E|={e.m} reference cwd={e.reference_cwd}")
        print(f"source: {e.source}")
        return EXIT_OK
    for e in catalog_entries():
        print(f"{e.name:14s} {e.n:3d} {e.m:4d}  cwd {e.reference_cwd}")
    return EXIT_OK


def cmd_table(args) -> int:
    names = args.names or [e.name for e in catalog_entries()]
    opts = search_options(args)
    rows = ex.named_table(names, opts)
    _write(args.out, ex.write_table_csv, rows, {"solver": opts.solver_config().describe()})
    return EXIT_INCONCLUSIVE if any(r.cwd is None for r in rows) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cliquewidth", description="Exact clique-width via SAT")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cwd", help="compute the clique-width of one graph")
    _add_graph_args(p)
    _add_search_args(p)
    p.add_argument("--certificate", metavar="OUT", help="write certificate JSON")
    p.add_argument("--verify", action="store_true", help="re-check the certificate")
    p.set_defaults(func=cmd_cwd)

    p = sub.add_parser("encode", help="write F(G, k, t) as DIMACS")
    _add_graph_args(p)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-t", type=int, default=None, help="derivation length (default n-k+1)")
    p.add_argument("--encoding", choices=ENCODINGS, default=REPRESENTATIVE)
    p.add_argument("-o", "--output", metavar="OUT.cnf")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("verify", help="re-check a certificate")
    p.add_argument("--certificate", required=True)
    p.add_argument("--graph", metavar="PATH", help="graph the certificate must describe")
    p.add_argument("--format", choices=["auto", "edgelist", "graph6"], default="auto")
    p.add_argument("--resolve", action="store_true", help="re-solve the UNSAT evidence")
    p.add_argument("--solver", metavar="CMD")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("survey", help="clique-width of all prime graphs up to n vertices")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("-n", type=int)
    src.add_argument("--graph6-stream", metavar="PATH")
    p.add_argument("--only", action="store_true", help="survey n only, not 1..n")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", metavar="CSV")
    _add_search_args(p)
    p.set_defaults(func=cmd_survey)

    p = sub.add_parser("sweep", help="mean clique-width of random G(n, p)")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--p-grid", type=float, default=0.1, metavar="STEP")
    p.add_argument("--samples", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="CSV")
    _add_search_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("catalog", help="named graphs and reference values")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--list", action="store_true")
    g.add_argument("--show", metavar="NAME")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("table", help="compute clique-width of catalog graphs")
    p.add_argument("names", nargs="*")
    p.add_argument("--out", metavar="CSV")
    _add_search_args(p)
    p.set_defaults(func=cmd_table)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (GraphError, SolverError, InvariantError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
