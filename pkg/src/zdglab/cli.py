"""Command-line entry point: ``zdglab <command> ...``.

Exit codes: 0 success / all checks pass, 1 check failure, 2 usage or
parse error, 3 resource bound exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .algebra import classify_length5, invariants
from .bilinear import (
    build_phi,
    congruence_representatives,
    radical,
    search_orthogonal_sets,
)
from .catalog import Family, FamilySpec, build_ring, expected_record, parse_family_params
from .errors import BudgetExceeded, PhiPreconditionError, ResourceBoundExceeded, StructuralImpossibility, ZdglabError
from .ringio import dump_ring, load_input
from .verify import Suite, build_report, dump_report, run_suite
from .zdgraph import build_gamma, build_gamma_e, clique_number, export_dot, export_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BOUND = 0, 1, 2, 3


def _write(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _warn(msg: str):
    print(f"warning: {msg}", file=sys.stderr)


# -- commands -----------------------------------------------------------------


def cmd_analyze(args) -> int:
    ring, name = load_input(args.input)
    inv = invariants(ring)
    record = {"ring": name, "invariants": inv.to_json()}
    if inv.is_local and inv.length == 5:
        record["case"] = classify_length5(inv).value
    try:
        phi = build_phi(ring)
        rad = radical(phi.space)
        record["phi"] = {"gram": phi.space.gram.data.tolist(), "radical_dim": rad.dim, "l": str(phi.l)}
    except PhiPreconditionError as exc:
        record["phi"] = {"ineligible": exc.code}
    if args.json:
        print(json.dumps(record, indent=2))
        return EXIT_OK
    print(f"ring: {name}")
    print(f"  p = {ring.p}, dim over F_p = {ring.dim}, basis = {', '.join(ring.labels)}")
    print(f"  local: {inv.is_local}")
    print(f"  length: {inv.length}")
    if inv.is_local:
        print(f"  residue degree: {inv.residue_degree}")
        print(f"  hilbert: {tuple(inv.hilbert)}")
        print(f"  embedding dimension: {inv.embdim}")
        print(f"  socle_dim: {inv.socle_dim}")
        print(f"  gorenstein: {inv.is_gorenstein}")
    if "case" in record:
        print(f"  case: {record['case']}")
    phi_rec = record["phi"]
    if "gram" in phi_rec:
        print(f"  phi on m/m^2 (l = {phi_rec['l']}): gram = {phi_rec['gram']}, radical dim = {phi_rec['radical_dim']}")
    else:
        print(f"  phi on m/m^2: not applicable ({phi_rec['ineligible']})")
    return EXIT_OK


def _graph_for(args):
    ring, name = load_input(args.input)
    graph = build_gamma_e(ring, name) if args.compressed else build_gamma(ring, name)
    return ring, graph


def cmd_graph(args) -> int:
    _, graph = _graph_for(args)
    if graph.vertex_count == 0:
        _warn("ring has no nonzero zero-divisors; the graph is empty")
    report = clique_number(graph) if args.clique else None
    if args.format == "dot":
        text = export_dot(graph)
        if report is not None:
            labels = ", ".join(graph.vertices[i].label for i in report.witness_clique)
            text = f"// clique_number = {report.clique_number}; witness = {{{labels}}}\n" + text
    else:
        text = export_json(graph, report)
    _write(text, args.out)
    return EXIT_OK


def cmd_clique(args) -> int:
    _, graph = _graph_for(args)
    report = clique_number(graph)
    labels = [graph.vertices[i].label for i in report.witness_clique]
    if args.json:
        print(json.dumps({**report.to_json(), "witness_labels": labels}, indent=2))
    else:
        print(f"vertices: {report.vertex_count}")
        print(f"edges: {report.edge_count}")
        print(f"clique number: {report.clique_number}")
        print(f"witness: {{{', '.join(labels)}}}")
    return EXIT_OK


def cmd_verify(args) -> int:
    names = [s.value for s in Suite] if "ALL" in args.suites else args.suites
    primes = sorted(set(args.p)) if args.p else None
    config = {"suites": names, "primes": primes}
    results = []
    for name in names:
        res = run_suite(Suite(name), primes, jobs=args.jobs)
        results.append(res)
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {name}: {sum(i.passed for i in res.items)}/{len(res.items)} items ({res.seconds:.2f} s)")
        for item in res.items:
            if args.verbose or not item.passed:
                mark = "ok  " if item.passed else "FAIL"
                print(f"  {mark} {item.subject} [{item.claim}] {json.dumps(item.details, sort_keys=True)}")
    report = build_report(results, config)
    if args.out:
        _write(dump_report(report), args.out)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_search_ortho(args) -> int:
    spaces = congruence_representatives(args.p, args.dim)
    nonparallel = args.nonparallel
    mode = "pairwise non-parallel" if nonparallel else "parallel vectors allowed"
    out = []
    exceeded = False
    for space in spaces:
        entry = {"gram": space.gram.data.tolist()}
        try:
            found = search_orthogonal_sets(space, args.size, nonparallel, budget=args.budget, limit=args.limit)
            entry["status"] = "found" if found else "none within budget"
            entry["witnesses"] = [[v.tolist() for v in w] for w in found]
        except BudgetExceeded as exc:
            exceeded = True
            entry["status"] = "budget exceeded"
            entry["detail"] = str(exc)
            entry["witnesses"] = []
        out.append(entry)
    if args.json:
        print(json.dumps({"p": args.p, "dim": args.dim, "size": args.size, "nonparallel": nonparallel, "forms": out}, indent=2))
    else:
        print(f"orthogonal {args.size}-sets over F_{args.p}^{args.dim} ({mode}), one form per congruence class")
        for entry in out:
            print(f"gram {entry['gram']}: {entry['status']}")
            for w in entry["witnesses"]:
                print(f"  {w}")
            if "detail" in entry:
                print(f"  {entry['detail']}")
    return EXIT_BOUND if exceeded else EXIT_OK


def cmd_catalog(args) -> int:
    if args.list:
        print(f"{'family':<18} example (p = 2)")
        for fam in Family:
            spec = FamilySpec(fam, 2, parse_family_params(fam, {}))
            exp = expected_record(spec)
            hil = f" hilbert={exp.hilbert}" if exp.hilbert else ""
            print(f"{fam.value:<18} {spec.description}  [length {exp.length}{hil}]")
        return EXIT_OK
    if not args.emit:
        print("catalog: give --list or --emit NAME", file=sys.stderr)
        return EXIT_USAGE
    try:
        fam = Family(args.emit)
    except ValueError:
        print(f"catalog: unknown family {args.emit!r}", file=sys.stderr)
        return EXIT_USAGE
    raw = {"n": args.n, "variant": args.variant, "a": args.a, "b": args.b}
    spec = FamilySpec(fam, args.p, parse_family_params(fam, raw))
    ring = build_ring(spec)
    _write(dump_ring(ring, spec.presentation), args.out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _prime_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zdglab", description="Zero-divisor graph laboratory for finite commutative rings.")
    parser.add_argument("--version", action="version", version=f"zdglab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="ring invariants, length-5 case and the form on m/m^2")
    p.add_argument("input", help="ring JSON file, presentation file or presentation text")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("graph", help="export the (compressed) zero-divisor graph")
    p.add_argument("input")
    p.add_argument("--compressed", dest="compressed", action="store_true", default=True)
    p.add_argument("--uncompressed", dest="compressed", action="store_false", help="full graph, small rings only")
    p.add_argument("--format", choices=["dot", "json"], default="dot")
    p.add_argument("--clique", action="store_true", help="include clique number and witness")
    p.add_argument("--out")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("clique", help="exact clique number with a witness")
    p.add_argument("input")
    p.add_argument("--compressed", dest="compressed", action="store_true", default=True)
    p.add_argument("--uncompressed", dest="compressed", action="store_false")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_clique)

    p = sub.add_parser("verify", help="run verification suites over the catalog")
    p.add_argument("suites", nargs="+", choices=[s.value for s in Suite] + ["ALL"])
    p.add_argument("--p", type=_prime_list, help="primes, e.g. '2,3'")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("-v", "--verbose", action="store_true", help="list passing items too")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search-ortho", help="search orthogonal sets of a given size (exploratory)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--nonparallel", action="store_true", help="require pairwise non-parallel vectors")
    p.add_argument("--budget", type=int, default=10**7, help="maximum candidate checks per form")
    p.add_argument("--limit", type=int, default=5, help="witnesses to print per form")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_search_ortho)

    p = sub.add_parser("catalog", help="list or emit catalog rings")
    p.add_argument("--list", action="store_true")
    p.add_argument("--emit", metavar="NAME")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--n", type=int, help="CHAIN length")
    p.add_argument("--variant", help="LEN4_H121 variant: gor or soc2")
    p.add_argument("--a", type=int, help="PRODUCT exponent of x")
    p.add_argument("--b", type=int, help="PRODUCT exponent of x - 1")
    p.add_argument("--out")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceBoundExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except StructuralImpossibility as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ZdglabError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
