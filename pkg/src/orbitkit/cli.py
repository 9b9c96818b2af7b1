"""Batch front end: orbitkit <validate|groupoid|equiv|recognize|paths>.

Each command parses instance files, runs the corresponding checks, and
prints a report (text, or JSON with --json).  Exit codes: 0 all checks
passed, 1 some check failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .booldyn import build_graph, validate_gbds
from .category import (
    enumerate_orbit_morphisms, is_isomorphism, validate_coe,
    validate_orbit_morphism, check_preserves_stabilisers,
)
from .errors import EnumerationCap, OrbitkitError, ParseError
from .graphs import FiniteGraph, find_graph_isomorphisms
from .groupoid import (
    check_torsion_free_abelian, find_groupoid_isomorphism, isotropy_bundle,
    to_dot, transformation_groupoid, validate_hom,
)
from .instances import InstanceDoc, parse_file
from .paths import enumerate_boundary, format_boundary
from .pds import validate as validate_system
from .recognition import (
    ReconstructedSystem, build_phi, canonical_partition, check_cocycle,
    singleton_partition, validate_partition,
)
from .reports import Report, Violation
from .shift import induced_finite_pds, stab_min, stab_min_ess, truncated_dr_groupoid
from .shift_coe import (
    check_eventual_conjugacy, check_eventual_conjugacy_symbolic,
    check_stab_preserving_dr, relabel_symbolic_coe, validate_dr_coe,
    validate_symbolic_coe,
)


def _emit(report: Report, args, lines: Optional[List[str]] = None) -> int:
    if args.json:
        print(report.to_json())
    else:
        for line in lines or []:
            print(line)
        if report.records:
            print(report.render())
    return 0 if report.ok else 1


def _first_object(doc: InstanceDoc, path: str, wanted=None) -> str:
    for kind, name in doc.object_names():
        if wanted is None or kind in wanted:
            return name
    raise ParseError(f"{path}: no usable object found")


def _pick(doc: InstanceDoc, path: str, name: Optional[str], wanted=None) -> str:
    if name is None:
        return _first_object(doc, path, wanted)
    if doc.kind_of(name) is None:
        raise ParseError(f"{path}: no object named {name!r}")
    return name


# ---------------------------------------------------------------------------
# validate


def _validate_doc(report: Report, doc: InstanceDoc, path: str,
                  depth: int, bound: int) -> None:
    def guarded(label, fn):
        try:
            fn()
        except ParseError:
            raise
        except OrbitkitError as err:
            report.add(label, [Violation("error", (), str(err))])

    for kind, name in doc.object_names():
        label = f"{path}: {name}"
        if kind == "system":
            def check_system(name=name, label=label):
                pds = doc.system(name)
                report.add(label, validate_system(pds),
                           info={"points": len(pds.space),
                                 "elements": len(pds.table),
                                 "mode": pds.mode})
            guarded(label, check_system)
        elif kind == "graph":
            def check_graph(name=name, label=label):
                sysb = induced_finite_pds(doc.graph(name), depth, bound=bound)
                report.add(label, validate_system(sysb.pds),
                           info={"boundary points": len(sysb.pds.space),
                                 "depth": depth, "bound": bound})
            guarded(label, check_graph)
        else:
            def check_gbds(name=name, label=label):
                g = doc.gbds(name)
                violations = validate_gbds(g)
                info = {}
                if not violations:
                    graph = build_graph(g)
                    info = {"vertices": len(graph.vertices),
                            "edges": len(graph.edges)}
                report.add(label, violations, info)
            guarded(label, check_gbds)

    for sec in doc.sections_of_kind("morphism"):
        label = f"{path}: morphism {sec.name}"
        guarded(label, lambda sec=sec, label=label: report.add(
            label, validate_orbit_morphism(doc.morphism(sec.name).morphism)))
    for sec in doc.sections_of_kind("coe"):
        def check_coe(sec=sec):
            label = f"{path}: coe {sec.name}"
            r = doc.coe(sec.name)
            if r.finite is not None:
                rep = validate_coe(r.finite)
                report.add(label, rep.violations,
                           info={"a is a cocycle": rep.a_is_cocycle,
                                 "b is a cocycle": rep.b_is_cocycle})
            else:
                report.add(label, validate_symbolic_coe(r.symbolic, depth))
        guarded(f"{path}: coe {sec.name}", check_coe)
    def check_dr(sec):
        data = doc.dr_coe(sec.name).data
        vio = validate_dr_coe(data, depth)
        vio.extend(check_stab_preserving_dr(data))
        report.add(f"{path}: dr-coe {sec.name}", vio)

    for sec in doc.sections_of_kind("dr-coe"):
        guarded(f"{path}: dr-coe {sec.name}", lambda sec=sec: check_dr(sec))
    for sec in doc.sections_of_kind("partition"):
        guarded(f"{path}: partition {sec.name}",
                lambda sec=sec: report.add(
                    f"{path}: partition {sec.name}",
                    validate_partition(doc.partition(sec.name).partition)))


def cmd_validate(args) -> int:
    report = Report()
    for path in args.files:
        _validate_doc(report, parse_file(path), path, args.depth, args.bound)
    return _emit(report, args)


# ---------------------------------------------------------------------------
# groupoid


def cmd_groupoid(args) -> int:
    doc = parse_file(args.file)
    name = _pick(doc, args.file, args.name)
    kind = doc.kind_of(name)
    report = Report()
    lines: List[str] = []
    try:
        if kind == "system":
            gpd = transformation_groupoid(doc.system(name))
            ta = check_torsion_free_abelian(gpd, max_order=5)
            info = {"summary": f"{len(gpd.arrows)} arrows, {len(gpd.units)} units",
                    "isotropy arrows": len(isotropy_bundle(gpd)),
                    "isotropy torsion-free abelian": ta.ok}
        else:
            graph = doc.graph(name) if kind == "graph" else build_graph(doc.gbds(name))
            gpd = truncated_dr_groupoid(graph, args.depth, k_cap=args.bound)
            ks = sorted({a.k for a in gpd.arrows})
            info = {"summary": f"{len(gpd.arrows)} arrows, {len(gpd.units)} units",
                    "truncated": True, "depth": args.depth, "k cap": args.bound,
                    "k values": " ".join(str(k) for k in ks)}
        report.add(f"{args.file}: {name} groupoid", [], info)
        lines.append(f"{name}: {info['summary']}")
        if args.dot:
            with open(args.dot, "w", encoding="utf-8") as fh:
                fh.write(to_dot(gpd, name="G"))
            lines.append(f"wrote {args.dot}")
    except ParseError:
        raise
    except OrbitkitError as err:
        report.add(f"{args.file}: {name} groupoid",
                   [Violation("error", (), str(err))])
    return _emit(report, args, lines)


# ---------------------------------------------------------------------------
# equiv


def _connecting_sections(docs, kind: str, a: str, b: str):
    out = []
    scan = docs[:1] if docs[1] is docs[0] else docs
    for doc in scan:
        for sec in doc.sections_of_kind(kind):
            if sec.args[1] == a and sec.args[2] == b:
                out.append((doc, sec.name))
    return out


def _equiv_systems(args, docs, name_a, name_b, report) -> List[str]:
    doc_a, doc_b = docs
    src, tgt = doc_a.system(name_a), doc_b.system(name_b)
    lines: List[str] = []
    if args.mode == "iso":
        witness = None
        for m in enumerate_orbit_morphisms(src, tgt):
            if not validate_orbit_morphism(m) and is_isomorphism(m).ok:
                witness = m
                break
        if witness is None:
            report.add(f"{name_a} ~ {name_b} (iso)",
                       [Violation("no-isomorphism", (),
                                  "the isomorphism search was exhaustive and empty")])
        else:
            report.add(f"{name_a} ~ {name_b} (iso)", [])
            for x in sorted(witness.phi):
                lines.append(f"phi: {x} -> {witness.phi[x]}")
            for (g, x) in sorted(witness.a, key=lambda p: (str(p[1]), str(p[0]))):
                lines.append(
                    f"a: {src.group.format_element(g)} @ {x} -> "
                    f"{tgt.group.format_element(witness.a[(g, x)])}")
    elif args.mode == "coe":
        found = _connecting_sections(docs, "coe", name_a, name_b)
        if not found:
            raise ParseError(f"no [coe] section connecting {name_a} and {name_b}")
        for doc, cname in found:
            r = doc.coe(cname)
            rep = validate_coe(r.finite)
            report.add(f"coe {cname} equations", rep.violations,
                       info={"a is a cocycle": rep.a_is_cocycle,
                             "b is a cocycle": rep.b_is_cocycle})
            report.add(f"coe {cname} stabilisers",
                       check_preserves_stabilisers(r.finite, essential=False))
            report.add(f"coe {cname} essential stabilisers",
                       check_preserves_stabilisers(r.finite, essential=True))
    else:
        raise ParseError("eventual conjugacy applies to shift systems; "
                         "give two graph instances")
    return lines


def _equiv_graphs(args, docs, name_a, name_b, report) -> List[str]:
    doc_a, doc_b = docs
    ga, gb = doc_a.graph(name_a), doc_b.graph(name_b)
    lines: List[str] = []
    if args.mode == "iso":
        match = next(find_graph_isomorphisms(ga, gb), None)
        if match is None:
            na = len(enumerate_boundary(ga, args.depth))
            nb = len(enumerate_boundary(gb, args.depth))
            detail = (f"boundary point counts differ at depth {args.depth}: "
                      f"{na} vs {nb}") if na != nb else "no edge relabeling exists"
            report.add(f"{name_a} ~ {name_b} (iso)",
                       [Violation("no-isomorphism", (), detail)])
        else:
            vmap, emap = match
            report.add(f"{name_a} ~ {name_b} (iso)", [])
            lines.extend(f"vertex: {v} -> {w}" for v, w in sorted(vmap.items()))
            lines.extend(f"edge: {e} -> {f}" for e, f in sorted(emap.items()))
    elif args.mode == "coe":
        found = _connecting_sections(docs, "coe", name_a, name_b)
        dr_found = _connecting_sections(docs, "dr-coe", name_a, name_b)
        if not found and not dr_found:
            raise ParseError(
                f"no [coe] or [dr-coe] section connecting {name_a} and {name_b}")
        for doc, cname in found:
            r = doc.coe(cname)
            report.add(f"coe {cname} equations",
                       validate_symbolic_coe(r.symbolic, args.depth))
        for doc, cname in dr_found:
            data = doc.dr_coe(cname).data
            report.add(f"dr-coe {cname} equations", validate_dr_coe(data, args.depth))
            report.add(f"dr-coe {cname} stabiliser sums",
                       check_stab_preserving_dr(data))
    else:  # ec
        found = _connecting_sections(docs, "coe", name_a, name_b)
        dr_found = _connecting_sections(docs, "dr-coe", name_a, name_b)
        if found or dr_found:
            for doc, cname in found:
                r = doc.coe(cname)
                report.add(f"coe {cname} equations",
                           validate_symbolic_coe(r.symbolic, args.depth))
                report.add(f"coe {cname} length condition",
                           check_eventual_conjugacy_symbolic(r.symbolic))
            for doc, cname in dr_found:
                data = doc.dr_coe(cname).data
                report.add(f"dr-coe {cname} equations",
                           validate_dr_coe(data, args.depth))
                report.add(f"dr-coe {cname} length condition",
                           check_eventual_conjugacy(data))
        else:
            hit = None
            for vmap, emap in find_graph_isomorphisms(ga, gb):
                coe = relabel_symbolic_coe(ga, gb, vmap, emap)
                if not validate_symbolic_coe(coe, args.depth) and \
                        not check_eventual_conjugacy_symbolic(coe):
                    hit = (vmap, emap)
                    break
            if hit is None:
                report.add(f"{name_a} ~ {name_b} (ec)",
                           [Violation("no-witness", (),
                                      "no relabeling satisfies the length condition")])
            else:
                report.add(f"{name_a} ~ {name_b} (ec)", [])
                lines.extend(f"edge: {e} -> {f}" for e, f in sorted(hit[1].items()))
    return lines


def cmd_equiv(args) -> int:
    path_a, path_b = args.files
    doc_a = parse_file(path_a)
    docs = (doc_a, doc_a if path_a == path_b else parse_file(path_b))
    name_a = _pick(docs[0], path_a, args.name_a, ("system", "graph"))
    if args.name_b is None and path_a == path_b:
        # one file holding both objects: compare the first two, not a ~ a
        rest = [n for k, n in docs[1].object_names()
                if k in ("system", "graph") and n != name_a]
        name_b = rest[0] if rest else name_a
    else:
        name_b = _pick(docs[1], path_b, args.name_b, ("system", "graph"))
    kind_a, kind_b = docs[0].kind_of(name_a), docs[1].kind_of(name_b)
    if kind_a != kind_b:
        raise ParseError(f"kind mismatch: {name_a} is a {kind_a}, "
                         f"{name_b} is a {kind_b}")
    report = Report()
    try:
        if kind_a == "system":
            lines = _equiv_systems(args, docs, name_a, name_b, report)
        elif kind_a == "graph":
            lines = _equiv_graphs(args, docs, name_a, name_b, report)
        else:
            raise ParseError(f"equivalence checks need systems or graphs, "
                             f"got {kind_a}")
    except EnumerationCap as err:
        raise ParseError(f"not decidable at this scale: {err}") from None
    return _emit(report, args, lines)


# ---------------------------------------------------------------------------
# recognize


def cmd_recognize(args) -> int:
    doc = parse_file(args.file)
    report = Report()
    lines: List[str] = []
    if args.partition is not None:
        resolved = doc.partition(args.partition)
        gpd, part = resolved.groupoid, resolved.partition
        label = f"partition {args.partition}"
    else:
        name = _pick(doc, args.file, args.name, ("system",))
        if doc.kind_of(name) != "system":
            raise ParseError(f"{name!r} is not a system")
        gpd = transformation_groupoid(doc.system(name))
        part = canonical_partition(gpd) if args.canonical else singleton_partition(gpd)
        label = f"{'canonical' if args.canonical else 'singleton'} partition of {name}"

    violations = validate_partition(part)
    report.add(f"{label}: bisection conditions", violations,
               info={"blocks": len(part)})
    if violations:
        return _emit(report, args, lines)

    recon = ReconstructedSystem(part)
    report.add(f"{label}: label cocycle", check_cocycle(recon))
    pds = recon.pds
    report.add(f"{label}: reconstructed action", validate_system(pds),
               info={"points": len(pds.space), "labels": len(recon.descriptor.names)})

    lines.append("points: " + " ".join(pds.space.points))
    for i, nm in enumerate(recon.descriptor.names):
        if i == recon.descriptor.unit_block:
            continue
        pb = pds.table[recon.descriptor.letter(i)]
        moves = ", ".join(f"{x} -> {y}" for x, y in sorted(pb.items()))
        lines.append(f"label {nm}: {moves if moves else '(empty)'}")

    hom = build_phi(recon)
    hom_violations = list(validate_hom(hom))
    unit_bij = len(set(hom.unit_map.values())) == len(hom.target.units) == len(gpd.units)
    arrow_bij = len(set(hom.arrow_map.values())) == len(hom.target.arrows) == len(gpd.arrows)
    if not (unit_bij and arrow_bij):
        hom_violations.append(Violation(
            "phi-bijective", (), "the comparison morphism is not bijective"))
    report.add(f"{label}: comparison morphism", hom_violations)

    round_trip = find_groupoid_isomorphism(gpd, transformation_groupoid(pds))
    report.add(f"{label}: round trip",
               [] if round_trip is not None else
               [Violation("round-trip", (),
                          "no isomorphism back to the transformation groupoid")])
    def arrow_text(a):
        if gpd.payload is not None and a in gpd.payload:
            g, x = gpd.payload[a]
            fmt = getattr(g, "group", None)
            return f"{fmt.format_element(g) if fmt else g} @ {x}"
        return repr(a)

    for a in sorted(gpd.arrows, key=repr)[:args.limit]:
        g, x = hom.arrow_map[a]
        lines.append(f"phi: {arrow_text(a)} -> "
                     f"{recon.descriptor.format_element(g)} @ {x}")
    if len(gpd.arrows) > args.limit:
        lines.append(f"... {len(gpd.arrows) - args.limit} more arrows")
    return _emit(report, args, lines)


# ---------------------------------------------------------------------------
# paths


def cmd_paths(args) -> int:
    doc = parse_file(args.file)
    name = _pick(doc, args.file, args.name, ("graph", "gbds"))
    kind = doc.kind_of(name)
    if kind == "gbds":
        graph = build_graph(doc.gbds(name))
    elif kind == "graph":
        graph = doc.graph(name)
    else:
        raise ParseError(f"{name!r} has no boundary path space")
    report = Report()
    lines: List[str] = []
    pts = enumerate_boundary(graph, args.depth)
    for x in pts:
        lines.append(f"{format_boundary(x)}  stab_min={stab_min(x)}  "
                     f"stab_min_ess={stab_min_ess(x)}")
    report.add(f"{args.file}: {name} boundary", [],
               info={"points at depth": len(pts), "depth": args.depth,
                     "singular vertices":
                         " ".join(str(v) for v in graph.singular_vertices()) or "(none)"})
    return _emit(report, args, lines)


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbitkit",
        description="validate, build, and compare finite partial dynamical systems")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="machine-readable report")
        p.add_argument("--depth", type=int, default=2,
                       help="boundary path depth for graph instances (default 2)")
        p.add_argument("--bound", type=int, default=2,
                       help="word-length or k bound (default 2)")

    p = sub.add_parser("validate", help="run the axioms on every object in the files")
    p.add_argument("files", nargs="+")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("groupoid", help="build the associated groupoid")
    p.add_argument("file")
    p.add_argument("name", nargs="?", default=None)
    p.add_argument("--dot", default=None, help="write a DOT rendering here")
    common(p)
    p.set_defaults(func=cmd_groupoid)

    p = sub.add_parser("equiv", help="compare two instances")
    p.add_argument("files", nargs=2)
    p.add_argument("--mode", choices=("iso", "coe", "ec"), required=True)
    p.add_argument("--name-a", default=None)
    p.add_argument("--name-b", default=None)
    common(p)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("recognize", help="recover a partial action from a partition")
    p.add_argument("file")
    p.add_argument("name", nargs="?", default=None)
    p.add_argument("--partition", default=None,
                   help="use this [partition] section instead of the default")
    p.add_argument("--canonical", action="store_true",
                   help="partition by action payload instead of singletons")
    p.add_argument("--limit", type=int, default=24,
                   help="arrow lines to print (default 24)")
    common(p)
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("paths", help="enumerate boundary paths of a graph")
    p.add_argument("file")
    p.add_argument("name", nargs="?", default=None)
    common(p)
    p.set_defaults(func=cmd_paths)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
