"""Line-oriented instance files (.ork): parsing, resolution, serialization.

A file is a sequence of sections.  A section header is a bracketed kind
plus arguments, `[kind arg1 arg2 ...]`; its body runs until the next
header.  Body lines are one of

    key = value
    lhs -> rhs            (optionally  tag: lhs -> rhs,  and a trailing [n])
    bare tokens           (name lists, e.g. vertices or atoms)

`#` starts a comment, blank lines are skipped, and a top-level line
`include <path>` splices another file in before the first section of the
including one.

Section vocabulary and shapes:

    [space S]        points = x0 x1
    [group S]        kind = cyclic|table|int|free  plus order/names/table/
                     identity/letters/bound as the kind needs
    [elem S w]       x -> y         explicit map of the element w
    [gen S a]        x -> y         generator map (generated mode; bound
                                    taken from the group section)
    [vertices G]     v w
    [edges G]        a: v -> w      edge a from r(a)=v to d(a)=w
    [atoms B]        p q
    [alphabet B]     a b
    [theta B a]      p -> q r       atom image; () for empty
    [ideal B a]      top = p q
    [rule R]         a.b -> c.d [n]  prefix rewrite (consume n, default all)
                     @v -> w         vertex clause
                     a.b -> value    value-table clause (int or word)
    [morphism M A B] x -> y          point map
                     g @ x -> h      transport entry
    [coe C A B]      systems: x -> y, a: g @ x -> h, b: h @ y -> g
                     graphs:  phi = R, phi_inv = R, a @ e = R, b @ f = R
    [dr-coe D A B]   phi/phi_inv/k/l/k'/l' = R
    [partition P S]  mode = singleton|canonical, or block = g @ x, g @ y

Parsing normalizes whitespace, so serialize(parse(serialize(doc))) is
byte-identical to serialize(doc); comments do not survive a round trip.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .booldyn import GBDS, FiniteBooleanAlgebra
from .category import COETriple, OrbitMorphism
from .errors import OrbitkitError, ParseError
from .graphs import FiniteGraph
from .groupoid import FiniteGroupoid, transformation_groupoid
from .groups import FiniteGroup, FreeGroup, Integers, cyclic_group
from .pds import FinitePDS, FiniteSpace, PartialBijection, extend_semi_saturated
from .recognition import BisectionPartition, canonical_partition, singleton_partition
from .shift import edge_group
from .shift_coe import DRCOEData, PathMap, RuleTable, SymbolicCOE

SECTION_KINDS = {
    "space": 1, "group": 1, "gen": 2, "elem": 2,
    "vertices": 1, "edges": 1,
    "atoms": 1, "alphabet": 1, "theta": 2, "ideal": 2,
    "rule": 1, "morphism": 3, "coe": 3, "dr-coe": 3, "partition": 2,
}

_HEADER_RE = re.compile(r"^\[([a-z-]+)((?:\s+\S+)*)\s*\]$")


@dataclass(frozen=True)
class Entry:
    kind: str            # "kv" | "arrow" | "bare"
    tag: Optional[str]   # arrow tag, else None
    lhs: str
    rhs: str
    extra: Optional[int]

    def render(self) -> str:
        if self.kind == "kv":
            return f"{self.lhs} = {self.rhs}"
        if self.kind == "bare":
            return self.lhs
        head = f"{self.tag}: " if self.tag is not None else ""
        tail = f"  [{self.extra}]" if self.extra is not None else ""
        return f"{head}{self.lhs} -> {self.rhs}{tail}"


@dataclass(frozen=True)
class Section:
    kind: str
    args: tuple
    entries: tuple

    @property
    def name(self) -> str:
        return self.args[0]

    def header(self) -> str:
        inner = " ".join((self.kind,) + self.args)
        return f"[{inner}]"

    def kv(self) -> Dict[str, str]:
        out: Dict[str, str] = {}
        for e in self.entries:
            if e.kind == "kv":
                if e.lhs in out:
                    raise ParseError(f"{self.header()}: duplicate key {e.lhs!r}")
                out[e.lhs] = e.rhs
        return out

    def arrows(self) -> List[Entry]:
        return [e for e in self.entries if e.kind == "arrow"]

    def bare_tokens(self) -> List[str]:
        out: List[str] = []
        for e in self.entries:
            if e.kind == "bare":
                out.extend(e.lhs.split())
        return out


def _squeeze(text: str) -> str:
    return " ".join(text.split())


def _parse_entry(line: str, where: str) -> Entry:
    if "->" in line:
        lhs, rhs = line.split("->", 1)
        lhs, rhs = lhs.strip(), rhs.strip()
        tag = None
        if ":" in lhs:
            tag, lhs = lhs.split(":", 1)
            tag, lhs = tag.strip(), lhs.strip()
            if not tag or " " in tag:
                raise ParseError(f"{where}: bad entry tag {tag!r}")
        extra = None
        m = re.search(r"\[\s*(-?\d+)\s*\]\s*$", rhs)
        if m:
            extra = int(m.group(1))
            rhs = rhs[:m.start()].strip()
        if not lhs:
            raise ParseError(f"{where}: arrow entry with empty left side")
        return Entry("arrow", tag, _squeeze(lhs), _squeeze(rhs), extra)
    if "=" in line:
        key, value = line.split("=", 1)
        key, value = _squeeze(key), _squeeze(value)
        if not key:
            raise ParseError(f"{where}: key = value entry with empty key")
        return Entry("kv", None, key, value, None)
    return Entry("bare", None, _squeeze(line), "", None)


def parse_text(text: str, source: str = "<string>",
               _active: Optional[frozenset] = None) -> "InstanceDoc":
    sections: List[Section] = []
    cur: Optional[Tuple[str, tuple]] = None
    entries: List[Entry] = []

    def flush():
        if cur is not None:
            sections.append(Section(cur[0], cur[1], tuple(entries)))
        entries.clear()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if line.startswith("["):
            m = _HEADER_RE.match(line)
            if m is None:
                raise ParseError(f"{where}: malformed section header {line!r}")
            kind, args = m.group(1), tuple(m.group(2).split())
            if kind not in SECTION_KINDS:
                raise ParseError(f"{where}: unknown section kind {kind!r}")
            if len(args) != SECTION_KINDS[kind]:
                raise ParseError(
                    f"{where}: section [{kind}] takes {SECTION_KINDS[kind]} "
                    f"argument(s), got {len(args)}")
            flush()
            cur = (kind, args)
            continue
        if cur is None:
            words = line.split()
            if words[0] == "include" and len(words) == 2:
                base = os.path.dirname(source) if source != "<string>" else "."
                target = os.path.normpath(os.path.join(base, words[1]))
                active = _active or frozenset()
                if target in active:
                    raise ParseError(f"{where}: include cycle through {target}")
                try:
                    with open(target, "r", encoding="utf-8") as fh:
                        sub = parse_text(fh.read(), target, active | {target})
                except OSError as err:
                    raise ParseError(f"{where}: cannot include {target}: {err}") from None
                sections.extend(sub.sections)
                continue
            raise ParseError(f"{where}: content before any section header")
        entries.append(_parse_entry(line, where))
    flush()
    return InstanceDoc(tuple(sections))


def parse_file(path: str) -> "InstanceDoc":
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise ParseError(f"cannot read {path}: {err}") from None
    return parse_text(text, path, frozenset({os.path.normpath(path)}))


def serialize(doc: "InstanceDoc") -> str:
    chunks: List[str] = []
    for sec in doc.sections:
        lines = [sec.header()]
        lines.extend(e.render() for e in sec.entries)
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + "\n"


# ---------------------------------------------------------------------------
# resolution


@dataclass(frozen=True)
class ResolvedMorphism:
    name: str
    source_name: str
    target_name: str
    morphism: OrbitMorphism


@dataclass(frozen=True)
class ResolvedCOE:
    name: str
    source_name: str
    target_name: str
    finite: Optional[COETriple]
    symbolic: Optional[SymbolicCOE]


@dataclass(frozen=True)
class ResolvedDRCOE:
    name: str
    source_name: str
    target_name: str
    data: DRCOEData


@dataclass(frozen=True)
class ResolvedPartition:
    name: str
    system_name: str
    groupoid: FiniteGroupoid
    partition: BisectionPartition


class InstanceDoc:
    """Parsed sections plus lazy resolution into package objects.  Top-level
    object names (systems, graphs, Boolean systems) share one namespace."""

    def __init__(self, sections: tuple):
        self.sections = tuple(sections)
        self._cache: Dict[Tuple[str, str], object] = {}
        self._index: Dict[Tuple[str, tuple], Section] = {}
        for sec in self.sections:
            key = (sec.kind, sec.args)
            if key in self._index:
                raise ParseError(f"duplicate section {sec.header()}")
            self._index[key] = sec
        self._kinds: Dict[str, str] = {}
        for sec in self.sections:
            kind = {"space": "system", "group": "system",
                    "gen": "system", "elem": "system",
                    "vertices": "graph", "edges": "graph",
                    "atoms": "gbds", "alphabet": "gbds",
                    "theta": "gbds", "ideal": "gbds"}.get(sec.kind)
            if kind is None:
                continue
            name = sec.args[0]
            if self._kinds.setdefault(name, kind) != kind:
                raise ParseError(
                    f"name {name!r} is used for both a {self._kinds[name]} "
                    f"and a {kind}")

    def __eq__(self, other):
        return isinstance(other, InstanceDoc) and self.sections == other.sections

    def __hash__(self):
        return hash(self.sections)

    # -- lookup helpers ----------------------------------------------------

    def _get(self, kind: str, *args) -> Optional[Section]:
        return self._index.get((kind, tuple(args)))

    def _need(self, kind: str, *args) -> Section:
        sec = self._get(kind, *args)
        if sec is None:
            inner = " ".join((kind,) + tuple(args))
            raise ParseError(f"missing section [{inner}]")
        return sec

    def _many(self, kind: str, name: str) -> List[Section]:
        return [s for s in self.sections if s.kind == kind and s.args[0] == name]

    def kind_of(self, name: str) -> Optional[str]:
        return self._kinds.get(name)

    def object_names(self) -> List[Tuple[str, str]]:
        """(kind, name) of every top-level object, in file order."""
        seen: List[Tuple[str, str]] = []
        for sec in self.sections:
            name = sec.args[0] if sec.args else None
            kind = self._kinds.get(name)
            if kind is not None and (kind, name) not in seen:
                seen.append((kind, name))
        return seen

    def names_of(self, kind: str) -> List[str]:
        return [n for k, n in self.object_names() if k == kind]

    def sections_of_kind(self, kind: str) -> List[Section]:
        return [s for s in self.sections if s.kind == kind]

    # -- systems -----------------------------------------------------------

    def _group(self, name: str):
        sec = self._need("group", name)
        kv = sec.kv()
        kind = kv.get("kind")
        hdr = sec.header()
        if kind == "cyclic":
            try:
                order = int(kv["order"])
            except (KeyError, ValueError):
                raise ParseError(f"{hdr}: cyclic groups need an integer order") from None
            names = tuple(kv["names"].split()) if "names" in kv else None
            if names is not None and len(names) != order:
                raise ParseError(f"{hdr}: {order} names expected")
            try:
                return cyclic_group(order, names)
            except ValueError as err:
                raise ParseError(f"{hdr}: {err}") from None
        if kind == "table":
            if "table" not in kv:
                raise ParseError(f"{hdr}: table groups need a table")
            try:
                rows = tuple(tuple(int(tok) for tok in row.split())
                             for row in kv["table"].split("/"))
                identity = int(kv.get("identity", "0"))
            except ValueError:
                raise ParseError(f"{hdr}: malformed table") from None
            names = tuple(kv["names"].split()) if "names" in kv else None
            try:
                return FiniteGroup(table=rows, identity_index=identity, names=names)
            except ValueError as err:
                raise ParseError(f"{hdr}: {err}") from None
        if kind == "int":
            return Integers()
        if kind == "free":
            if "letters" not in kv:
                raise ParseError(f"{hdr}: free groups need letters")
            try:
                return FreeGroup(tuple(kv["letters"].split()))
            except ValueError as err:
                raise ParseError(f"{hdr}: {err}") from None
        raise ParseError(f"{hdr}: unknown group kind {kind!r}")

    def _partial_map(self, sec: Section, space: FiniteSpace) -> PartialBijection:
        mapping: Dict[str, str] = {}
        for e in sec.arrows():
            if e.tag is not None or "@" in e.lhs:
                raise ParseError(f"{sec.header()}: plain x -> y lines expected")
            if e.lhs in mapping:
                raise ParseError(f"{sec.header()}: point {e.lhs!r} mapped twice")
            mapping[e.lhs] = e.rhs
        stray = (set(mapping) | set(mapping.values())) - set(space.points)
        if stray:
            raise ParseError(f"{sec.header()}: unknown points {sorted(stray)}")
        try:
            return PartialBijection(mapping)
        except OrbitkitError as err:
            raise ParseError(f"{sec.header()}: {err}") from None

    def system(self, name: str) -> FinitePDS:
        key = ("system", name)
        if key not in self._cache:
            space_sec = self._need("space", name)
            kv_space = space_sec.kv()
            if "points" not in kv_space:
                raise ParseError(f"{space_sec.header()}: needs points = ...")
            points = tuple(kv_space["points"].split())  # may be empty
            try:
                space = FiniteSpace(points)
            except OrbitkitError as err:
                raise ParseError(f"{space_sec.header()}: {err}") from None
            group = self._group(name)
            gens = self._many("gen", name)
            elems = self._many("elem", name)
            if gens and elems:
                raise ParseError(
                    f"system {name!r} mixes [gen] and [elem] sections")
            try:
                if gens:
                    kv = self._need("group", name).kv()
                    bound = int(kv.get("bound", "3"))
                    table = {sec.args[1]: self._partial_map(sec, space)
                             for sec in gens}
                    pds = extend_semi_saturated(space, group, table, bound)
                else:
                    table = {}
                    for sec in elems:
                        g = group.parse_element(sec.args[1])
                        if g in table:
                            raise ParseError(
                                f"{sec.header()}: element given twice")
                        table[g] = self._partial_map(sec, space)
                    pds = FinitePDS.explicit(space, group, table)
            except OrbitkitError as err:
                raise ParseError(f"system {name!r}: {err}") from None
            self._cache[key] = pds
        return self._cache[key]

    # -- graphs ------------------------------------------------------------

    def graph(self, name: str) -> FiniteGraph:
        key = ("graph", name)
        if key not in self._cache:
            vsec = self._need("vertices", name)
            vertices = vsec.bare_tokens()
            esec = self._get("edges", name)
            edges, r, d = [], {}, {}
            for e in (esec.arrows() if esec is not None else []):
                if e.tag is None:
                    raise ParseError(
                        f"{esec.header()}: edges are written  name: v -> w")
                edges.append(e.tag)
                r[e.tag] = e.lhs
                d[e.tag] = e.rhs
            try:
                self._cache[key] = FiniteGraph(vertices, edges, r, d)
            except OrbitkitError as err:
                raise ParseError(f"graph {name!r}: {err}") from None
        return self._cache[key]

    # -- Boolean systems ---------------------------------------------------

    def gbds(self, name: str) -> GBDS:
        key = ("gbds", name)
        if key not in self._cache:
            atoms = self._need("atoms", name).bare_tokens()
            alphabet = self._need("alphabet", name).bare_tokens()
            try:
                algebra = FiniteBooleanAlgebra(atoms)
            except OrbitkitError as err:
                raise ParseError(f"gbds {name!r}: {err}") from None
            theta: Dict[str, Dict[str, frozenset]] = {}
            ideal: Dict[str, frozenset] = {}
            for sym in alphabet:
                images = {a: frozenset() for a in atoms}
                tsec = self._get("theta", name, sym)
                for e in (tsec.arrows() if tsec is not None else []):
                    if e.lhs not in images:
                        raise ParseError(f"{tsec.header()}: unknown atom {e.lhs!r}")
                    toks = [] if e.rhs in ("()", "") else e.rhs.split()
                    images[e.lhs] = frozenset(toks)
                theta[sym] = images
                isec = self._get("ideal", name, sym)
                if isec is None:
                    ideal[sym] = frozenset(atoms)
                else:
                    top = isec.kv().get("top", "")
                    ideal[sym] = frozenset([] if top in ("()", "") else top.split())
            try:
                self._cache[key] = GBDS(algebra, tuple(alphabet), theta, ideal)
            except OrbitkitError as err:
                raise ParseError(f"gbds {name!r}: {err}") from None
        return self._cache[key]

    # -- rule tables -------------------------------------------------------

    def _edge_prefix(self, graph: FiniteGraph, text: str, where: str) -> tuple:
        lookup = {str(e): e for e in graph.edges}
        if text in ("e", "()", ""):
            return ()
        out = []
        for tok in text.split("."):
            if tok not in lookup:
                raise ParseError(f"{where}: unknown edge {tok!r}")
            out.append(lookup[tok])
        return tuple(out)

    def path_map(self, rule_name: str, graph_in: FiniteGraph,
                 graph_out: FiniteGraph) -> PathMap:
        sec = self._need("rule", rule_name)
        hdr = sec.header()
        rules, vmap = [], {}
        for e in sec.arrows():
            if e.lhs.startswith("@"):
                vmap[e.lhs[1:].strip()] = e.rhs
                continue
            inp = self._edge_prefix(graph_in, e.lhs, hdr)
            out = self._edge_prefix(graph_out, e.rhs, hdr)
            consume = e.extra if e.extra is not None else len(inp)
            rules.append((inp, out, consume))
        try:
            return PathMap(graph_in, graph_out, rules, vmap)
        except OrbitkitError as err:
            raise ParseError(f"{hdr}: {err}") from None

    def int_table(self, rule_name: str, graph: FiniteGraph) -> RuleTable:
        sec = self._need("rule", rule_name)
        hdr = sec.header()
        rules = {}
        for e in sec.arrows():
            if e.lhs.startswith("@"):
                raise ParseError(f"{hdr}: value tables take no vertex clauses")
            try:
                rules[self._edge_prefix(graph, e.lhs, hdr)] = int(e.rhs)
            except ValueError:
                raise ParseError(f"{hdr}: integer value expected, got {e.rhs!r}") from None
        try:
            return RuleTable(rules)
        except OrbitkitError as err:
            raise ParseError(f"{hdr}: {err}") from None

    def word_table(self, rule_name: str, graph_cells: FiniteGraph,
                   graph_words: FiniteGraph) -> RuleTable:
        sec = self._need("rule", rule_name)
        hdr = sec.header()
        group = edge_group(graph_words)
        rules = {}
        for e in sec.arrows():
            if e.lhs.startswith("@"):
                raise ParseError(f"{hdr}: value tables take no vertex clauses")
            try:
                rules[self._edge_prefix(graph_cells, e.lhs, hdr)] = \
                    group.parse_element(e.rhs)
            except OrbitkitError as err:
                raise ParseError(f"{hdr}: {err}") from None
        try:
            return RuleTable(rules)
        except OrbitkitError as err:
            raise ParseError(f"{hdr}: {err}") from None

    # -- connecting data ---------------------------------------------------

    def _pair_kind(self, sec: Section) -> str:
        a, b = self._kinds.get(sec.args[1]), self._kinds.get(sec.args[2])
        if a is None or b is None:
            missing = sec.args[1] if a is None else sec.args[2]
            raise ParseError(f"{sec.header()}: unknown object {missing!r}")
        if a != b or a not in ("system", "graph"):
            raise ParseError(
                f"{sec.header()}: endpoints must be two systems or two graphs")
        return a

    def morphism(self, name: str) -> ResolvedMorphism:
        key = ("morphism", name)
        if key not in self._cache:
            sec = None
            for s in self.sections_of_kind("morphism"):
                if s.args[0] == name:
                    sec = s
                    break
            if sec is None:
                raise ParseError(f"missing section [morphism {name} ...]")
            if self._pair_kind(sec) != "system":
                raise ParseError(f"{sec.header()}: morphisms connect systems")
            src = self.system(sec.args[1])
            tgt = self.system(sec.args[2])
            phi: Dict[str, str] = {}
            a: Dict[tuple, object] = {}
            hdr = sec.header()
            for e in sec.arrows():
                try:
                    if e.tag == "a" or (e.tag is None and "@" in e.lhs):
                        g_text, x = (part.strip() for part in e.lhs.split("@", 1))
                        a[(src.group.parse_element(g_text), x)] = \
                            tgt.group.parse_element(e.rhs)
                    elif e.tag is None:
                        phi[e.lhs] = e.rhs
                    else:
                        raise ParseError(f"{hdr}: unexpected tag {e.tag!r}")
                except OrbitkitError as err:
                    raise ParseError(f"{hdr}: {err}") from None
            self._cache[key] = ResolvedMorphism(
                name, sec.args[1], sec.args[2], OrbitMorphism(src, tgt, phi, a))
        return self._cache[key]

    def coe(self, name: str) -> ResolvedCOE:
        key = ("coe", name)
        if key not in self._cache:
            sec = None
            for s in self.sections_of_kind("coe"):
                if s.args[0] == name:
                    sec = s
                    break
            if sec is None:
                raise ParseError(f"missing section [coe {name} ...]")
            hdr = sec.header()
            if self._pair_kind(sec) == "system":
                src, tgt = self.system(sec.args[1]), self.system(sec.args[2])
                phi: Dict[str, str] = {}
                a: Dict[tuple, object] = {}
                b: Dict[tuple, object] = {}
                for e in sec.arrows():
                    try:
                        if e.tag == "a":
                            g_text, x = (p.strip() for p in e.lhs.split("@", 1))
                            a[(src.group.parse_element(g_text), x)] = \
                                tgt.group.parse_element(e.rhs)
                        elif e.tag == "b":
                            h_text, y = (p.strip() for p in e.lhs.split("@", 1))
                            b[(tgt.group.parse_element(h_text), y)] = \
                                src.group.parse_element(e.rhs)
                        elif e.tag is None and "@" not in e.lhs:
                            phi[e.lhs] = e.rhs
                        else:
                            raise ParseError(
                                f"{hdr}: transport lines need an a: or b: tag")
                    except OrbitkitError as err:
                        raise ParseError(f"{hdr}: {err}") from None
                resolved = ResolvedCOE(name, sec.args[1], sec.args[2],
                                       COETriple(src, tgt, phi, a, b), None)
            else:
                src_g, tgt_g = self.graph(sec.args[1]), self.graph(sec.args[2])
                kv = sec.kv()
                for needed in ("phi", "phi_inv"):
                    if needed not in kv:
                        raise ParseError(f"{hdr}: needs {needed} = <rule>")
                pm = self.path_map(kv["phi"], src_g, tgt_g)
                pm_inv = self.path_map(kv["phi_inv"], tgt_g, src_g)
                a_gen: Dict[str, RuleTable] = {}
                b_gen: Dict[str, RuleTable] = {}
                for k, v in kv.items():
                    if k.startswith("a @"):
                        a_gen[k[3:].strip()] = self.word_table(v, src_g, tgt_g)
                    elif k.startswith("b @"):
                        b_gen[k[3:].strip()] = self.word_table(v, tgt_g, src_g)
                try:
                    sym = SymbolicCOE(src_g, tgt_g, pm, pm_inv, a_gen, b_gen)
                except OrbitkitError as err:
                    raise ParseError(f"{hdr}: {err}") from None
                resolved = ResolvedCOE(name, sec.args[1], sec.args[2], None, sym)
            self._cache[key] = resolved
        return self._cache[key]

    def dr_coe(self, name: str) -> ResolvedDRCOE:
        key = ("dr-coe", name)
        if key not in self._cache:
            sec = None
            for s in self.sections_of_kind("dr-coe"):
                if s.args[0] == name:
                    sec = s
                    break
            if sec is None:
                raise ParseError(f"missing section [dr-coe {name} ...]")
            hdr = sec.header()
            if self._pair_kind(sec) != "graph":
                raise ParseError(f"{hdr}: shift-form data connects graphs")
            src_g, tgt_g = self.graph(sec.args[1]), self.graph(sec.args[2])
            kv = sec.kv()
            for needed in ("phi", "phi_inv", "k", "l", "k'", "l'"):
                if needed not in kv:
                    raise ParseError(f"{hdr}: needs {needed} = <rule>")
            data = DRCOEData(
                src_g, tgt_g,
                self.path_map(kv["phi"], src_g, tgt_g),
                self.path_map(kv["phi_inv"], tgt_g, src_g),
                self.int_table(kv["k"], src_g),
                self.int_table(kv["l"], src_g),
                self.int_table(kv["k'"], tgt_g),
                self.int_table(kv["l'"], tgt_g))
            self._cache[key] = ResolvedDRCOE(name, sec.args[1], sec.args[2], data)
        return self._cache[key]

    def partition(self, name: str) -> ResolvedPartition:
        key = ("partition", name)
        if key not in self._cache:
            sec = None
            for s in self.sections_of_kind("partition"):
                if s.args[0] == name:
                    sec = s
                    break
            if sec is None:
                raise ParseError(f"missing section [partition {name} ...]")
            hdr = sec.header()
            sys_name = sec.args[1]
            if self._kinds.get(sys_name) != "system":
                raise ParseError(f"{hdr}: {sys_name!r} is not a system")
            pds = self.system(sys_name)
            gpd = transformation_groupoid(pds)
            mode = None
            blocks = []
            for e in sec.entries:
                if e.kind != "kv":
                    raise ParseError(f"{hdr}: key = value lines expected")
                if e.lhs == "mode":
                    mode = e.rhs
                elif e.lhs == "block":
                    blocks.append(e)
                else:
                    raise ParseError(f"{hdr}: unknown key {e.lhs!r}")
            if mode is not None and blocks:
                raise ParseError(f"{hdr}: give a mode or blocks, not both")
            try:
                if mode == "singleton":
                    part = singleton_partition(gpd)
                elif mode == "canonical":
                    part = canonical_partition(gpd)
                elif mode is not None:
                    raise ParseError(f"{hdr}: unknown mode {mode!r}")
                else:
                    arrow_set = set(gpd.arrows)
                    parsed_blocks = []
                    for e in blocks:
                        block = []
                        for item in e.rhs.split(","):
                            g_text, x = (p.strip() for p in item.split("@", 1))
                            arrow = (pds.group.parse_element(g_text), x)
                            if arrow not in arrow_set:
                                raise ParseError(
                                    f"{hdr}: {item.strip()!r} is not an arrow")
                            block.append(arrow)
                        parsed_blocks.append(block)
                    part = BisectionPartition(gpd, parsed_blocks)
            except ParseError:
                raise
            except (OrbitkitError, ValueError) as err:
                raise ParseError(f"{hdr}: {err}") from None
            self._cache[key] = ResolvedPartition(name, sys_name, gpd, part)
        return self._cache[key]
