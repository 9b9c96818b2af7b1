"""Continuous orbit equivalence between boundary path spaces, symbolically.

Maps between boundaries are given by prefix-rewriting rules (PathMap);
transport data is given on cylinder cells (RuleTable).  Two equivalent
presentations are supported and converted both ways:

  word form   one table per edge, holding the group word that carries
              sigma(x) = e^-1 . x back to the image side,
  shift form  integer tables k, l with sigma^k(phi(sigma x)) =
              sigma^l(phi(x)), plus primed tables for the inverse.

Both validators sample exhaustively over depth-bounded boundary points,
which on a finite graph decides the cylinder-level statements exactly.
Stabiliser preservation reduces to cocycle sums around primitive cycles,
and eventual conjugacy to the cell-wise condition l = k + 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import InvalidStructure, MapUndefined
from .graphs import FiniteGraph, primitive_cycles
from .groups import FreeGroup, GroupElement, factor_positive, length_cocycle, positive_letters
from .paths import (BoundaryPath, EvPeriodic, FinitePath, enumerate_boundary,
                    format_boundary, shift_n)
from .reports import Violation
from .shift import act_word, edge_group, stab_min


def _fmt_prefix(prefix) -> str:
    return ".".join(str(e) for e in prefix) or "()"


class RuleTable:
    """Values attached to pairwise incomparable cylinder prefixes.  A point
    reads the value of the unique cell it extends."""

    __slots__ = ("_rules",)

    def __init__(self, rules: Dict[tuple, object]):
        rules = {tuple(p): v for p, v in rules.items()}
        for p in rules:
            if not p:
                raise InvalidStructure("cylinder prefixes must be nonempty")
        items = sorted(rules, key=lambda p: (len(p), tuple(str(e) for e in p)))
        for i, p in enumerate(items):
            for q in items[i + 1:]:
                if q[:len(p)] == p:
                    raise InvalidStructure(
                        f"cells {_fmt_prefix(p)} and {_fmt_prefix(q)} overlap")
        self._rules = rules

    def cells(self) -> list:
        return sorted(self._rules, key=lambda p: (len(p), tuple(str(e) for e in p)))

    def items(self) -> list:
        return [(p, self._rules[p]) for p in self.cells()]

    def value_on_cell(self, prefix) -> Optional[object]:
        """The constant value on Z(prefix), when a single cell covers it."""
        prefix = tuple(prefix)
        for p, v in self._rules.items():
            if prefix[:len(p)] == p:
                return v
        return None

    def lookup(self, x: BoundaryPath):
        for p, v in self._rules.items():
            if x.has_prefix(p):
                return v
        raise MapUndefined(f"no cell covers {format_boundary(x)}")

    def covers(self, x: BoundaryPath) -> bool:
        return any(x.has_prefix(p) for p in self._rules)

    def __repr__(self):
        return f"RuleTable({len(self._rules)} cells)"


class PathMap:
    """A boundary map defined by prefix rewriting: the first rule whose
    input prefix matches is applied, emitting its output edges and
    consuming 1 <= consume <= len(input prefix) edges.  Finite paths
    finish through vertex_map once fully consumed."""

    __slots__ = ("graph_in", "graph_out", "rules", "vertex_map")

    def __init__(self, graph_in: FiniteGraph, graph_out: FiniteGraph,
                 rules, vertex_map: Dict[object, object]):
        self.graph_in = graph_in
        self.graph_out = graph_out
        self.rules = tuple((tuple(i), tuple(o), int(c)) for i, o, c in rules)
        self.vertex_map = dict(vertex_map)
        for inp, out, consume in self.rules:
            if not inp or not graph_in.is_path(inp):
                raise InvalidStructure(f"rule input {_fmt_prefix(inp)} is not a path")
            if not graph_out.is_path(out):
                raise InvalidStructure(f"rule output {_fmt_prefix(out)} is not a path")
            if not 1 <= consume <= len(inp):
                raise InvalidStructure(
                    f"rule must consume between 1 and {len(inp)} edges, got {consume}")
        for v, w in self.vertex_map.items():
            if v not in graph_in.vertices or w not in graph_out.vertices:
                raise InvalidStructure(f"vertex rule {v!r} -> {w!r} is out of range")

    def _match(self, x: BoundaryPath):
        for rule in self.rules:
            if x.has_prefix(rule[0]):
                return rule
        return None

    def apply(self, x: BoundaryPath) -> BoundaryPath:
        out: list = []
        cur = x
        if isinstance(x, FinitePath):
            while cur.length > 0:
                rule = self._match(cur)
                if rule is None:
                    raise MapUndefined(f"no rule matches {format_boundary(cur)}")
                out.extend(rule[1])
                cur = shift_n(cur, rule[2])
            if cur.vertex not in self.vertex_map:
                raise MapUndefined(f"no vertex rule for {cur.vertex!r}")
            return FinitePath(self.graph_out, tuple(out), self.vertex_map[cur.vertex])
        seen: Dict[BoundaryPath, int] = {}
        while cur not in seen:
            seen[cur] = len(out)
            rule = self._match(cur)
            if rule is None:
                raise MapUndefined(f"no rule matches {format_boundary(cur)}")
            out.extend(rule[1])
            cur = shift_n(cur, rule[2])
        start = seen[cur]
        prefix, cycle = out[:start], out[start:]
        if not cycle:
            raise MapUndefined(
                f"the periodic part of {format_boundary(x)} emits no output")
        return EvPeriodic(self.graph_out, tuple(prefix), tuple(cycle))

    def emit_prefix(self, known, want: int) -> Optional[tuple]:
        """First `want` output edges shared by every boundary point starting
        with `known`, or None when they are not yet determined."""
        known = tuple(known)
        out: list = []
        while len(out) < want:
            chosen = None
            for rule in self.rules:
                inp = rule[0]
                if len(inp) > len(known):
                    if inp[:len(known)] == known:
                        return None  # a longer rule could fire on some extension
                    continue
                if known[:len(inp)] == inp:
                    chosen = rule
                    break
            if chosen is None:
                return None
            out.extend(chosen[1])
            known = known[chosen[2]:]
        return tuple(out[:want])

    def __repr__(self):
        return f"PathMap({len(self.rules)} rules)"


# ---------------------------------------------------------------------------
# word form


@dataclass
class SymbolicCOE:
    """phi with per-edge transport tables.  a_gen[e] lives on the cylinder
    of e and holds the word h with phi(sigma x) = h . phi(x) there (the
    value of the transport at e^-1); b_gen mirrors this for phi_inv.
    Longer words transport by composing letter steps, so the extension is
    multiplicative by construction."""

    source: FiniteGraph
    target: FiniteGraph
    phi: PathMap
    phi_inv: PathMap
    a_gen: Dict[str, RuleTable]
    b_gen: Dict[str, RuleTable]

    def __post_init__(self):
        self._check_tables(self.a_gen, self.source, self.target, "a")
        self._check_tables(self.b_gen, self.target, self.source, "b")

    @staticmethod
    def _check_tables(tables, graph_from, graph_to, name):
        alphabet = edge_group(graph_to).alphabet
        edge_names = {str(e) for e in graph_from.edges}
        for sym, rt in tables.items():
            if sym not in edge_names:
                raise InvalidStructure(f"{name}-table for unknown edge {sym!r}")
            for prefix, value in rt.items():
                if str(prefix[0]) != sym:
                    raise InvalidStructure(
                        f"{name}-table cell {_fmt_prefix(prefix)} is outside "
                        f"the cylinder of {sym}")
                if not isinstance(value, GroupElement) or \
                        not isinstance(value.group, FreeGroup) or \
                        value.group.alphabet != alphabet:
                    raise InvalidStructure(
                        f"{name}-table value on {_fmt_prefix(prefix)} is not "
                        f"a word over the image edges")

    def a_sigma(self, x: BoundaryPath) -> GroupElement:
        """The word carrying phi(sigma x) back to phi(x): table value of the
        first edge of x."""
        e = x.edge_at(0)
        if e is None:
            raise MapUndefined("sigma is undefined on vertex paths")
        rt = self.a_gen.get(str(e))
        if rt is None:
            raise MapUndefined(f"no a-table for edge {e!r}")
        return rt.lookup(x)

    def b_sigma(self, y: BoundaryPath) -> GroupElement:
        f = y.edge_at(0)
        if f is None:
            raise MapUndefined("sigma is undefined on vertex paths")
        rt = self.b_gen.get(str(f))
        if rt is None:
            raise MapUndefined(f"no b-table for edge {f!r}")
        return rt.lookup(y)

    def _letter_value(self, tables, graph, letter_sym: str, sign: int,
                      x: BoundaryPath) -> Optional[GroupElement]:
        lookup = {str(e): e for e in graph.edges}
        edge = lookup[letter_sym]
        if sign < 0:
            # value stored on the cylinder of the edge
            if x.edge_at(0) != edge:
                return None
            try:
                return tables[letter_sym].lookup(x)
            except (MapUndefined, KeyError):
                return None
        if x.start != graph.d(edge):
            return None
        try:
            ex = x.prepend((edge,))
            stored = tables[letter_sym].lookup(ex)
        except (MapUndefined, InvalidStructure, KeyError):
            return None
        return stored.group.inverse(stored)

    def a(self, g: GroupElement, x: BoundaryPath) -> Optional[GroupElement]:
        """Transport of an arbitrary word of the source edge group, built
        letter by letter from the right; None off the domain."""
        group_s = g.group
        out = edge_group(self.target).identity()
        cur = x
        for letter in reversed(g.value):
            sym = group_s.symbol_of(letter)
            val = self._letter_value(self.a_gen, self.source, sym,
                                     1 if letter > 0 else -1, cur)
            if val is None:
                return None
            out = val.group.multiply(val, out)
            cur = act_word(group_s.word([letter]), cur)
            if cur is None:
                return None
        return out

    def b(self, h: GroupElement, y: BoundaryPath) -> Optional[GroupElement]:
        group_t = h.group
        out = edge_group(self.source).identity()
        cur = y
        for letter in reversed(h.value):
            sym = group_t.symbol_of(letter)
            val = self._letter_value(self.b_gen, self.target, sym,
                                     1 if letter > 0 else -1, cur)
            if val is None:
                return None
            out = val.group.multiply(val, out)
            cur = act_word(group_t.word([letter]), cur)
            if cur is None:
                return None
        return out


def validate_symbolic_coe(coe: SymbolicCOE, depth: int = 3) -> List[Violation]:
    out: List[Violation] = []
    pts_a = enumerate_boundary(coe.source, depth)
    pts_b = enumerate_boundary(coe.target, depth)

    images = {}
    for x in pts_a:
        try:
            y = coe.phi.apply(x)
            images[x] = y
        except MapUndefined as err:
            out.append(Violation("phi-undefined", (format_boundary(x),), str(err)))
            continue
        try:
            back = coe.phi_inv.apply(y)
        except MapUndefined as err:
            out.append(Violation("phi-inverse", (format_boundary(x),), str(err)))
            continue
        if back != x:
            out.append(Violation("phi-inverse", (format_boundary(x),),
                                 f"phi_inv(phi(x)) = {format_boundary(back)} != x"))
    for y in pts_b:
        try:
            x = coe.phi_inv.apply(y)
            fwd = coe.phi.apply(x)
        except MapUndefined as err:
            out.append(Violation("phi-inverse", (format_boundary(y),), str(err)))
            continue
        if fwd != y:
            out.append(Violation("phi-inverse", (format_boundary(y),),
                                 f"phi(phi_inv(y)) = {format_boundary(fwd)} != y"))

    for x in pts_a:
        if x.edge_at(0) is None or x not in images:
            continue
        try:
            h = coe.a_sigma(x)
        except MapUndefined as err:
            out.append(Violation("coe-forward", (format_boundary(x),), str(err)))
            continue
        lhs = coe.phi.apply(x.shift())
        rhs = act_word(h, images[x])
        if rhs is None or rhs != lhs:
            out.append(Violation(
                "coe-forward", (format_boundary(x),),
                f"phi(sigma x) != a(x).phi(x) at x = {format_boundary(x)}"))
    for y in pts_b:
        if y.edge_at(0) is None:
            continue
        try:
            g = coe.b_sigma(y)
            x = coe.phi_inv.apply(y)
        except MapUndefined as err:
            out.append(Violation("coe-backward", (format_boundary(y),), str(err)))
            continue
        lhs = coe.phi_inv.apply(y.shift())
        rhs = act_word(g, x)
        if rhs is None or rhs != lhs:
            out.append(Violation(
                "coe-backward", (format_boundary(y),),
                f"phi_inv(sigma y) != b(y).phi_inv(y) at y = {format_boundary(y)}"))
    return out


# ---------------------------------------------------------------------------
# shift form


@dataclass
class DRCOEData:
    """phi with integer transport: sigma^k(x)(phi(sigma x)) = sigma^l(x)(phi(x))
    away from vertex paths, and the primed tables doing the same for
    phi_inv."""

    source: FiniteGraph
    target: FiniteGraph
    phi: PathMap
    phi_inv: PathMap
    k: RuleTable
    l: RuleTable
    k_prime: RuleTable
    l_prime: RuleTable


def validate_dr_coe(data: DRCOEData, depth: int = 3) -> List[Violation]:
    out: List[Violation] = []

    def side(graph, phi_map, phi_back, k_t, l_t, fwd_rule):
        pts = enumerate_boundary(graph, depth)
        for x in pts:
            try:
                y0 = phi_map.apply(x)
                back = phi_back.apply(y0)
            except MapUndefined as err:
                out.append(Violation("phi-undefined", (format_boundary(x),), str(err)))
                continue
            if back != x:
                out.append(Violation("phi-inverse", (format_boundary(x),),
                                     f"round trip gives {format_boundary(back)}"))
            if x.edge_at(0) is None:
                continue
            try:
                kv, lv = k_t.lookup(x), l_t.lookup(x)
            except MapUndefined as err:
                out.append(Violation("dr-domain", (format_boundary(x),), str(err)))
                continue
            try:
                y1 = phi_map.apply(x.shift())
                if shift_n(y1, kv) != shift_n(y0, lv):
                    raise MapUndefined("shifted images differ")
            except MapUndefined:
                out.append(Violation(
                    fwd_rule, (format_boundary(x),),
                    f"sigma^{kv}(phi(sigma x)) != sigma^{lv}(phi(x)) "
                    f"at x = {format_boundary(x)}"))

    side(data.source, data.phi, data.phi_inv, data.k, data.l, "dr-forward")
    side(data.target, data.phi_inv, data.phi, data.k_prime, data.l_prime, "dr-backward")
    return out


def coe_ab_to_kl(coe: SymbolicCOE) -> DRCOEData:
    """Word form to shift form: on each cell, h = mu nu^-1 turns
    phi(sigma x) = h.phi(x) into sigma^|mu| phi(sigma x) = sigma^|nu| phi(x)."""

    def tables(gen: Dict[str, RuleTable]):
        k_rules, l_rules = {}, {}
        for sym in sorted(gen):
            for prefix, h in gen[sym].items():
                fp = factor_positive(h)
                if fp is None:
                    raise InvalidStructure(
                        f"table value on {_fmt_prefix(prefix)} does not factor "
                        f"as alpha beta^-1")
                mu, nu = fp
                k_rules[prefix] = len(mu.value)
                l_rules[prefix] = len(nu.value)
        return RuleTable(k_rules), RuleTable(l_rules)

    k, l = tables(coe.a_gen)
    kp, lp = tables(coe.b_gen)
    return DRCOEData(coe.source, coe.target, coe.phi, coe.phi_inv, k, l, kp, lp)


def coe_kl_to_ab(data: DRCOEData, max_depth: int = 12) -> SymbolicCOE:
    """Shift form to word form.  Each cell needs nu = the first l edges of
    phi(x) and mu = the first k edges of phi(sigma x) to be constant, so
    cells are refined one edge at a time until the rewriting rules have
    seen enough input."""

    def build(graph_in, graph_out, phi_map, k_t, l_t):
        group_out = edge_group(graph_out)
        cells: Dict[tuple, GroupElement] = {}

        def value_from_words(mu, nu):
            mu_w = group_out.word([str(e) for e in mu])
            nu_w = group_out.word([str(e) for e in nu])
            return group_out.multiply(mu_w, group_out.inverse(nu_w))

        def settle(prefix):
            if len(prefix) > max_depth:
                raise InvalidStructure(
                    f"cell refinement beyond depth {max_depth} at {_fmt_prefix(prefix)}")
            kv = k_t.value_on_cell(prefix)
            lv = l_t.value_on_cell(prefix)
            if kv is not None and lv is not None:
                nu = phi_map.emit_prefix(prefix, lv)
                mu = phi_map.emit_prefix(prefix[1:], kv)
                if nu is not None and mu is not None:
                    cells[prefix] = value_from_words(mu, nu)
                    return
            end = graph_in.path_end(prefix)
            if graph_in.is_singular(end):
                # a singleton cylinder: evaluate on its only point
                x = FinitePath(graph_in, prefix, end)
                if kv is None or lv is None:
                    raise InvalidStructure(
                        f"k/l undefined on the finite point {_fmt_prefix(prefix)}")
                y0, y1 = phi_map.apply(x), phi_map.apply(x.shift())
                if lv > y0.length or kv > y1.length:
                    raise InvalidStructure(
                        f"k/l exceed the image length at {_fmt_prefix(prefix)}")
                cells[prefix] = value_from_words(y1.first_edges(kv), y0.first_edges(lv))
                return
            for e in graph_in.continuations(end):
                settle(prefix + (e,))

        for e in graph_in.edges:
            settle((e,))

        gen: Dict[str, RuleTable] = {}
        for e in graph_in.edges:
            sym = str(e)
            mine = {p: v for p, v in cells.items() if p[0] == e}
            if mine:
                gen[sym] = RuleTable(mine)
        return gen

    a_gen = build(data.source, data.target, data.phi, data.k, data.l)
    b_gen = build(data.target, data.source, data.phi_inv, data.k_prime, data.l_prime)
    return SymbolicCOE(data.source, data.target, data.phi, data.phi_inv, a_gen, b_gen)


# ---------------------------------------------------------------------------
# hypothesis checks


def check_stab_preserving_dr(data: DRCOEData,
                             cycle_cap: Optional[int] = None) -> List[Violation]:
    """Around every primitive cycle the cocycle sum of l - k must reproduce
    the least period on the image side, and finite paths must map to
    finite paths; checked on both sides."""
    out: List[Violation] = []

    def side(graph, phi_map, k_t, l_t, rule):
        cap = cycle_cap if cycle_cap is not None else max(1, len(graph.edges))
        for cyc in primitive_cycles(graph, cap):
            x = EvPeriodic(graph, (), cyc)
            p = len(x.cycle)
            try:
                total = 0
                z = x
                for _ in range(p):
                    total += l_t.lookup(z) - k_t.lookup(z)
                    z = z.shift()
                y = phi_map.apply(x)
            except MapUndefined as err:
                out.append(Violation(rule, (format_boundary(x),), str(err)))
                continue
            if isinstance(y, FinitePath):
                out.append(Violation("stab-finiteness", (format_boundary(x),),
                                     f"periodic point maps to the finite path "
                                     f"{format_boundary(y)}"))
            elif abs(total) != stab_min(y):
                out.append(Violation(
                    rule, (format_boundary(x),),
                    f"cocycle sum {total} around {format_boundary(x)} does not "
                    f"match the least period {stab_min(y)} of the image"))
        for x in enumerate_boundary(graph, 2):
            if not x.is_finite:
                continue
            try:
                y = phi_map.apply(x)
            except MapUndefined:
                continue  # reported by the validator
            if not y.is_finite:
                out.append(Violation("stab-finiteness", (format_boundary(x),),
                                     f"finite path maps to {format_boundary(y)}"))

    side(data.source, data.phi, data.k, data.l, "stab-forward")
    side(data.target, data.phi_inv, data.k_prime, data.l_prime, "stab-backward")
    return out


def check_eventual_conjugacy(data: DRCOEData) -> List[Violation]:
    """l = k + 1 on every cell of the common refinement, both sides."""
    out: List[Violation] = []

    def side(k_t, l_t, tag):
        for ck, kv in k_t.items():
            for cl, lv in l_t.items():
                n = min(len(ck), len(cl))
                if ck[:n] != cl[:n]:
                    continue  # disjoint cylinders
                if lv != kv + 1:
                    longer = ck if len(ck) >= len(cl) else cl
                    out.append(Violation(
                        "not-eventually-conjugate", (tag, _fmt_prefix(longer)),
                        f"l = {lv} but k + 1 = {kv + 1} on {_fmt_prefix(longer)}"))

    side(data.k, data.l, "forward")
    side(data.k_prime, data.l_prime, "backward")
    return out


def check_eventual_conjugacy_symbolic(coe: SymbolicCOE) -> List[Violation]:
    """Word-form counterpart: each stored value must have the same letter
    count sum as the element it transports (a single inverse edge, so -1).
    Generator cells suffice because longer transports multiply."""
    out: List[Violation] = []
    for tag, gen in (("forward", coe.a_gen), ("backward", coe.b_gen)):
        for sym in sorted(gen):
            for prefix, h in gen[sym].items():
                if length_cocycle(h) != -1:
                    out.append(Violation(
                        "not-eventually-conjugate", (tag, _fmt_prefix(prefix)),
                        f"value on {_fmt_prefix(prefix)} has letter sum "
                        f"{length_cocycle(h)}, expected -1"))
    return out


# ---------------------------------------------------------------------------
# stock equivalences


def identity_symbolic_coe(graph: FiniteGraph) -> SymbolicCOE:
    group = edge_group(graph)
    ident = PathMap(graph, graph, [((e,), (e,), 1) for e in graph.edges],
                    {v: v for v in graph.vertices})
    gen = {str(e): RuleTable({(e,): group.inverse(group.generator(str(e)))})
           for e in graph.edges}
    return SymbolicCOE(graph, graph, ident, ident, gen, dict(gen))


def relabel_symbolic_coe(source: FiniteGraph, target: FiniteGraph,
                         vertex_map: Dict[object, object],
                         edge_map: Dict[object, object]) -> SymbolicCOE:
    """The equivalence induced by a graph isomorphism."""
    if source.relabel(vertex_map, edge_map) != target:
        raise InvalidStructure("the maps are not an isomorphism onto the target")
    group_t = edge_group(target)
    group_s = edge_group(source)
    fwd = PathMap(source, target, [((e,), (edge_map[e],), 1) for e in source.edges],
                  dict(vertex_map))
    inv_v = {w: v for v, w in vertex_map.items()}
    inv_e = {f: e for e, f in edge_map.items()}
    bwd = PathMap(target, source, [((f,), (inv_e[f],), 1) for f in target.edges],
                  dict(inv_v))
    a_gen = {str(e): RuleTable({(e,): group_t.inverse(group_t.generator(str(edge_map[e])))})
             for e in source.edges}
    b_gen = {str(f): RuleTable({(f,): group_s.inverse(group_s.generator(str(inv_e[f])))})
             for f in target.edges}
    return SymbolicCOE(source, target, fwd, bwd, a_gen, b_gen)
