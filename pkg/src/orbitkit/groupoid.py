"""Finite groupoids with stored composition tables.

A FiniteGroupoid keeps its arrows as hashable ids with explicit source,
range, inverse and composition maps; the axioms are verified eagerly at
construction.  Transformation groupoids of partial actions carry the pair
(g, x) as payload on each arrow, which is what lets homomorphisms be
pulled back to orbit morphisms later.

Truncated groupoids (built from bound-truncated systems) may be missing
composites whose underlying group element exceeds the bound; the stored
part is still checked, and operations that need the whole composition
table refuse to run on them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Optional

from .errors import InvalidStructure, TruncationError
from .groups import GroupElement
from .pds import FinitePDS
from .reports import Violation


class FiniteGroupoid:
    def __init__(self, units, arrows, source, range_, inverse, compose,
                 unit_arrow, payload=None, truncated=False):
        self.units = tuple(units)
        self.arrows = tuple(arrows)
        self.source = dict(source)
        self.range_ = dict(range_)
        self.inverse = dict(inverse)
        self.compose = dict(compose)
        self.unit_arrow = dict(unit_arrow)
        self.payload = dict(payload) if payload is not None else None
        self.truncated = truncated
        self._arrow_set = frozenset(self.arrows)
        self._check()

    # -- bookkeeping --------------------------------------------------------

    def is_unit_arrow(self, a) -> bool:
        return a in self._unit_arrows

    def isotropy(self, u) -> frozenset:
        """Arrows with source and range both equal to u."""
        return frozenset(a for a in self.arrows
                         if self.source[a] == u and self.range_[a] == u)

    def composable(self, a, b) -> bool:
        return self.source[a] == self.range_[b]

    def product(self, a, b):
        """a o b, or None when the entry is absent (truncated only)."""
        return self.compose.get((a, b))

    def _check(self):
        unit_set = set(self.units)
        if len(unit_set) != len(self.units):
            raise InvalidStructure("duplicate units")
        if len(self._arrow_set) != len(self.arrows):
            raise InvalidStructure("duplicate arrows")
        for a in self.arrows:
            if self.source.get(a) not in unit_set or self.range_.get(a) not in unit_set:
                raise InvalidStructure(f"arrow {a!r} has source/range outside the unit set")
            inv = self.inverse.get(a)
            if inv not in self._arrow_set:
                raise InvalidStructure(f"arrow {a!r} has no inverse")
            if self.inverse.get(inv) != a:
                raise InvalidStructure(f"inversion is not involutive at {a!r}")
            if self.source[inv] != self.range_[a] or self.range_[inv] != self.source[a]:
                raise InvalidStructure(f"inverse of {a!r} does not swap source and range")
        self._unit_arrows = set()
        for u in self.units:
            ua = self.unit_arrow.get(u)
            if ua not in self._arrow_set or self.source[ua] != u or self.range_[ua] != u:
                raise InvalidStructure(f"unit {u!r} lacks an identity arrow")
            self._unit_arrows.add(ua)

        for (a, b), c in self.compose.items():
            if a not in self._arrow_set or b not in self._arrow_set or c not in self._arrow_set:
                raise InvalidStructure(f"composition entry ({a!r},{b!r}) mentions unknown arrows")
            if self.source[a] != self.range_[b]:
                raise InvalidStructure(f"composition defined on non-composable pair ({a!r},{b!r})")
            if self.source[c] != self.source[b] or self.range_[c] != self.range_[a]:
                raise InvalidStructure(f"composite of ({a!r},{b!r}) has wrong endpoints")

        for a in self.arrows:
            ua_r = self.unit_arrow[self.range_[a]]
            ua_s = self.unit_arrow[self.source[a]]
            if self.compose.get((ua_r, a), a) != a or self.compose.get((a, ua_s), a) != a:
                raise InvalidStructure(f"unit arrows are not neutral at {a!r}")
            got = self.compose.get((a, self.inverse[a]))
            if got is not None and got != ua_r:
                raise InvalidStructure(f"{a!r} o {a!r}^-1 is not the unit at its range")
            got = self.compose.get((self.inverse[a], a))
            if got is not None and got != ua_s:
                raise InvalidStructure(f"{a!r}^-1 o {a!r} is not the unit at its source")
            if not self.truncated:
                if (a, self.inverse[a]) not in self.compose:
                    raise InvalidStructure(f"missing composite {a!r} o {a!r}^-1")

        if not self.truncated:
            for a, b in itertools.product(self.arrows, self.arrows):
                if self.composable(a, b) and (a, b) not in self.compose:
                    raise InvalidStructure(f"missing composite of composable pair ({a!r},{b!r})")

        # associativity, wherever all four stored products exist
        by_range: Dict[object, list] = {u: [] for u in self.units}
        for a in self.arrows:
            by_range[self.range_[a]].append(a)
        for b in self.arrows:
            for c in by_range[self.source[b]]:
                bc = self.compose.get((b, c))
                for a in self.arrows:
                    if self.source[a] != self.range_[b]:
                        continue
                    ab = self.compose.get((a, b))
                    left = self.compose.get((ab, c)) if ab is not None else None
                    right = self.compose.get((a, bc)) if bc is not None else None
                    if left is not None and right is not None and left != right:
                        raise InvalidStructure(
                            f"associativity fails on ({a!r},{b!r},{c!r})")
                    if not self.truncated and (left is None or right is None):
                        raise InvalidStructure(
                            f"missing composite in triple ({a!r},{b!r},{c!r})")

    def __repr__(self):
        t = ", truncated" if self.truncated else ""
        return f"FiniteGroupoid({len(self.units)} units, {len(self.arrows)} arrows{t})"


# ---------------------------------------------------------------------------
# constructions


def transformation_groupoid(pds: FinitePDS) -> FiniteGroupoid:
    """The groupoid of the partial action: one arrow (g, x) for each stored
    g and each x in U_{g^-1}, with source x, range g.x, composition
    (g1, g2.x) o (g2, x) = (g1 g2, x)."""
    group = pds.group
    arrows = []
    source, range_, inverse, payload = {}, {}, {}, {}
    for g, pb in pds.table.items():
        for x in pb.domain:
            a = (g, x)
            arrows.append(a)
            source[a] = x
            range_[a] = pb(x)
            payload[a] = a
    arrow_set = set(arrows)
    for (g, x) in arrows:
        inverse[(g, x)] = (group.inverse(g), pds.table[g](x))

    compose = {}
    missing = 0
    by_source: Dict[object, list] = {}
    for a in arrows:
        by_source.setdefault(source[a], []).append(a)
    for b in arrows:
        g2, x = b
        mid = range_[b]
        for a in by_source.get(mid, ()):  # a = (g1, g2.x)
            g1 = a[0]
            prod = group.multiply(g1, g2)
            c = (prod, x)
            if c in arrow_set:
                compose[(a, b)] = c
            elif not pds.truncated:
                raise InvalidStructure(
                    f"composite arrow {c!r} missing; the system does not "
                    f"satisfy the partial-action axioms")
            else:
                missing += 1

    e = group.identity()
    unit_arrow = {x: (e, x) for x in pds.space.points}
    # A generated-mode table can still be closed under composition; keep the
    # truncation flag only when a composite really fell outside it.
    return FiniteGroupoid(pds.space.points, arrows, source, range_, inverse,
                          compose, unit_arrow, payload=payload,
                          truncated=pds.truncated and missing > 0)


def pair_groupoid(units) -> FiniteGroupoid:
    """All ordered pairs (u, v) with source v and range u."""
    units = tuple(units)
    arrows = [(u, v) for u in units for v in units]
    source = {a: a[1] for a in arrows}
    range_ = {a: a[0] for a in arrows}
    inverse = {a: (a[1], a[0]) for a in arrows}
    compose = {}
    for (u, v), (v2, w) in itertools.product(arrows, arrows):
        if v == v2:
            compose[((u, v), (v2, w))] = (u, w)
    unit_arrow = {u: (u, u) for u in units}
    return FiniteGroupoid(units, arrows, source, range_, inverse, compose, unit_arrow)


def group_bundle(unit_groups: dict) -> FiniteGroupoid:
    """Disjoint union of groups sitting over their units: arrows (u, g) with
    source = range = u, composed fibrewise.  unit_groups maps each unit to a
    finite group descriptor."""
    units = tuple(unit_groups)
    arrows, source, range_, inverse, compose, unit_arrow = [], {}, {}, {}, {}, {}
    for u, desc in unit_groups.items():
        for g in desc.elements():
            a = (u, g)
            arrows.append(a)
            source[a] = u
            range_[a] = u
            inverse[a] = (u, desc.inverse(g))
        for g in desc.elements():
            for h in desc.elements():
                compose[((u, g), (u, h))] = (u, desc.multiply(g, h))
        unit_arrow[u] = (u, desc.identity())
    return FiniteGroupoid(units, arrows, source, range_, inverse, compose, unit_arrow)


# ---------------------------------------------------------------------------
# isotropy


def isotropy_bundle(gpd: FiniteGroupoid) -> frozenset:
    """All arrows with equal source and range."""
    return frozenset(a for a in gpd.arrows if gpd.source[a] == gpd.range_[a])


def isotropy_interior(pds: FinitePDS) -> frozenset:
    """Arrows (g, x) whose g lies in the essential stabiliser of x.  On a
    finite discrete space this is the interior of the isotropy bundle of the
    transformation groupoid."""
    out = set()
    for x in pds.space.points:
        for g in pds.essential_stabiliser(x).elements:
            out.add((g, x))
    return frozenset(out)


@dataclass
class TorsionAbelianReport:
    violations: list = field(default_factory=list)
    skipped: int = 0          # pairs/powers undecidable under truncation
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations


def check_torsion_free_abelian(gpd: FiniteGroupoid, max_order: int) -> TorsionAbelianReport:
    """Is every isotropy group of the groupoid abelian and free of torsion
    up to exponent max_order?  Truncated groupoids are checked as far as
    their stored composites reach; skipped counts what could not be decided."""
    rep = TorsionAbelianReport(truncated=gpd.truncated)
    for u in gpd.units:
        iso = sorted(gpd.isotropy(u), key=repr)
        for a, b in itertools.combinations(iso, 2):
            ab, ba = gpd.product(a, b), gpd.product(b, a)
            if ab is None or ba is None:
                rep.skipped += 1
                continue
            if ab != ba:
                rep.violations.append(Violation(
                    "abelian", (repr(a), repr(b)),
                    f"isotropy arrows at {u!r} do not commute"))
        unit = gpd.unit_arrow[u]
        for a in iso:
            if a == unit:
                continue
            power = a
            for m in range(2, max_order + 1):
                power = gpd.product(power, a)
                if power is None:
                    rep.skipped += 1
                    break
                if power == unit:
                    rep.violations.append(Violation(
                        "torsion-free", (repr(a), m),
                        f"isotropy arrow at {u!r} has order {m}"))
                    break
    return rep


def stabilisers_torsion_free_abelian(pds: FinitePDS, max_order: int) -> TorsionAbelianReport:
    """The same question asked of the essential stabilisers of the system
    directly; must agree with the groupoid-side check."""
    rep = TorsionAbelianReport(truncated=pds.truncated)
    group = pds.group
    e = group.identity()
    for x in pds.space.points:
        stab = pds.essential_stabiliser(x)
        elems = stab.sorted_elements()
        for g, h in itertools.combinations(elems, 2):
            if group.multiply(g, h) != group.multiply(h, g):
                rep.violations.append(Violation(
                    "abelian", (group.format_element(g), group.format_element(h), x),
                    f"stabiliser of {x!r} is not abelian"))
        for g in elems:
            if g == e:
                continue
            power = g
            for m in range(2, max_order + 1):
                power = group.multiply(power, g)
                if power == e:
                    rep.violations.append(Violation(
                        "torsion-free", (group.format_element(g), m, x),
                        f"stabiliser of {x!r} has an element of order {m}"))
                    break
    return rep


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass
class GroupoidHom:
    source: FiniteGroupoid
    target: FiniteGroupoid
    unit_map: dict
    arrow_map: dict

    def apply(self, a):
        return self.arrow_map[a]

    def is_bijective(self) -> bool:
        return (len(set(self.unit_map.values())) == len(self.target.units)
                and len(self.unit_map) == len(self.source.units)
                and len(set(self.arrow_map.values())) == len(self.target.arrows)
                and len(self.arrow_map) == len(self.source.arrows))


def validate_hom(hom: GroupoidHom):
    """Functoriality of a groupoid homomorphism; returns violations."""
    out = []
    src, tgt = hom.source, hom.target
    tgt_units = set(tgt.units)
    tgt_arrows = set(tgt.arrows)
    for u in src.units:
        if hom.unit_map.get(u) not in tgt_units:
            out.append(Violation("hom-units", (repr(u),),
                                 f"unit {u!r} is not mapped to a unit"))
    for a in src.arrows:
        img = hom.arrow_map.get(a)
        if img not in tgt_arrows:
            out.append(Violation("hom-arrows", (repr(a),), f"arrow {a!r} has no image"))
            continue
        if tgt.source[img] != hom.unit_map.get(src.source[a]) or \
           tgt.range_[img] != hom.unit_map.get(src.range_[a]):
            out.append(Violation("hom-endpoints", (repr(a),),
                                 f"image of {a!r} has incompatible source/range"))
        if src.is_unit_arrow(a) and not tgt.is_unit_arrow(img):
            out.append(Violation("hom-unit-arrows", (repr(a),),
                                 f"identity arrow {a!r} is not sent to an identity arrow"))
        if hom.arrow_map.get(src.inverse[a]) != tgt.inverse[img]:
            out.append(Violation("hom-inversion", (repr(a),),
                                 f"image of {a!r}^-1 is not the inverse of the image"))
    for (a, b), c in src.compose.items():
        fa, fb, fc = hom.arrow_map.get(a), hom.arrow_map.get(b), hom.arrow_map.get(c)
        if fa is None or fb is None or fc is None:
            continue
        img = tgt.compose.get((fa, fb))
        if img is None:
            if not tgt.truncated:
                out.append(Violation("hom-composition", (repr(a), repr(b)),
                                     f"images of ({a!r},{b!r}) are not composable"))
            continue
        if img != fc:
            out.append(Violation("hom-composition", (repr(a), repr(b)),
                                 f"hom does not preserve the composite of ({a!r},{b!r})"))
    return out


def _unit_profile(gpd: FiniteGroupoid, u) -> tuple:
    iso = gpd.isotropy(u)
    indeg = sum(1 for a in gpd.arrows if gpd.range_[a] == u)
    outdeg = sum(1 for a in gpd.arrows if gpd.source[a] == u)
    return (len(iso), indeg, outdeg)


def find_groupoid_isomorphism(a_gpd: FiniteGroupoid,
                              b_gpd: FiniteGroupoid) -> Optional[GroupoidHom]:
    """Search for an isomorphism by backtracking over unit and arrow
    assignments.  Exact (no truncated inputs); returns None when the
    groupoids are not isomorphic."""
    if a_gpd.truncated or b_gpd.truncated:
        raise TruncationError("isomorphism search needs complete composition tables")
    if len(a_gpd.units) != len(b_gpd.units) or len(a_gpd.arrows) != len(b_gpd.arrows):
        return None

    prof_a = {u: _unit_profile(a_gpd, u) for u in a_gpd.units}
    prof_b = {u: _unit_profile(b_gpd, u) for u in b_gpd.units}
    if sorted(prof_a.values()) != sorted(prof_b.values()):
        return None

    a_units = sorted(a_gpd.units, key=repr)
    b_units = sorted(b_gpd.units, key=repr)

    def arrows_between(gpd, u, v):
        return [x for x in gpd.arrows if gpd.source[x] == u and gpd.range_[x] == v]

    # pairs whose composite is a given arrow, so assigning the composite
    # after its factors still gets checked
    preimage: dict = {}
    for (x, y), p in a_gpd.compose.items():
        preimage.setdefault(p, []).append((x, y))

    def try_arrows(unit_map):
        a_arrows = sorted(a_gpd.arrows, key=repr)
        arrow_map: dict = {}
        used = set()

        def consistent(a, img):
            # endpoints
            if b_gpd.source[img] != unit_map[a_gpd.source[a]]:
                return False
            if b_gpd.range_[img] != unit_map[a_gpd.range_[a]]:
                return False
            if a_gpd.is_unit_arrow(a) != b_gpd.is_unit_arrow(img):
                return False
            inv_a = a_gpd.inverse[a]
            if inv_a in arrow_map and arrow_map[inv_a] != b_gpd.inverse[img]:
                return False
            # composition with everything already assigned (and with itself)
            pairs = [(a, c) for c in arrow_map] + [(c, a) for c in arrow_map] + [(a, a)]
            for x, y in pairs:
                fx = img if x == a else arrow_map[x]
                fy = img if y == a else arrow_map[y]
                p = a_gpd.compose.get((x, y))
                if p is None:
                    continue
                q = b_gpd.compose.get((fx, fy))
                if q is None:
                    return False
                if p == a:
                    if q != img:
                        return False
                elif p in arrow_map and arrow_map[p] != q:
                    return False
            for x, y in preimage.get(a, ()):
                fx = img if x == a else arrow_map.get(x)
                fy = img if y == a else arrow_map.get(y)
                if fx is None or fy is None:
                    continue
                if b_gpd.compose.get((fx, fy)) != img:
                    return False
            return True

        def rec(i):
            if i == len(a_arrows):
                return True
            a = a_arrows[i]
            if a in arrow_map:
                return rec(i + 1)
            cands = arrows_between(b_gpd, unit_map[a_gpd.source[a]],
                                   unit_map[a_gpd.range_[a]])
            for img in sorted(cands, key=repr):
                if img in used or not consistent(a, img):
                    continue
                inv_a, inv_img = a_gpd.inverse[a], b_gpd.inverse[img]
                if inv_a != a and (inv_img in used or inv_img == img):
                    continue
                if inv_a == a and inv_img != img:
                    continue
                arrow_map[a] = img
                used.add(img)
                extra = False
                if inv_a != a and inv_a not in arrow_map:
                    arrow_map[inv_a] = inv_img
                    used.add(inv_img)
                    extra = True
                if rec(i + 1):
                    return True
                del arrow_map[a]
                used.discard(img)
                if extra:
                    del arrow_map[inv_a]
                    used.discard(inv_img)
            return False

        for u in a_gpd.units:
            arrow_map[a_gpd.unit_arrow[u]] = b_gpd.unit_arrow[unit_map[u]]
            used.add(b_gpd.unit_arrow[unit_map[u]])
        if rec(0):
            return dict(arrow_map)
        return None

    def rec_units(i, unit_map, used):
        if i == len(a_units):
            result = try_arrows(unit_map)
            if result is not None:
                return GroupoidHom(a_gpd, b_gpd, dict(unit_map), result)
            return None
        u = a_units[i]
        for v in b_units:
            if v in used or prof_b[v] != prof_a[u]:
                continue
            unit_map[u] = v
            used.add(v)
            found = rec_units(i + 1, unit_map, used)
            if found is not None:
                return found
            del unit_map[u]
            used.discard(v)
        return None

    return rec_units(0, {}, set())


# ---------------------------------------------------------------------------
# export


def to_dot(gpd: FiniteGroupoid, name: str = "groupoid") -> str:
    """Deterministic DOT rendering: units as boxes, arrows as labelled
    edges from source to range."""
    def arrow_label(a):
        if gpd.payload is not None and a in gpd.payload:
            g, _ = gpd.payload[a]
            return g.group.format_element(g)
        return str(a)

    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=box];"]
    for u in sorted(gpd.units, key=str):
        lines.append(f'  "{u}";')
    edges = sorted(
        (str(gpd.source[a]), str(gpd.range_[a]), arrow_label(a)) for a in gpd.arrows
    )
    for s, r, lab in edges:
        lines.append(f'  "{s}" -> "{r}" [label="{lab}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
