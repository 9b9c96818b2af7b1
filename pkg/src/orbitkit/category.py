"""Orbit morphisms between partial dynamical systems.

A morphism (phi, a) carries points along phi and group elements along the
pointed cocycle a, subject to two conditions: equivariance
phi(g.x) = a(g,x).phi(x) (with phi(x) in the right domain), and the
cocycle identity a(g1 g2, x) = a(g1, g2.x) a(g2, x) wherever both sides
are supported.  Composition composes phi's and transports cocycles.

The functor to groupoids sends (phi, a) to the homomorphism
(g, x) |-> (a(g, x), phi(x)) between transformation groupoids; it is full
and faithful, which the test-suite checks by exhaustive enumeration on
small systems.  Continuous orbit equivalences enter as triples
(phi, a, b); when a is a cocycle and preserves essential stabilisers the
triple upgrades to an isomorphism.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from .errors import (EnumerationCap, HypothesisNotMet, InvalidStructure,
                     MapUndefined, TruncationError)
from .groups import FiniteGroup, GroupElement
from .groupoid import FiniteGroupoid, GroupoidHom, transformation_groupoid, validate_hom
from .pds import FinitePDS
from .reports import Violation

ENUM_MAX_POINTS = 4
ENUM_MAX_ORDER = 3


@dataclass
class OrbitMorphism:
    source: FinitePDS
    target: FinitePDS
    phi: Dict[object, object]
    a: Dict[Tuple[GroupElement, object], GroupElement]

    def supported_pairs(self):
        for g, pb in self.source.table.items():
            for x in pb.domain:
                yield g, x

    def __repr__(self):
        return f"OrbitMorphism({self.source!r} -> {self.target!r})"


def identity_morphism(pds: FinitePDS) -> OrbitMorphism:
    phi = {x: x for x in pds.space.points}
    a = {(g, x): g for g, x in _pairs_of(pds)}
    return OrbitMorphism(pds, pds, phi, a)


def _pairs_of(pds: FinitePDS):
    for g, pb in pds.table.items():
        for x in pb.domain:
            yield g, x


def _cocycle_triples(pds: FinitePDS):
    """Instances of the cocycle identity decidable from the stored table:
    ((g1 g2, x), (g1, g2.x), (g2, x)) triples."""
    for g1, g2 in itertools.product(pds.table, pds.table):
        prod = pds.group.multiply(g1, g2)
        pb_prod = pds.table.get(prod)
        if pb_prod is None:
            continue
        pb2 = pds.table[g2]
        for x in pb_prod.domain & pb2.domain:
            yield (prod, x), (g1, pb2(x)), (g2, x)


def validate_orbit_morphism(m: OrbitMorphism) -> List[Violation]:
    out = []
    src, tgt = m.source, m.target
    fmt_s = src.group.format_element
    fmt_t = tgt.group.format_element

    for x in src.space.points:
        y = m.phi.get(x)
        if y is None or y not in tgt.space:
            out.append(Violation("phi-total", (x,),
                                 f"phi undefined or out of range at {x!r}"))
    if any(v.rule == "phi-total" for v in out):
        return out

    pairs = set(_pairs_of(src))
    if set(m.a) != pairs:
        missing = pairs - set(m.a)
        extra = set(m.a) - pairs
        for g, x in sorted(missing, key=repr)[:8]:
            out.append(Violation("cocycle-domain", (fmt_s(g), x),
                                 f"a undefined on supported pair ({fmt_s(g)}, {x})"))
        for g, x in sorted(extra, key=repr)[:8]:
            out.append(Violation("cocycle-domain", (fmt_s(g), x),
                                 f"a defined on unsupported pair ({fmt_s(g)}, {x})"))
        return out

    e_s, e_t = src.group.identity(), tgt.group.identity()
    for g, x in pairs:
        h = m.a[(g, x)]
        tgt.group.check_element(h)
        if g == e_s and h != e_t:
            out.append(Violation("cocycle-identity", (x,),
                                 f"a(identity, {x}) is {fmt_t(h)}, not the identity"))
        y = m.phi[x]
        dom_h = tgt.map_of(h).domain
        if y not in dom_h:
            out.append(Violation("equivariance", (fmt_s(g), x),
                                 f"phi({x}) = {y} lies outside the domain of {fmt_t(h)}"))
            continue
        lhs = m.phi[src.table[g](x)]
        rhs = tgt.map_of(h)(y)
        if lhs != rhs:
            out.append(Violation("equivariance", (fmt_s(g), x),
                                 f"phi(g.{x}) = {lhs} but a(g,{x}).phi({x}) = {rhs}"))

    for p_prod, p1, p2 in _cocycle_triples(src):
        if p1 not in m.a:
            out.append(Violation("cocycle", (fmt_s(p_prod[0]), p_prod[1]),
                                 f"pair {p1!r} needed by the cocycle identity is unsupported"))
            continue
        lhs = m.a[p_prod]
        rhs = tgt.group.multiply(m.a[p1], m.a[p2])
        if lhs != rhs:
            out.append(Violation("cocycle", (fmt_s(p1[0]), fmt_s(p2[0]), p_prod[1]),
                                 f"a(g1 g2, x) = {fmt_t(lhs)} but a(g1, g2.x) a(g2, x) = {fmt_t(rhs)}"))
    return out


def compose(outer: OrbitMorphism, inner: OrbitMorphism) -> OrbitMorphism:
    """outer after inner."""
    if inner.target is not outer.source and inner.target != outer.source:
        raise InvalidStructure("morphisms are not composable")
    phi = {x: outer.phi[inner.phi[x]] for x in inner.source.space.points}
    a = {}
    for (g, x), h in inner.a.items():
        mid = (h, inner.phi[x])
        if mid not in outer.a:
            raise MapUndefined(f"outer cocycle undefined on {mid!r}")
        a[(g, x)] = outer.a[mid]
    return OrbitMorphism(inner.source, outer.target, phi, a)


# ---------------------------------------------------------------------------
# the functor to transformation groupoids


def functor_apply(m: OrbitMorphism,
                  src_gpd: Optional[FiniteGroupoid] = None,
                  tgt_gpd: Optional[FiniteGroupoid] = None) -> GroupoidHom:
    """(phi, a)  |->  the homomorphism (g, x) -> (a(g, x), phi(x))."""
    src_gpd = src_gpd if src_gpd is not None else transformation_groupoid(m.source)
    tgt_gpd = tgt_gpd if tgt_gpd is not None else transformation_groupoid(m.target)
    unit_map = dict(m.phi)
    arrow_map = {}
    tgt_arrows = set(tgt_gpd.arrows)
    for arrow in src_gpd.arrows:
        g, x = arrow
        img = (m.a[(g, x)], m.phi[x])
        if img not in tgt_arrows:
            raise InvalidStructure(f"image arrow {img!r} does not exist; "
                                   f"morphism fails its domain condition")
        arrow_map[arrow] = img
    return GroupoidHom(src_gpd, tgt_gpd, unit_map, arrow_map)


def functor_invert(hom: GroupoidHom, source: FinitePDS, target: FinitePDS) -> OrbitMorphism:
    """Recover (phi, a) from a homomorphism of transformation groupoids:
    phi is the unit map, a reads off the group coordinate of each image."""
    if hom.source.payload is None or hom.target.payload is None:
        raise InvalidStructure("both groupoids must carry action payloads")
    bad = validate_hom(hom)
    if bad:
        raise InvalidStructure(f"not a groupoid homomorphism: {bad[0].message}")
    phi = dict(hom.unit_map)
    a = {}
    for arrow, img in hom.arrow_map.items():
        g, x = hom.source.payload[arrow]
        h, _ = hom.target.payload[img]
        a[(g, x)] = h
    return OrbitMorphism(source, target, phi, a)


# ---------------------------------------------------------------------------
# isomorphisms


@dataclass
class IsoCheck:
    ok: bool
    violations: List[Violation] = field(default_factory=list)


def is_isomorphism(m: OrbitMorphism) -> IsoCheck:
    """A morphism is invertible iff phi is a bijection and every restriction
    a(., x): G_x -> H_phi(x) is a bijection.  Exact answers need complete
    tables, so truncated systems are refused."""
    if m.source.truncated or m.target.truncated:
        raise TruncationError("isomorphism check needs untruncated systems")
    out = list(validate_orbit_morphism(m))
    if out:
        return IsoCheck(False, out)
    src, tgt = m.source, m.target
    if len(set(m.phi.values())) != len(src.space.points) or \
            set(m.phi.values()) != set(tgt.space.points):
        out.append(Violation("phi-bijective", (),
                             "phi is not a bijection onto the target space"))
    for x in src.space.points:
        gx = src.element_set(x).elements
        hy = tgt.element_set(m.phi[x]).elements
        images = [m.a[(g, x)] for g in sorted(gx, key=repr)]
        if len(set(images)) != len(images):
            out.append(Violation("cocycle-injective", (x,),
                                 f"a(., {x}) is not injective on G_{x}"))
        if set(images) != hy:
            out.append(Violation("cocycle-onto", (x,),
                                 f"a(., {x}) does not map G_{x} onto the target fibre"))
    return IsoCheck(not out, out)


def invert_isomorphism(m: OrbitMorphism) -> OrbitMorphism:
    chk = is_isomorphism(m)
    if not chk.ok:
        raise InvalidStructure(f"not an isomorphism: {chk.violations[0].message}")
    phi_inv = {y: x for x, y in m.phi.items()}
    b = {}
    for (h, y) in _pairs_of(m.target):
        x = phi_inv[y]
        for g in m.source.element_set(x).elements:
            if m.a[(g, x)] == h:
                b[(h, y)] = g
                break
    return OrbitMorphism(m.target, m.source, phi_inv, b)


# ---------------------------------------------------------------------------
# continuous orbit equivalence


@dataclass
class COETriple:
    """A bijection phi with transport data in both directions:
    phi(g.x) = a(g,x).phi(x) and phi^-1(h.y) = b(h,y).phi^-1(y).
    Neither a nor b is assumed to be a cocycle."""

    source: FinitePDS
    target: FinitePDS
    phi: Dict[object, object]
    a: Dict[Tuple[GroupElement, object], GroupElement]
    b: Dict[Tuple[GroupElement, object], GroupElement]


@dataclass
class COEReport:
    violations: List[Violation] = field(default_factory=list)
    a_is_cocycle: bool = True
    b_is_cocycle: bool = True

    @property
    def ok(self) -> bool:
        return not self.violations


def _phi_inverse(t: COETriple) -> Dict[object, object]:
    if len(set(t.phi.values())) != len(t.source.space.points) or \
            set(t.phi.values()) != set(t.target.space.points) or \
            set(t.phi) != set(t.source.space.points):
        raise InvalidStructure("phi of a continuous orbit equivalence must be a bijection")
    return {y: x for x, y in t.phi.items()}


def _cocycle_holds(pds: FinitePDS, table, other_group) -> bool:
    for p_prod, p1, p2 in _cocycle_triples(pds):
        if p_prod not in table or p1 not in table or p2 not in table:
            return False
        if table[p_prod] != other_group.multiply(table[p1], table[p2]):
            return False
    return True


def validate_coe(t: COETriple) -> COEReport:
    rep = COEReport()
    phi_inv = _phi_inverse(t)
    src, tgt = t.source, t.target
    fmt_s, fmt_t = src.group.format_element, tgt.group.format_element

    for g, x in _pairs_of(src):
        h = t.a.get((g, x))
        if h is None:
            rep.violations.append(Violation("coe-forward", (fmt_s(g), x),
                                            f"a undefined on supported pair ({fmt_s(g)}, {x})"))
            continue
        y = t.phi[x]
        if y not in tgt.map_of(h).domain or tgt.map_of(h)(y) != t.phi[src.table[g](x)]:
            rep.violations.append(Violation(
                "coe-forward", (fmt_s(g), x),
                f"phi(g.x) != a(g,x).phi(x) at (g,x) = ({fmt_s(g)}, {x})"))
    for h, y in _pairs_of(tgt):
        g = t.b.get((h, y))
        if g is None:
            rep.violations.append(Violation("coe-backward", (fmt_t(h), y),
                                            f"b undefined on supported pair ({fmt_t(h)}, {y})"))
            continue
        x = phi_inv[y]
        if x not in src.map_of(g).domain or src.map_of(g)(x) != phi_inv[tgt.table[h](y)]:
            rep.violations.append(Violation(
                "coe-backward", (fmt_t(h), y),
                f"phi^-1(h.y) != b(h,y).phi^-1(y) at (h,y) = ({fmt_t(h)}, {y})"))

    rep.a_is_cocycle = _cocycle_holds(src, t.a, tgt.group)
    rep.b_is_cocycle = _cocycle_holds(tgt, t.b, src.group)
    return rep


def check_preserves_stabilisers(t: COETriple, essential: bool = True) -> List[Violation]:
    """Does a(., x) restrict to a bijection from the (essential) stabiliser
    of x onto the (essential) stabiliser of phi(x), for every x?"""
    out = []
    src, tgt = t.source, t.target
    pick = (lambda s, p: s.essential_stabiliser(p)) if essential else (lambda s, p: s.stabiliser(p))
    for x in src.space.points:
        s_set = pick(src, x).elements
        y = t.phi[x]
        t_set = pick(tgt, y).elements
        images = []
        for g in sorted(s_set, key=repr):
            h = t.a.get((g, x))
            if h is None:
                out.append(Violation("stabiliser-domain", (x,),
                                     f"a undefined on stabiliser pair at {x!r}"))
                continue
            images.append(h)
        kind = "essential stabiliser" if essential else "stabiliser"
        if len(set(images)) != len(images):
            out.append(Violation("stabiliser-injective", (x,),
                                 f"a(., {x}) is not injective on the {kind}"))
        if set(images) != t_set:
            out.append(Violation("stabiliser-onto", (x,),
                                 f"a(., {x}) does not map the {kind} of {x!r} "
                                 f"onto that of {y!r}"))
    return out


def coe_to_isomorphism(t: COETriple, essential: bool = True) -> OrbitMorphism:
    """Upgrade a continuous orbit equivalence whose a is a cocycle and
    preserves (essential) stabilisers to an isomorphism (phi, a).  Raises
    HypothesisNotMet naming whichever hypothesis fails."""
    rep = validate_coe(t)
    if rep.violations:
        raise HypothesisNotMet("continuous orbit equivalence equations",
                               rep.violations[0].message)
    if not rep.a_is_cocycle:
        raise HypothesisNotMet("cocycle property of a")
    bad = check_preserves_stabilisers(t, essential=essential)
    if bad:
        name = ("essential stabiliser preservation" if essential
                else "stabiliser preservation")
        raise HypothesisNotMet(name, bad[0].message)
    m = OrbitMorphism(t.source, t.target, dict(t.phi), dict(t.a))
    chk = is_isomorphism(m)
    if not chk.ok:
        raise InvalidStructure(
            f"hypotheses hold but the morphism failed invertibility: "
            f"{chk.violations[0].message}")
    return m


# ---------------------------------------------------------------------------
# exhaustive enumeration (small systems only)


def _check_enum_caps(pds: FinitePDS):
    if len(pds.space) > ENUM_MAX_POINTS:
        raise EnumerationCap(f"enumeration capped at {ENUM_MAX_POINTS} points")
    if not isinstance(pds.group, FiniteGroup) or pds.group.order > ENUM_MAX_ORDER:
        raise EnumerationCap(f"enumeration needs a finite group of order <= {ENUM_MAX_ORDER}")


def enumerate_orbit_morphisms(src: FinitePDS, tgt: FinitePDS) -> Iterator[OrbitMorphism]:
    """All orbit morphisms src -> tgt, by backtracking over phi and then
    over cocycle values constrained by equivariance and the cocycle
    identity.  Hard-capped to at most 4 points and group order 3."""
    _check_enum_caps(src)
    _check_enum_caps(tgt)
    xs = list(src.space.points)
    h_elems = tgt.group.elements()
    e_s, e_t = src.group.identity(), tgt.group.identity()
    pairs = sorted(_pairs_of(src), key=repr)
    triples = list(_cocycle_triples(src))

    for image in itertools.product(tgt.space.points, repeat=len(xs)):
        phi = dict(zip(xs, image))
        cands = {}
        feasible = True
        for g, x in pairs:
            if g == e_s:
                cands[(g, x)] = [e_t]
                continue
            y = phi[x]
            gx = src.table[g](x)
            ok = [h for h in h_elems
                  if y in tgt.map_of(h).domain and tgt.map_of(h)(y) == phi[gx]]
            if not ok:
                feasible = False
                break
            cands[(g, x)] = ok
        if not feasible:
            continue

        by_pair = {}
        for tri in triples:
            for p in tri:
                by_pair.setdefault(p, []).append(tri)

        a: dict = {}

        def rec(i):
            if i == len(pairs):
                yield OrbitMorphism(src, tgt, dict(phi), dict(a))
                return
            p = pairs[i]
            for h in cands[p]:
                a[p] = h
                good = True
                for (pp, p1, p2) in by_pair.get(p, ()):
                    if pp in a and p1 in a and p2 in a:
                        if a[pp] != tgt.group.multiply(a[p1], a[p2]):
                            good = False
                            break
                if good:
                    yield from rec(i + 1)
                del a[p]

        yield from rec(0)


def enumerate_groupoid_homs(src: FiniteGroupoid, tgt: FiniteGroupoid) -> Iterator[GroupoidHom]:
    """All groupoid homomorphisms src -> tgt (small inputs).  Backtracks
    over a unit map and then arrow images with endpoint, inverse and
    composition constraints checked incrementally."""
    if len(src.units) > ENUM_MAX_POINTS or len(tgt.units) > ENUM_MAX_POINTS:
        raise EnumerationCap(f"enumeration capped at {ENUM_MAX_POINTS} units")
    if len(src.arrows) > 16 or len(tgt.arrows) > 16:
        raise EnumerationCap("enumeration capped at 16 arrows")
    if src.truncated or tgt.truncated:
        raise TruncationError("hom enumeration needs complete composition tables")

    src_units = list(src.units)
    arrows = sorted((a for a in src.arrows), key=repr)
    by_endpoints: Dict[tuple, list] = {}
    for b in tgt.arrows:
        by_endpoints.setdefault((tgt.source[b], tgt.range_[b]), []).append(b)
    preimage: Dict[object, list] = {}
    for (x, y), p in src.compose.items():
        preimage.setdefault(p, []).append((x, y))

    for image in itertools.product(tgt.units, repeat=len(src_units)):
        unit_map = dict(zip(src_units, image))
        arrow_map: dict = {}
        for u in src_units:
            arrow_map[src.unit_arrow[u]] = tgt.unit_arrow[unit_map[u]]

        def consistent(a, img):
            inv_a = src.inverse[a]
            if inv_a in arrow_map and arrow_map[inv_a] != tgt.inverse[img]:
                return False
            pairs = [(a, c) for c in list(arrow_map)] + [(c, a) for c in list(arrow_map)] + [(a, a)]
            for x, y in pairs:
                p = src.compose.get((x, y))
                if p is None:
                    continue
                fx = img if x == a else arrow_map[x]
                fy = img if y == a else arrow_map[y]
                q = tgt.compose.get((fx, fy))
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
                if tgt.compose.get((fx, fy)) != img:
                    return False
            return True

        def rec(i):
            if i == len(arrows):
                yield GroupoidHom(src, tgt, dict(unit_map), dict(arrow_map))
                return
            a = arrows[i]
            if a in arrow_map:
                yield from rec(i + 1)
                return
            key = (unit_map[src.source[a]], unit_map[src.range_[a]])
            for img in sorted(by_endpoints.get(key, ()), key=repr):
                if not consistent(a, img):
                    continue
                inv_a = src.inverse[a]
                added_inv = False
                arrow_map[a] = img
                if inv_a != a and inv_a not in arrow_map:
                    # the forced inverse image needs its own consistency
                    # pass; compositions producing inv_a are checked nowhere
                    # else once it enters the map
                    if not consistent(inv_a, tgt.inverse[img]):
                        del arrow_map[a]
                        continue
                    arrow_map[inv_a] = tgt.inverse[img]
                    added_inv = True
                yield from rec(i + 1)
                del arrow_map[a]
                if added_inv:
                    del arrow_map[inv_a]

        yield from rec(0)
