"""Partial actions of a group on a finite discrete space.

A system stores, for finitely many group elements g, a partial bijection
phi_g from U_{g^-1} onto U_g.  Two storage modes:

  explicit   -- the table is the whole system; U_g is empty for every
                element not stored.  Finite groups always fit this mode.
  generated  -- the system is the semi-saturated extension of generator
                partial bijections over a free group or the integers,
                tabulated out to a word-length bound.  Answers that
                quantify over the whole group are flagged as truncated.

The validator checks the partial-action axioms in both equivalent shapes
(the g2.(U ... ) set equation together with pointwise compatibility of
composites, and the g1.(U_{g1^-1} /\\ U_{g2}) form) so a bug in one
transcription cannot hide in the other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, Optional

from .errors import KindError, UnknownPoint
from .groups import (FiniteGroup, FreeGroup, GroupDescriptor, GroupElement,
                     Integers, length)
from .reports import Violation


@dataclass(frozen=True)
class FiniteSpace:
    """An ordered finite set of named points."""

    points: tuple

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise ValueError("duplicate point names")
        for p in self.points:
            if not isinstance(p, str) or not p:
                raise ValueError(f"bad point name {p!r}")

    def __contains__(self, p) -> bool:
        return p in self.points

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


class PartialBijection:
    """A finite injective partial map between point sets."""

    __slots__ = ("_map", "_hash")

    def __init__(self, mapping):
        if isinstance(mapping, PartialBijection):
            mapping = mapping._map
        m = dict(mapping)
        if len(set(m.values())) != len(m):
            raise ValueError(f"not injective: {sorted(m.items())}")
        self._map = m
        self._hash = hash(frozenset(m.items()))

    @classmethod
    def identity_on(cls, points: Iterable) -> "PartialBijection":
        return cls({p: p for p in points})

    @classmethod
    def empty(cls) -> "PartialBijection":
        return cls({})

    @property
    def domain(self) -> frozenset:
        return frozenset(self._map)

    @property
    def image(self) -> frozenset:
        return frozenset(self._map.values())

    def get(self, x):
        return self._map.get(x)

    def __call__(self, x):
        return self._map[x]

    def __contains__(self, x):
        return x in self._map

    def items(self):
        return sorted(self._map.items())

    def __len__(self):
        return len(self._map)

    def inverse(self) -> "PartialBijection":
        return PartialBijection({y: x for x, y in self._map.items()})

    def compose(self, other: "PartialBijection") -> "PartialBijection":
        """self after other, on the largest domain where that makes sense."""
        return PartialBijection({
            x: self._map[y]
            for x, y in other._map.items() if y in self._map
        })

    def restrict(self, points) -> "PartialBijection":
        keep = set(points)
        return PartialBijection({x: y for x, y in self._map.items()
                                 if x in keep and y in keep})

    def __eq__(self, other):
        return isinstance(other, PartialBijection) and self._map == other._map

    def __hash__(self):
        return self._hash

    def __repr__(self):
        inside = ", ".join(f"{x}->{y}" for x, y in self.items())
        return f"PartialBijection({{{inside}}})"


@dataclass(frozen=True)
class GroupSubset:
    """A finite set of group elements, with a flag recording whether it was
    computed under a word-length truncation and may therefore be a proper
    subset of the true answer."""

    elements: frozenset
    truncated: bool

    def sorted_elements(self) -> list:
        return sorted(self.elements, key=lambda g: (str(g.group.kind), str(g.value)))

    def __contains__(self, g):
        return g in self.elements

    def __len__(self):
        return len(self.elements)


class FinitePDS:
    """A partial action tabulated over finitely many group elements."""

    def __init__(self, space: FiniteSpace, group: GroupDescriptor,
                 table: Dict[GroupElement, PartialBijection], mode: str,
                 generators: Optional[dict] = None, bound: Optional[int] = None):
        if mode not in ("explicit", "generated"):
            raise ValueError(f"unknown mode {mode!r}")
        if mode == "generated":
            if bound is None or bound < 0:
                raise ValueError("generated mode needs a bound >= 0")
            if generators is None:
                raise ValueError("generated mode needs generator maps")
            if not isinstance(group, (FreeGroup, Integers)):
                raise KindError("generated mode needs a free group or the integers")
        self.space = space
        self.group = group
        self.table = dict(table)
        self.mode = mode
        self.generators = dict(generators) if generators else None
        self.bound = bound
        for g, pb in self.table.items():
            group.check_element(g)
            stray = (pb.domain | pb.image) - set(space.points)
            if stray:
                raise UnknownPoint(f"map of {group.format_element(g)} touches "
                                   f"unknown points {sorted(stray)}")

    # -- construction -------------------------------------------------------

    @classmethod
    def explicit(cls, space: FiniteSpace, group: GroupDescriptor,
                 table: Dict[GroupElement, PartialBijection]) -> "FinitePDS":
        """Explicit system; the identity map and missing inverses are filled
        in automatically.  Empty partial bijections are kept: an element with
        empty U_g is still part of the support."""
        full = dict(table)
        e = group.identity()
        if e not in full:
            full[e] = PartialBijection.identity_on(space.points)
        for g in list(full):
            gi = group.inverse(g)
            if gi not in full:
                full[gi] = full[g].inverse()
        return cls(space, group, full, "explicit")

    @property
    def truncated(self) -> bool:
        return self.mode == "generated"

    def support(self):
        return self.table.keys()

    def domain_of(self, g: GroupElement) -> frozenset:
        """U_{g^-1}, the domain of phi_g.  Empty for unsupported g."""
        pb = self.table.get(g)
        return pb.domain if pb is not None else frozenset()

    def image_of(self, g: GroupElement) -> frozenset:
        """U_g, the image of phi_g.  Empty for unsupported g."""
        pb = self.table.get(g)
        return pb.image if pb is not None else frozenset()

    def map_of(self, g: GroupElement) -> PartialBijection:
        pb = self.table.get(g)
        if pb is None:
            if self.mode == "generated":
                return self._word_map(g)
            return PartialBijection.empty()
        return pb

    def _word_map(self, g: GroupElement) -> PartialBijection:
        """Exact map of an arbitrary element of a generated system, composed
        from the generator maps along the reduced spelling."""
        if isinstance(self.group, Integers):
            step = self.generators["1"]
            n = g.value
            pb = step if n >= 0 else step.inverse()
            out = PartialBijection.identity_on(self.space.points)
            for _ in range(abs(n)):
                out = pb.compose(out)
            return out
        assert isinstance(self.group, FreeGroup)
        out = PartialBijection.identity_on(self.space.points)
        for s in g.value:  # phi_(w.l) = phi_w o phi_l, so fold letters from the left
            sym = self.group.symbol_of(s)
            gen = self.generators.get(sym, PartialBijection.empty())
            step = gen if s > 0 else gen.inverse()
            out = out.compose(step)
        return out

    # -- the action ---------------------------------------------------------

    def act(self, g: GroupElement, x):
        """g.x, or None when x is outside U_{g^-1}."""
        self.group.check_element(g)
        if x not in self.space:
            raise UnknownPoint(f"unknown point {x!r}")
        return self.map_of(g).get(x)

    def element_set(self, x) -> GroupSubset:
        """G_x: stored elements g with x in U_{g^-1}."""
        if x not in self.space:
            raise UnknownPoint(f"unknown point {x!r}")
        found = frozenset(g for g, pb in self.table.items() if x in pb.domain)
        return GroupSubset(found, self.truncated)

    def stabiliser(self, x) -> GroupSubset:
        """Elements of G_x with g.x = x."""
        if x not in self.space:
            raise UnknownPoint(f"unknown point {x!r}")
        found = frozenset(g for g, pb in self.table.items() if pb.get(x) == x)
        return GroupSubset(found, self.truncated)

    def essential_stabiliser(self, x) -> GroupSubset:
        """Germ-level stabiliser.  Every point of a finite discrete space is
        isolated (the singleton is an open neighbourhood), so the germ
        condition is no condition and this coincides with stabiliser()."""
        return self.stabiliser(x)

    # -- misc ---------------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, FinitePDS)
                and self.space == other.space and self.group == other.group
                and self.table == other.table and self.mode == other.mode
                and self.generators == other.generators and self.bound == other.bound)

    def __repr__(self):
        return (f"FinitePDS({len(self.space)} points, kind {self.group.kind}, "
                f"{len(self.table)} elements, {self.mode})")


def extend_semi_saturated(space: FiniteSpace, group: GroupDescriptor,
                          generators: Dict[str, PartialBijection],
                          bound: int) -> FinitePDS:
    """Semi-saturated extension of generator partial bijections, tabulated on
    all reduced words of length at most `bound` (for the integers: |n| <=
    bound).  phi_w is the composite of generator maps along the reduced
    spelling of w, so words whose spelling lengths add compose on the nose.
    """
    if bound < 0:
        raise ValueError("bound must be >= 0")
    for sym, pb in generators.items():
        stray = (pb.domain | pb.image) - set(space.points)
        if stray:
            raise UnknownPoint(f"generator {sym!r} touches unknown points {sorted(stray)}")

    table: Dict[GroupElement, PartialBijection] = {}
    if isinstance(group, Integers):
        if set(generators) != {"1"}:
            raise ValueError('integer systems take a single generator named "1"')
        step = generators["1"]
        table[group.identity()] = PartialBijection.identity_on(space.points)
        fwd = PartialBijection.identity_on(space.points)
        for n in range(1, bound + 1):
            fwd = step.compose(fwd)
            table[group.element(n)] = fwd
            table[group.element(-n)] = fwd.inverse()
    elif isinstance(group, FreeGroup):
        unknown = set(generators) - set(group.alphabet)
        if unknown:
            raise ValueError(f"generator symbols {sorted(unknown)} not in alphabet")
        steps = {}
        for i, sym in enumerate(group.alphabet):
            gen = generators.get(sym, PartialBijection.empty())
            steps[i + 1] = gen
            steps[-(i + 1)] = gen.inverse()
        table[group.identity()] = PartialBijection.identity_on(space.points)
        frontier = [()]
        for _ in range(bound):
            nxt = []
            for word in frontier:
                for letter, step in steps.items():
                    if word and word[-1] == -letter:
                        continue
                    new = word + (letter,)
                    table[GroupElement(group, new)] = table[GroupElement(group, word)].compose(step)
                    nxt.append(new)
            frontier = nxt
    else:
        raise KindError(f"semi-saturated extension needs free or integer kind, got {group.kind!r}")
    return FinitePDS(space, group, table, "generated", generators=generators, bound=bound)


# ---------------------------------------------------------------------------
# validation


def _fmt(pds: FinitePDS, g: GroupElement) -> str:
    return pds.group.format_element(g)


def _checked_pairs(pds: FinitePDS):
    """Ordered pairs (g1, g2) the axioms are checked on, with the product.
    In generated mode only pairs whose product stays inside the bound are
    decidable from the table; the rest are skipped."""
    support = list(pds.table)
    for g1, g2 in itertools.product(support, support):
        prod = pds.group.multiply(g1, g2)
        if pds.mode == "generated" and prod not in pds.table:
            continue
        yield g1, g2, prod


def validate(pds: FinitePDS):
    """Check the partial-action axioms; returns a list of violations (empty
    iff the stored table is a genuine partial action on its support)."""
    out = []
    group, space = pds.group, pds.space
    e = group.identity()

    pb_e = pds.table.get(e)
    if pb_e is None:
        out.append(Violation("identity-map", (), "identity element missing from support"))
    elif pb_e != PartialBijection.identity_on(space.points):
        out.append(Violation("identity-map", (),
                             "the identity must act as the identity map on the whole space"))

    for g in pds.table:
        gi = group.inverse(g)
        if gi not in pds.table:
            out.append(Violation("inverse-closure", (_fmt(pds, g),),
                                 f"support lacks the inverse of {_fmt(pds, g)}"))
        elif pds.table[gi] != pds.table[g].inverse():
            out.append(Violation("inverse-map", (_fmt(pds, g),),
                                 f"map of {_fmt(pds, gi)} is not the inverse of the map of {_fmt(pds, g)}"))

    for g1, g2, prod in _checked_pairs(pds):
        pb1, pb2 = pds.table[g1], pds.table[g2]
        pb_prod = pds.table.get(prod)
        dom_prod = pb_prod.domain if pb_prod is not None else frozenset()
        u_g1 = pb1.image
        u_g2 = pb2.image
        u_g1_inv = pb1.domain   # U_{g1^-1}
        u_g2_inv = pb2.domain
        w = (_fmt(pds, g1), _fmt(pds, g2))

        # shape 1: g2.(U_{(g1 g2)^-1} /\ U_{g2^-1}) = U_{g2} /\ U_{g1^-1}
        lhs = frozenset(pb2(x) for x in (dom_prod & u_g2_inv))
        rhs = u_g2 & u_g1_inv
        if lhs != rhs:
            out.append(Violation("domain-overlap", w,
                                 f"g2.(U_((g1 g2)^-1) & U_(g2^-1)) = {sorted(lhs)} "
                                 f"but U_(g2) & U_(g1^-1) = {sorted(rhs)}"))

        # pointwise: (g1 g2).x = g1.(g2.x) on U_{g2^-1} /\ U_{(g1 g2)^-1}
        for x in sorted(dom_prod & u_g2_inv):
            mid = pb2(x)
            if mid not in pb1.domain:
                out.append(Violation("composition", w + (x,),
                                     f"g2.{x} = {mid} falls outside U_(g1^-1)"))
            elif pb_prod(x) != pb1(mid):
                out.append(Violation("composition", w + (x,),
                                     f"(g1 g2).{x} = {pb_prod(x)} but g1.(g2.{x}) = {pb1(mid)}"))

        # shape 2: g1.(U_{g1^-1} /\ U_{g2}) = U_{g1} /\ U_{g1 g2}
        img_prod = pb_prod.image if pb_prod is not None else frozenset()
        lhs2 = frozenset(pb1(x) for x in (u_g1_inv & u_g2))
        rhs2 = u_g1 & img_prod
        if lhs2 != rhs2:
            out.append(Violation("domain-overlap-alt", w,
                                 f"g1.(U_(g1^-1) & U_(g2)) = {sorted(lhs2)} "
                                 f"but U_(g1) & U_(g1 g2) = {sorted(rhs2)}"))

    if pds.mode == "explicit":
        # pairs whose product falls outside the support: both axiom shapes
        # then force the overlap to be empty
        support = list(pds.table)
        for g1, g2 in itertools.product(support, support):
            prod = group.multiply(g1, g2)
            if prod in pds.table:
                continue
            overlap = pds.table[g2].image & pds.table[g1].domain
            if overlap:
                out.append(Violation(
                    "unsupported-product", (_fmt(pds, g1), _fmt(pds, g2)),
                    f"product {_fmt(pds, prod)} is outside the support, yet "
                    f"U_(g2) & U_(g1^-1) = {sorted(overlap)} is nonempty"))
    return out
