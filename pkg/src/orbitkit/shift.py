"""The path-space partial action and its arrow groupoid.

The free group on the edge alphabet acts partially on the boundary of a
finite graph: an edge prepends itself, its inverse strips it, and a
reduced word acts nontrivially only when it factors as alpha beta^-1
with alpha, beta positive.  Arrows between boundary points are triples
(y, k, x) with sigma^m y = sigma^n x and k = m - n; the pair (m, n) is a
witness, carried along but ignored by equality.

Everything here is exact on canonically represented boundary points.
Groupoids are materialised only in truncated form (bounded witnesses,
bounded representations); finite systems induced on a depth-bounded
piece of the boundary reuse the generic partial-action machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import InvalidStructure, MapUndefined
from .graphs import FiniteGraph
from .groups import (FreeGroup, GroupElement, factor_positive, length_cocycle,
                     positive_letters)
from .groupoid import FiniteGroupoid
from .paths import (BoundaryPath, EvPeriodic, FinitePath, enumerate_boundary,
                    format_boundary, shift_n, sort_key)
from .pds import FinitePDS, FiniteSpace, PartialBijection, extend_semi_saturated


def edge_group(graph: FiniteGraph) -> FreeGroup:
    """The free group on the edge names of the graph."""
    return FreeGroup(tuple(str(e) for e in graph.edges))


def _edge_lookup(graph: FiniteGraph) -> Dict[str, object]:
    table = {str(e): e for e in graph.edges}
    if len(table) != len(graph.edges):
        raise InvalidStructure("edge names collide as strings")
    return table


def act_word(g: GroupElement, x: BoundaryPath) -> Optional[BoundaryPath]:
    """Apply a reduced word to a boundary path; None when x is outside the
    domain.  Only alpha beta^-1 shaped words act anywhere."""
    fp = factor_positive(g)
    if fp is None:
        return None
    alpha, beta = fp
    lookup = _edge_lookup(x.graph)
    alpha_edges = tuple(lookup[s] for s in positive_letters(alpha))
    beta_edges = tuple(lookup[s] for s in positive_letters(beta))
    if not x.has_prefix(beta_edges):
        return None
    y = shift_n(x, len(beta_edges))
    try:
        return y.prepend(alpha_edges)
    except (MapUndefined, InvalidStructure):
        return None


@dataclass(frozen=True)
class DRArrow:
    """(target, k, source): sigma^m target = sigma^n source with k = m - n.
    The witness (m, n) is bookkeeping; arrows are equal iff the triples are."""

    target: BoundaryPath
    k: int
    source: BoundaryPath
    witness: Tuple[int, int] = field(compare=False)

    def __post_init__(self):
        m, n = self.witness
        if m < 0 or n < 0 or m - n != self.k:
            raise InvalidStructure(f"witness {self.witness!r} does not certify k={self.k}")
        if shift_n(self.target, m) != shift_n(self.source, n):
            raise InvalidStructure(
                f"sigma^{m}(target) != sigma^{n}(source); not an arrow")

    def __repr__(self):
        return (f"DRArrow({format_boundary(self.target)}, {self.k}, "
                f"{format_boundary(self.source)})")


def unit_dr(x: BoundaryPath) -> DRArrow:
    return DRArrow(x, 0, x, (0, 0))


def inverse_dr(a: DRArrow) -> DRArrow:
    m, n = a.witness
    return DRArrow(a.source, -a.k, a.target, (n, m))


def compose_dr(a: DRArrow, b: DRArrow) -> DRArrow:
    """a o b, travelling b first."""
    if a.source != b.target:
        raise MapUndefined("arrows are not composable")
    ma, na = a.witness
    mb, nb = b.witness
    t = max(na, mb)
    return DRArrow(a.target, a.k + b.k, b.source, (ma + t - na, nb + t - mb))


def xi(g: GroupElement, x: BoundaryPath) -> DRArrow:
    """The arrow of the path-space action at (g, x): (g.x, |alpha|-|beta|, x)
    with witness (|alpha|, |beta|)."""
    fp = factor_positive(g)
    if fp is None:
        raise MapUndefined(f"{g.group.format_element(g)} acts nowhere")
    alpha, beta = fp
    y = act_word(g, x)
    if y is None:
        raise MapUndefined(f"point outside the domain of {g.group.format_element(g)}")
    return DRArrow(y, len(alpha.value) - len(beta.value), x,
                   (len(alpha.value), len(beta.value)))


def xi_inverse(group: FreeGroup, a: DRArrow) -> GroupElement:
    """A word alpha beta^-1 carrying a.source to a.target along the witness:
    alpha the first m edges of the target, beta the first n of the source.
    Common tails cancel in the reduced product."""
    m, n = a.witness
    alpha = group.word([str(e) for e in a.target.first_edges(m)])
    beta = group.word([str(e) for e in a.source.first_edges(n)])
    return group.multiply(alpha, group.inverse(beta))


def isotropy_decompose(a: DRArrow) -> Tuple[tuple, tuple]:
    """Write the base point of an isotropy arrow as delta . gamma^inf with
    |gamma| = |k|: returns (delta, gamma) as edge tuples.  The sign of k
    records the travel direction; k = 0 gives two empty tuples."""
    if a.source != a.target:
        raise MapUndefined("not an isotropy arrow")
    if a.k == 0:
        return (), ()
    if a.k < 0:
        return isotropy_decompose(inverse_dr(a))
    m, n = a.witness
    edges = a.source.first_edges(m)
    return edges[:n], edges[n:]


def stab_min(x: BoundaryPath):
    """Least positive k with (x, k, x) an arrow; math.inf when none exists.
    In canonical form that is the primitive cycle length."""
    if isinstance(x, FinitePath):
        return math.inf
    return len(x.cycle)


def stab_min_ess(x: BoundaryPath):
    """Least positive k whose isotropy arrow at x persists on a whole
    neighbourhood.  The arrow of the cycle survives iff the cycle is the
    only continuation wherever it passes: every vertex on it has exactly
    one outgoing edge.  Otherwise a branching point arbitrarily close to
    x breaks the identification and the essential value is infinite."""
    if isinstance(x, FinitePath):
        return math.inf
    g = x.graph
    for e in x.cycle:
        if len(g.continuations(g.r(e))) != 1:
            return math.inf
    return len(x.cycle)


# ---------------------------------------------------------------------------
# truncated arrow groupoid


def truncated_dr_groupoid(graph: FiniteGraph, depth: int,
                          k_cap: Optional[int] = None,
                          witness_cap: Optional[int] = None,
                          cycle_cap: Optional[int] = None) -> FiniteGroupoid:
    """The arrows between boundary points representable at the given depth,
    with |k| <= k_cap and witnesses within witness_cap, as a truncated
    groupoid.  Each arrow carries its minimal witness."""
    if witness_cap is None:
        witness_cap = depth + max(1, len(graph.edges))
    if k_cap is None:
        k_cap = witness_cap
    units = enumerate_boundary(graph, depth, cycle_cap)
    shifts: Dict[BoundaryPath, list] = {}
    for x in units:
        row = [x]
        for _ in range(witness_cap):
            cur = row[-1]
            if isinstance(cur, FinitePath) and cur.length == 0:
                break
            row.append(cur.shift())
        shifts[x] = row

    index: Dict[DRArrow, DRArrow] = {}
    arrows: List[DRArrow] = []
    for y in units:
        for x in units:
            seen_k = set()
            for m, ym in enumerate(shifts[y]):
                for n, xn in enumerate(shifts[x]):
                    if ym != xn:
                        continue
                    k = m - n
                    if abs(k) > k_cap or k in seen_k:
                        continue
                    seen_k.add(k)
                    a = DRArrow(y, k, x, (m, n))
                    index[a] = a
                    arrows.append(a)

    source = {a: a.source for a in arrows}
    range_ = {a: a.target for a in arrows}
    inverse = {a: index[inverse_dr(a)] for a in arrows}
    unit_arrow = {x: index[unit_dr(x)] for x in units}
    compose = {}
    for a in arrows:
        for b in arrows:
            if a.source != b.target:
                continue
            c = compose_dr(a, b)
            got = index.get(c)
            if got is not None:
                compose[(a, b)] = got
    return FiniteGroupoid(units, arrows, source, range_, inverse, compose,
                          unit_arrow, payload=None, truncated=True)


# ---------------------------------------------------------------------------
# induced finite systems


@dataclass
class InducedBoundarySystem:
    """A depth-bounded piece of the boundary carrying the restriction of the
    path-space action, packaged as an ordinary finite system.  Point names
    are the canonical renderings; `paths` decodes them."""

    pds: FinitePDS
    paths: Dict[str, BoundaryPath]

    def name_of(self, x: BoundaryPath) -> str:
        return format_boundary(x)


def induced_finite_pds(graph: FiniteGraph, depth: int,
                       cycle_cap: Optional[int] = None,
                       bound: int = 3) -> InducedBoundarySystem:
    """Restrict each edge generator to the boundary points representable at
    the given depth, then extend semi-saturatedly over the free group on
    the edges.  Restriction of a partial action to any subset is again a
    partial action, so the result always validates."""
    pts = enumerate_boundary(graph, depth, cycle_cap)
    names = {format_boundary(x): x for x in pts}
    if len(names) != len(pts):
        raise InvalidStructure("boundary renderings collide")
    space = FiniteSpace(tuple(sorted(names)))
    group = edge_group(graph)
    inside = set(pts)
    gens: Dict[str, PartialBijection] = {}
    for e in graph.edges:
        m = {}
        for x in pts:
            if x.start != graph.d(e):
                continue
            y = x.prepend((e,))
            if y in inside:
                m[format_boundary(x)] = format_boundary(y)
        gens[str(e)] = PartialBijection(m)
    pds = extend_semi_saturated(space, group, gens, bound)
    return InducedBoundarySystem(pds, names)
