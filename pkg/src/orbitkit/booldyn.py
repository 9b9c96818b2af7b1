"""Boolean dynamical systems over finite Boolean algebras.

A finite Boolean algebra is the power set of its atoms, so elements are
frozensets of atom names.  A system carries, for each label, an
intersection-preserving map theta determined by its atom images and an
ideal (stored by its top element) bounding the range.  Ultrafilters of a
finite algebra are principal, one per atom, and the dual of theta sends
the ultrafilter at t to the one at the unique atom s with t inside
theta(s); intersection preservation is exactly what makes s unique.

The covering graph makes that dual concrete: one vertex per atom and one
edge per (label, atom inside the label's ideal top) pair, travelling
from s to t.  Atoms with no preimage get no edge unless the empty-marker
vertex is requested, in which case their edges point there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional

from .errors import InvalidStructure, UnknownPoint
from .graphs import FiniteGraph
from .reports import Violation

EMPTY_VERTEX = "(empty)"


class FiniteBooleanAlgebra:
    __slots__ = ("atoms", "_atom_set")

    def __init__(self, atoms):
        atoms = tuple(atoms)
        if not atoms:
            raise InvalidStructure("a Boolean algebra needs at least one atom")
        if len(set(atoms)) != len(atoms):
            raise InvalidStructure("duplicate atom names")
        for a in atoms:
            if not isinstance(a, str) or not a:
                raise InvalidStructure(f"bad atom name {a!r}")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "_atom_set", frozenset(atoms))

    def __setattr__(self, *args):
        raise AttributeError("FiniteBooleanAlgebra is immutable")

    def element(self, atoms) -> frozenset:
        el = frozenset(atoms)
        stray = el - self._atom_set
        if stray:
            raise UnknownPoint(f"unknown atoms {sorted(stray)}")
        return el

    @property
    def top(self) -> frozenset:
        return self._atom_set

    @property
    def bottom(self) -> frozenset:
        return frozenset()

    def complement(self, el: frozenset) -> frozenset:
        return self._atom_set - self.element(el)

    def leq(self, a: frozenset, b: frozenset) -> bool:
        return self.element(a) <= self.element(b)

    def elements(self) -> List[frozenset]:
        """All 2^n elements, smallest first; fine for the sizes used here."""
        out = [frozenset()]
        for a in self.atoms:
            out = out + [el | {a} for el in out]
        return sorted(out, key=lambda el: (len(el), sorted(el)))

    def __eq__(self, other):
        return isinstance(other, FiniteBooleanAlgebra) and set(self.atoms) == set(other.atoms)

    def __hash__(self):
        return hash(self._atom_set)

    def __repr__(self):
        return f"FiniteBooleanAlgebra({len(self.atoms)} atoms)"


def principal_ultrafilter(algebra: FiniteBooleanAlgebra, atom: str) -> frozenset:
    """All elements containing the atom."""
    if atom not in algebra.top:
        raise UnknownPoint(f"unknown atom {atom!r}")
    return frozenset(el for el in algebra.elements() if atom in el)


def is_ultrafilter(algebra: FiniteBooleanAlgebra, family) -> bool:
    """Proper, meet-closed, upward closed, and deciding every element."""
    family = frozenset(family)
    if frozenset() in family or algebra.top not in family:
        return False
    for a in family:
        for b in family:
            if a & b not in family:
                return False
        for c in algebra.elements():
            if a <= c and c not in family:
                return False
    for c in algebra.elements():
        if (c in family) == (algebra.complement(c) in family):
            return False
    return True


@dataclass
class GBDS:
    """Labels acting on a finite Boolean algebra: theta[label][atom] is the
    image element, extended over unions; ideal_top[label] bounds the range."""

    algebra: FiniteBooleanAlgebra
    alphabet: tuple
    theta: Dict[str, Dict[str, frozenset]]
    ideal_top: Dict[str, frozenset]

    def __post_init__(self):
        self.alphabet = tuple(self.alphabet)
        if len(set(self.alphabet)) != len(self.alphabet) or not self.alphabet:
            raise InvalidStructure("alphabet must be nonempty without repeats")
        for sym in self.alphabet:
            if not isinstance(sym, str) or not sym:
                raise InvalidStructure(f"bad label {sym!r}")
        if set(self.theta) != set(self.alphabet) or set(self.ideal_top) != set(self.alphabet):
            raise InvalidStructure("theta and ideal tops must cover exactly the alphabet")
        atoms = set(self.algebra.atoms)
        for sym in self.alphabet:
            if set(self.theta[sym]) != atoms:
                raise InvalidStructure(f"theta[{sym!r}] must be given on every atom")
            self.theta[sym] = {a: self.algebra.element(v)
                               for a, v in self.theta[sym].items()}
            self.ideal_top[sym] = self.algebra.element(self.ideal_top[sym])

    def theta_apply(self, label: str, el: frozenset) -> frozenset:
        el = self.algebra.element(el)
        images = [self.theta[label][a] for a in el]
        return frozenset().union(*images) if images else frozenset()

    def theta_hat(self, label: str, atom: str) -> Optional[str]:
        """Dual action on principal ultrafilters: the unique atom s with
        atom <= theta(s), or None.  Meaningful once validate_gbds is clean;
        with overlapping atom images the first match (atom order) is
        returned."""
        for s in self.algebra.atoms:
            if atom in self.theta[label][s]:
                return s
        return None


def validate_gbds(g: GBDS) -> List[Violation]:
    out: List[Violation] = []
    for sym in g.alphabet:
        images = {a: g.theta[sym][a] for a in g.algebra.atoms}
        atoms = list(g.algebra.atoms)
        for i, a in enumerate(atoms):
            for b in atoms[i + 1:]:
                both = images[a] & images[b]
                if both:
                    out.append(Violation(
                        "theta-intersection", (sym, a, b),
                        f"theta[{sym}] images of disjoint atoms {a} and {b} "
                        f"share {sorted(both)}; intersections are not preserved"))
        for a in atoms:
            if not images[a] <= g.ideal_top[sym]:
                out.append(Violation(
                    "ideal-range", (sym, a),
                    f"theta[{sym}]({a}) = {sorted(images[a])} leaves the ideal "
                    f"below {sorted(g.ideal_top[sym])}"))
    return out


def build_graph(g: GBDS, include_empty_vertex: bool = False) -> FiniteGraph:
    """The covering graph of the dual action.  Edge {label}@{atom} exists
    for each atom below the label's ideal top and runs from the unique
    preimage atom to it; without a preimage the edge is dropped, or aimed
    at the empty-marker vertex when requested."""
    bad = validate_gbds(g)
    if bad:
        raise InvalidStructure(f"system does not validate: {bad[0].message}")
    vertices = [str(a) for a in g.algebra.atoms]
    if include_empty_vertex:
        if EMPTY_VERTEX in vertices:
            raise InvalidStructure(f"atom name collides with {EMPTY_VERTEX!r}")
        vertices.append(EMPTY_VERTEX)
    edges, rng, dom = [], {}, {}
    for sym in g.alphabet:
        for t in g.algebra.atoms:
            if t not in g.ideal_top[sym]:
                continue
            s = g.theta_hat(sym, t)
            if s is None and not include_empty_vertex:
                continue
            name = f"{sym}@{t}"
            edges.append(name)
            rng[name] = str(s) if s is not None else EMPTY_VERTEX
            dom[name] = str(t)
    return FiniteGraph(tuple(vertices), tuple(edges), rng, dom)
