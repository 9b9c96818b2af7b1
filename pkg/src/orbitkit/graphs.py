"""Finite directed graphs with the range/domain convention used by the
path-space machinery: an edge e is travelled from r(e) to d(e), a path
e1 e2 ... requires d(e_i) = r(e_{i+1}), and a vertex with no outgoing
edge (no e with r(e) = v) is singular; boundary paths stop there.
"""

from __future__ import annotations

import itertools
from typing import Dict, Iterator, List, Optional, Tuple

from .errors import InvalidStructure, UnknownPoint


class FiniteGraph:
    __slots__ = ("_vertices", "_edges", "_r", "_d", "_cont", "_hash")

    def __init__(self, vertices, edges, range_map, domain_map):
        vertices = tuple(vertices)
        edges = tuple(edges)
        if len(set(vertices)) != len(vertices):
            raise InvalidStructure("duplicate vertex names")
        if len(set(edges)) != len(edges):
            raise InvalidStructure("duplicate edge names")
        vset = set(vertices)
        for name, m in (("range", range_map), ("domain", domain_map)):
            if set(m) != set(edges):
                raise InvalidStructure(f"{name} map must be defined on exactly the edges")
            for e, v in m.items():
                if v not in vset:
                    raise InvalidStructure(f"{name} of edge {e!r} is not a vertex: {v!r}")
        object.__setattr__(self, "_vertices", vertices)
        object.__setattr__(self, "_edges", edges)
        object.__setattr__(self, "_r", dict(range_map))
        object.__setattr__(self, "_d", dict(domain_map))
        cont: Dict[object, list] = {v: [] for v in vertices}
        for e in edges:
            cont[self._r[e]].append(e)
        object.__setattr__(self, "_cont", {v: tuple(es) for v, es in cont.items()})
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *args):
        raise AttributeError("FiniteGraph is immutable")

    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def edges(self) -> tuple:
        return self._edges

    def r(self, e):
        try:
            return self._r[e]
        except KeyError:
            raise UnknownPoint(f"not an edge: {e!r}") from None

    def d(self, e):
        try:
            return self._d[e]
        except KeyError:
            raise UnknownPoint(f"not an edge: {e!r}") from None

    def continuations(self, v) -> tuple:
        """Edges leaving v, i.e. usable to extend a path arriving at v."""
        try:
            return self._cont[v]
        except KeyError:
            raise UnknownPoint(f"not a vertex: {v!r}") from None

    def is_singular(self, v) -> bool:
        return not self.continuations(v)

    def singular_vertices(self) -> tuple:
        return tuple(v for v in self._vertices if not self._cont[v])

    def is_path(self, edges) -> bool:
        edges = tuple(edges)
        if not all(e in self._r for e in edges):
            return False
        return all(self._d[a] == self._r[b] for a, b in zip(edges, edges[1:]))

    def path_start(self, edges, fallback=None):
        edges = tuple(edges)
        return self._r[edges[0]] if edges else fallback

    def path_end(self, edges, fallback=None):
        edges = tuple(edges)
        return self._d[edges[-1]] if edges else fallback

    # -- enumeration ------------------------------------------------------

    def paths_from(self, v, length: int) -> Iterator[tuple]:
        """All paths of exactly the given length starting at v."""
        if length == 0:
            if v not in self._cont:
                raise UnknownPoint(f"not a vertex: {v!r}")
            yield ()
            return
        for e in self.continuations(v):
            for rest in self.paths_from(self._d[e], length - 1):
                yield (e,) + rest

    def paths_into(self, v, max_length: int) -> Iterator[tuple]:
        """All paths of length <= max_length ending at v.  The empty tuple
        stands for the vertex path at v."""
        if v not in self._cont:
            raise UnknownPoint(f"not a vertex: {v!r}")
        frontier = [()]
        yield ()
        for _ in range(max_length):
            nxt = []
            for p in frontier:
                tail = self._r[p[0]] if p else v
                for e in self._edges:
                    if self._d[e] == tail:
                        q = (e,) + p
                        nxt.append(q)
                        yield q
            frontier = nxt

    def cycles_from(self, v, length: int) -> Iterator[tuple]:
        for p in self.paths_from(v, length):
            if p and self._d[p[-1]] == v:
                yield p

    def all_cycles(self, max_length: int) -> List[tuple]:
        out = []
        for v in self._vertices:
            for n in range(1, max_length + 1):
                out.extend(self.cycles_from(v, n))
        return out

    # -- structure maps ---------------------------------------------------

    def relabel(self, vertex_map, edge_map) -> "FiniteGraph":
        if set(vertex_map) != set(self._vertices) or \
                len(set(vertex_map.values())) != len(self._vertices):
            raise InvalidStructure("vertex_map must be a bijection on the vertices")
        if set(edge_map) != set(self._edges) or \
                len(set(edge_map.values())) != len(self._edges):
            raise InvalidStructure("edge_map must be a bijection on the edges")
        return FiniteGraph(
            tuple(vertex_map[v] for v in self._vertices),
            tuple(edge_map[e] for e in self._edges),
            {edge_map[e]: vertex_map[self._r[e]] for e in self._edges},
            {edge_map[e]: vertex_map[self._d[e]] for e in self._edges},
        )

    def __eq__(self, other):
        if not isinstance(other, FiniteGraph):
            return NotImplemented
        return (set(self._vertices) == set(other._vertices)
                and set(self._edges) == set(other._edges)
                and self._r == other._r and self._d == other._d)

    def __hash__(self):
        if self._hash is None:
            h = hash((frozenset(self._vertices), frozenset(self._edges),
                      frozenset(self._r.items()), frozenset(self._d.items())))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def __repr__(self):
        return f"FiniteGraph({len(self._vertices)} vertices, {len(self._edges)} edges)"


def is_primitive_cycle(graph: FiniteGraph, cycle) -> bool:
    """True when the cycle is not a repetition of a shorter cycle."""
    cycle = tuple(cycle)
    n = len(cycle)
    if n == 0 or not graph.is_path(cycle) or graph.d(cycle[-1]) != graph.r(cycle[0]):
        return False
    for k in range(1, n):
        if n % k == 0 and cycle == cycle[k:] + cycle[:k]:
            return False
    return True


def primitive_cycles(graph: FiniteGraph, max_length: int) -> List[tuple]:
    return [c for c in graph.all_cycles(max_length) if is_primitive_cycle(graph, c)]


def find_graph_isomorphisms(a: FiniteGraph, b: FiniteGraph) -> Iterator[Tuple[dict, dict]]:
    """All pairs (vertex_map, edge_map) identifying a with b.  Small
    graphs only; intended for recognition round-trips."""
    if len(a.vertices) != len(b.vertices) or len(a.edges) != len(b.edges):
        return
    bv = list(b.vertices)
    for perm in itertools.permutations(bv):
        vmap = dict(zip(a.vertices, perm))
        # group a-edges by mapped endpoints, b-edges by endpoints
        cands = {}
        ok = True
        for e in a.edges:
            key = (vmap[a.r(e)], vmap[a.d(e)])
            cs = [f for f in b.edges if (b.r(f), b.d(f)) == key]
            if not cs:
                ok = False
                break
            cands[e] = cs
        if not ok:
            continue

        emap: dict = {}
        used = set()

        def rec(i):
            if i == len(a.edges):
                yield dict(vmap), dict(emap)
                return
            e = a.edges[i]
            for f in cands[e]:
                if f in used:
                    continue
                emap[e] = f
                used.add(f)
                yield from rec(i + 1)
                del emap[e]
                used.discard(f)

        yield from rec(0)
