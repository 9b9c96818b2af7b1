"""Boundary paths of a finite graph.

A boundary path either ends at a singular vertex after finitely many
edges, or goes on forever.  On a finite graph every infinite path is
eventually periodic, so the whole boundary is captured by two shapes:

  FinitePath(graph, edges, vertex)   edges may be empty (a vertex path)
  EvPeriodic(graph, prefix, cycle)   the point prefix . cycle . cycle ...

EvPeriodic instances are canonicalised on construction: the cycle is cut
down to its primitive root, and any trailing prefix edge equal to the
cycle's last edge is absorbed by rotating the cycle.  Structural equality
on the frozen fields is then genuine equality of boundary points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple, Union

from .errors import InvalidStructure, MapUndefined
from .graphs import FiniteGraph, is_primitive_cycle, primitive_cycles


@dataclass(frozen=True)
class FinitePath:
    graph: FiniteGraph
    edges: Tuple
    vertex: object

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        g = self.graph
        if not g.is_path(self.edges):
            raise InvalidStructure(f"not a path: {self.edges!r}")
        if self.edges:
            end = g.d(self.edges[-1])
            if self.vertex != end:
                raise InvalidStructure(
                    f"terminal vertex {self.vertex!r} disagrees with d of the last edge")
        elif self.vertex not in g.vertices:
            raise InvalidStructure(f"not a vertex: {self.vertex!r}")
        if not g.is_singular(self.vertex):
            raise InvalidStructure(
                f"{self.vertex!r} has continuations; not a boundary path")

    @property
    def start(self):
        return self.graph.r(self.edges[0]) if self.edges else self.vertex

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def is_finite(self) -> bool:
        return True

    def edge_at(self, i: int):
        if 0 <= i < len(self.edges):
            return self.edges[i]
        return None

    def first_edges(self, n: int) -> tuple:
        if n > len(self.edges):
            raise MapUndefined(f"path has only {len(self.edges)} edges, asked for {n}")
        return self.edges[:n]

    def has_prefix(self, alpha) -> bool:
        alpha = tuple(alpha)
        return self.edges[:len(alpha)] == alpha

    def shift(self) -> "FinitePath":
        if not self.edges:
            raise MapUndefined("the shift is undefined on vertex paths")
        return FinitePath(self.graph, self.edges[1:], self.vertex)

    def prepend(self, alpha) -> "FinitePath":
        alpha = tuple(alpha)
        if alpha and self.graph.d(alpha[-1]) != self.start:
            raise MapUndefined(f"{alpha!r} does not end where the path starts")
        return FinitePath(self.graph, alpha + self.edges, self.vertex)

    def __repr__(self):
        return f"<{format_boundary(self)}>"


def _rotate_right(cycle: tuple) -> tuple:
    return (cycle[-1],) + cycle[:-1]


@dataclass(frozen=True)
class EvPeriodic:
    graph: FiniteGraph
    prefix: Tuple
    cycle: Tuple

    def __post_init__(self):
        g = self.graph
        prefix = tuple(self.prefix)
        cycle = tuple(self.cycle)
        if not cycle:
            raise InvalidStructure("the cycle of an eventually periodic path is nonempty")
        if not g.is_path(cycle) or g.d(cycle[-1]) != g.r(cycle[0]):
            raise InvalidStructure(f"not a cycle: {cycle!r}")
        if not g.is_path(prefix):
            raise InvalidStructure(f"not a path: {prefix!r}")
        if prefix and g.d(prefix[-1]) != g.r(cycle[0]):
            raise InvalidStructure("prefix does not lead into the cycle")
        # primitive root
        n = len(cycle)
        for k in range(1, n + 1):
            if n % k == 0 and cycle == cycle[k:] + cycle[:k]:
                cycle = cycle[:k]
                break
        # absorb trailing prefix edges into the rotation
        while prefix and prefix[-1] == cycle[-1]:
            prefix = prefix[:-1]
            cycle = _rotate_right(cycle)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "cycle", cycle)

    @property
    def start(self):
        return self.graph.r(self.prefix[0]) if self.prefix else self.graph.r(self.cycle[0])

    @property
    def is_finite(self) -> bool:
        return False

    @property
    def period(self) -> int:
        return len(self.cycle)

    @property
    def is_periodic(self) -> bool:
        """Purely periodic in canonical form (empty prefix)."""
        return not self.prefix

    def edge_at(self, i: int):
        if i < 0:
            return None
        if i < len(self.prefix):
            return self.prefix[i]
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def first_edges(self, n: int) -> tuple:
        return tuple(self.edge_at(i) for i in range(n))

    def has_prefix(self, alpha) -> bool:
        alpha = tuple(alpha)
        return self.first_edges(len(alpha)) == alpha

    def shift(self) -> "EvPeriodic":
        if self.prefix:
            return EvPeriodic(self.graph, self.prefix[1:], self.cycle)
        return EvPeriodic(self.graph, (), self.cycle[1:] + self.cycle[:1])

    def prepend(self, alpha) -> "EvPeriodic":
        alpha = tuple(alpha)
        if alpha and self.graph.d(alpha[-1]) != self.start:
            raise MapUndefined(f"{alpha!r} does not end where the path starts")
        return EvPeriodic(self.graph, alpha + self.prefix, self.cycle)

    def __repr__(self):
        return f"<{format_boundary(self)}>"


BoundaryPath = Union[FinitePath, EvPeriodic]


def vertex_path(graph: FiniteGraph, v) -> FinitePath:
    return FinitePath(graph, (), v)


def shift_n(path: BoundaryPath, n: int) -> BoundaryPath:
    for _ in range(n):
        path = path.shift()
    return path


def format_boundary(path: BoundaryPath) -> str:
    if isinstance(path, FinitePath):
        core = ".".join(str(e) for e in path.edges)
        return (core + "@" if core else "@") + str(path.vertex)
    pre = ".".join(str(e) for e in path.prefix)
    cyc = ".".join(str(e) for e in path.cycle)
    return (pre + "." if pre else "") + f"({cyc})^inf"


def sort_key(path: BoundaryPath):
    if isinstance(path, FinitePath):
        return (0, len(path.edges), tuple(str(e) for e in path.edges), str(path.vertex))
    return (1, len(path.prefix), tuple(str(e) for e in path.prefix),
            len(path.cycle), tuple(str(e) for e in path.cycle))


def enumerate_boundary(graph: FiniteGraph, prefix_cap: int,
                       cycle_cap: Optional[int] = None) -> List[BoundaryPath]:
    """The boundary paths representable with a prefix of length at most
    prefix_cap (finite paths: total length; eventually periodic: canonical
    prefix) and primitive cycles up to cycle_cap.  The default cycle cap is
    prefix_cap again, floored at 1 so depth 0 still lists cycle points.
    On a finite graph with those caps this is an exhaustive finite list."""
    if cycle_cap is None:
        cycle_cap = max(1, prefix_cap)
    out: List[BoundaryPath] = []
    for v in graph.vertices:
        for n in range(prefix_cap + 1):
            for p in graph.paths_from(v, n):
                end = graph.path_end(p, v)
                if graph.is_singular(end):
                    out.append(FinitePath(graph, p, end))
    seen = set()
    cycles = [c for c in primitive_cycles(graph, cycle_cap)]
    for cyc in cycles:
        head = graph.r(cyc[0])
        for v in graph.vertices:
            for n in range(prefix_cap + 1):
                for p in graph.paths_from(v, n):
                    if graph.path_end(p, v) != head:
                        continue
                    pt = EvPeriodic(graph, p, cyc)
                    if len(pt.prefix) <= prefix_cap and pt not in seen:
                        seen.add(pt)
                        out.append(pt)
    return sorted(out, key=sort_key)


def cylinder(alpha, points) -> List[BoundaryPath]:
    """The members of the given point collection starting with alpha."""
    alpha = tuple(alpha)
    return [x for x in points if x.has_prefix(alpha)]
