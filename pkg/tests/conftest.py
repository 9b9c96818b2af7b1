"""Shared builders: exhaustive small-action corpora, graph suites, and the
brute-force essential-period oracle the shift tests compare against."""

import itertools
import math
import random
from functools import lru_cache

import pytest

from orbitkit import (
    EvPeriodic,
    FiniteGraph,
    FiniteGroup,
    FinitePDS,
    FiniteSpace,
    PartialBijection,
    cyclic_group,
    enumerate_boundary,
    validate,
)

POINT_NAMES = ("x0", "x1", "x2")


def klein_four():
    # e, a, b, ab with every element self-inverse
    table = ((0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0))
    return FiniteGroup(table, names=("e", "a", "b", "c"))


def partial_bijections(points):
    """Every partial bijection on the given points, the empty map included."""
    points = tuple(points)
    out = []
    for k in range(len(points) + 1):
        for dom in itertools.combinations(points, k):
            for img in itertools.permutations(points, k):
                out.append(PartialBijection(dict(zip(dom, img))))
    return out


@lru_cache(maxsize=None)
def action_corpus():
    """All valid partial actions of the two- and three-element cyclic groups
    on at most three named points, in explicit mode.  Enumeration runs over
    one generator map; the axioms filter out everything inconsistent."""
    systems = []
    for n in range(len(POINT_NAMES) + 1):
        space = FiniteSpace(POINT_NAMES[:n])
        for order in (2, 3):
            group = cyclic_group(order)
            g = group.element(1)
            for pb in partial_bijections(space.points):
                try:
                    pds = FinitePDS.explicit(space, group, {g: pb})
                except Exception:
                    continue
                if not validate(pds):
                    systems.append(pds)
    return tuple(systems)


@pytest.fixture(scope="session")
def corpus():
    return action_corpus()


# ---------------------------------------------------------------------------
# graphs


def loop_graph():
    return FiniteGraph(("v",), ("a",), {"a": "v"}, {"a": "v"})


def twoshift_graph():
    return FiniteGraph(("v",), ("a", "b"), {"a": "v", "b": "v"},
                       {"a": "v", "b": "v"})


def sink_graph():
    # r(a) = v, d(a) = w, and w emits nothing
    return FiniteGraph(("v", "w"), ("a",), {"a": "v"}, {"a": "w"})


def random_graph(rng, max_vertices=4, max_edges=6):
    nv = rng.randint(1, max_vertices)
    vs = tuple(f"v{i}" for i in range(nv))
    ne = rng.randint(1, max_edges)
    names = tuple(f"e{i}" for i in range(ne))
    r = {e: rng.choice(vs) for e in names}
    d = {e: rng.choice(vs) for e in names}
    return FiniteGraph(vs, names, r, d)


@lru_cache(maxsize=None)
def random_graph_suite(count=10, seed=445):
    # seed chosen so the depth-3 boundary of every member stays small enough
    # for the exhaustive word/point sweeps in the acceptance suite
    rng = random.Random(seed)
    return tuple(random_graph(rng) for _ in range(count))


@lru_cache(maxsize=None)
def simple_digraphs(max_vertices=3):
    """All digraphs on up to max_vertices vertices with at most one edge per
    ordered vertex pair (self-loops allowed)."""
    out = []
    for nv in range(1, max_vertices + 1):
        vs = tuple(f"v{i}" for i in range(nv))
        slots = list(itertools.product(vs, vs))
        for mask in range(1 << len(slots)):
            chosen = [slots[i] for i in range(len(slots)) if mask >> i & 1]
            names = tuple(f"{u}>{w}" for u, w in chosen)
            r = {f"{u}>{w}": u for u, w in chosen}
            d = {f"{u}>{w}": w for u, w in chosen}
            out.append(FiniteGraph(vs, names, r, d))
    return tuple(out)


def start_vertex(graph, x):
    e = x.edge_at(0)
    return graph.r(e) if e is not None else x.vertex


class EssentialOracle:
    """Independent essential-period decision by exhaustive search: the
    essential period of delta . gamma^inf equals |gamma| exactly when the
    only boundary path leaving the base vertex of gamma is gamma^inf
    itself.  Any branch on the cycle yields a second boundary path within
    prefix |V| + slack and a vertex-simple cycle, so the caps below make
    the search exact, not heuristic."""

    def __init__(self, graph, max_point_prefix=2):
        self.graph = graph
        cap_prefix = max_point_prefix + len(graph.vertices) + 2
        cap_cycle = max(1, len(graph.vertices))
        self.by_start = {}
        for y in enumerate_boundary(graph, cap_prefix, cap_cycle):
            self.by_start.setdefault(start_vertex(graph, y), set()).add(y)

    def __call__(self, x):
        if not isinstance(x, EvPeriodic):
            return math.inf
        v0 = self.graph.r(x.cycle[0])
        tail = EvPeriodic(self.graph, (), x.cycle)
        if self.by_start.get(v0, set()) == {tail}:
            return len(x.cycle)
        return math.inf
