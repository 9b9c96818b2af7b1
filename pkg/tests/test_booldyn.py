"""Boolean-algebra presented dynamics and the covering graph."""

import itertools

import pytest
from hypothesis import given, strategies as st

from orbitkit import (
    EvPeriodic, FiniteBooleanAlgebra, GBDS, InvalidStructure, UnknownPoint,
    build_graph, cylinder, enumerate_boundary, find_graph_isomorphisms,
    is_ultrafilter, principal_ultrafilter, shift_n, stab_min_ess,
    validate_gbds,
)
from orbitkit.booldyn import EMPTY_VERTEX

from conftest import loop_graph, twoshift_graph


def one_atom_gbds(alphabet):
    alg = FiniteBooleanAlgebra(("p",))
    top = frozenset({"p"})
    return GBDS(alg, tuple(alphabet),
                {s: {"p": top} for s in alphabet},
                {s: top for s in alphabet})


def test_algebra_basics():
    alg = FiniteBooleanAlgebra(("p", "q", "r"))
    assert len(alg.elements()) == 8
    assert alg.complement(alg.element({"p"})) == frozenset({"q", "r"})
    assert alg.leq(frozenset(), alg.top)
    with pytest.raises(InvalidStructure):
        FiniteBooleanAlgebra(("p", "p"))
    with pytest.raises(InvalidStructure):
        FiniteBooleanAlgebra(())
    with pytest.raises(UnknownPoint):
        alg.element({"z"})


def test_ultrafilters_are_exactly_the_principal_ones():
    """Exhaustive over all families of elements of a 3-atom algebra."""
    alg = FiniteBooleanAlgebra(("p", "q", "r"))
    els = alg.elements()
    found = []
    for n in range(len(els) + 1):
        for combo in itertools.combinations(els, n):
            if is_ultrafilter(alg, combo):
                found.append(frozenset(combo))
    expect = {principal_ultrafilter(alg, a) for a in alg.atoms}
    assert set(found) == expect
    assert len(found) == 3


def test_ultrafilter_rejections():
    alg = FiniteBooleanAlgebra(("p", "q"))
    up = principal_ultrafilter(alg, "p")
    assert is_ultrafilter(alg, up)
    assert not is_ultrafilter(alg, up | {frozenset()})
    assert not is_ultrafilter(alg, up - {alg.top})
    assert not is_ultrafilter(alg, alg.elements())  # decides nothing properly
    with pytest.raises(UnknownPoint):
        principal_ultrafilter(alg, "z")


def test_gbds_shape_is_checked():
    alg = FiniteBooleanAlgebra(("p",))
    top = frozenset({"p"})
    with pytest.raises(InvalidStructure):
        GBDS(alg, (), {}, {})
    with pytest.raises(InvalidStructure):
        GBDS(alg, ("a",), {}, {"a": top})
    with pytest.raises(InvalidStructure):
        GBDS(alg, ("a",), {"a": {}}, {"a": top})


def test_validation_rules():
    alg = FiniteBooleanAlgebra(("p", "q"))
    both = frozenset({"p", "q"})
    overlapping = GBDS(alg, ("a",),
                       {"a": {"p": frozenset({"p"}), "q": frozenset({"p"})}},
                       {"a": both})
    rules = {v.rule for v in validate_gbds(overlapping)}
    assert rules == {"theta-intersection"}

    leaky = GBDS(alg, ("a",),
                 {"a": {"p": frozenset({"q"}), "q": frozenset()}},
                 {"a": frozenset({"p"})})
    rules = {v.rule for v in validate_gbds(leaky)}
    assert rules == {"ideal-range"}
    with pytest.raises(InvalidStructure):
        build_graph(leaky)


def test_theta_hat_is_the_dual_map():
    alg = FiniteBooleanAlgebra(("p", "q"))
    g = GBDS(alg, ("a",),
             {"a": {"p": frozenset({"q"}), "q": frozenset()}},
             {"a": frozenset({"q"})})
    assert validate_gbds(g) == []
    assert g.theta_hat("a", "q") == "p"
    assert g.theta_hat("a", "p") is None
    assert g.theta_apply("a", frozenset({"p", "q"})) == frozenset({"q"})


def test_one_vertex_systems_rebuild_the_classic_shifts():
    lp = build_graph(one_atom_gbds(("a",)))
    assert (lp.vertices, lp.edges) == (("p",), ("a@p",))
    assert next(find_graph_isomorphisms(lp, loop_graph()), None) is not None

    ts = build_graph(one_atom_gbds(("a", "b")))
    assert set(ts.edges) == {"a@p", "b@p"}
    assert next(find_graph_isomorphisms(ts, twoshift_graph()), None) is not None


def test_missing_preimage_edge_handling():
    alg = FiniteBooleanAlgebra(("p", "q"))
    g = GBDS(alg, ("a",),
             {"a": {"p": frozenset(), "q": frozenset()}},
             {"a": frozenset({"q"})})
    assert validate_gbds(g) == []
    dropped = build_graph(g)
    assert dropped.edges == ()
    kept = build_graph(g, include_empty_vertex=True)
    assert EMPTY_VERTEX in kept.vertices
    assert kept.r("a@q") == EMPTY_VERTEX and kept.d("a@q") == "q"


def test_shift_restricts_to_cylinder_bijections():
    graph = build_graph(one_atom_gbds(("a", "b")))
    pts = enumerate_boundary(graph, 3)
    for depth in (1, 2):
        for alpha in itertools.product(graph.edges, repeat=depth):
            if not graph.is_path(alpha):
                continue
            members = cylinder(alpha, pts)
            shifted = [shift_n(x, 1) for x in members]
            assert all(y.has_prefix(alpha[1:]) for y in shifted)
            back = [y.prepend(alpha[:1]) for y in shifted]
            assert back == members
            assert len(set(shifted)) == len(members)


def test_essential_periods_differ_between_the_two_rebuilds():
    lp = build_graph(one_atom_gbds(("a",)))
    ts = build_graph(one_atom_gbds(("a", "b")))
    assert stab_min_ess(EvPeriodic(lp, (), ("a@p",))) == 1
    assert stab_min_ess(EvPeriodic(ts, (), ("a@p",))) == float("inf")


atom_names = st.lists(st.sampled_from(list("pqrstu")), min_size=1, max_size=4,
                      unique=True)


@given(atom_names)
def test_principal_filters_are_ultrafilters(atoms):
    alg = FiniteBooleanAlgebra(tuple(atoms))
    for a in alg.atoms:
        assert is_ultrafilter(alg, principal_ultrafilter(alg, a))


@given(atom_names, st.randoms())
def test_random_injective_theta_validates(atoms, rng):
    alg = FiniteBooleanAlgebra(tuple(atoms))
    targets = list(alg.atoms)
    rng.shuffle(targets)
    theta = {"a": {src: frozenset({tgt})
                   for src, tgt in zip(alg.atoms, targets)}}
    g = GBDS(alg, ("a",), theta, {"a": alg.top})
    assert validate_gbds(g) == []
    graph = build_graph(g)
    assert len(graph.edges) == len(alg.atoms)
