"""Symbolic orbit maps between shift boundaries and their integer form."""

import pytest

from orbitkit import (
    DRCOEData, EvPeriodic, FiniteGraph, InvalidStructure, MapUndefined,
    PathMap, RuleTable, SymbolicCOE, check_eventual_conjugacy,
    check_eventual_conjugacy_symbolic, check_stab_preserving_dr, coe_ab_to_kl,
    coe_kl_to_ab, edge_group, enumerate_boundary, identity_symbolic_coe,
    relabel_symbolic_coe, validate_dr_coe, validate_symbolic_coe,
)

from conftest import loop_graph, random_graph_suite, sink_graph, twoshift_graph


def relabeled_twoshift():
    return FiniteGraph(("w",), ("c", "d"),
                       {"c": "w", "d": "w"}, {"c": "w", "d": "w"})


def relabel_coe():
    return relabel_symbolic_coe(twoshift_graph(), relabeled_twoshift(),
                                {"v": "w"}, {"a": "c", "b": "d"})


def test_rule_table_rejects_overlapping_cells():
    with pytest.raises(InvalidStructure):
        RuleTable({("a",): 0, ("a", "b"): 1})
    with pytest.raises(InvalidStructure):
        RuleTable({(): 0})


def test_rule_table_lookup():
    ts = twoshift_graph()
    rt = RuleTable({("a",): 10, ("b", "a"): 20})
    assert rt.lookup(EvPeriodic(ts, (), ("a",))) == 10
    assert rt.lookup(EvPeriodic(ts, ("b",), ("a",))) == 20
    with pytest.raises(MapUndefined):
        rt.lookup(EvPeriodic(ts, (), ("b",)))
    assert rt.value_on_cell(("a", "a")) == 10
    assert rt.value_on_cell(("b",)) is None
    assert rt.cells() == [("a",), ("b", "a")]


def test_path_map_prefix_rewriting():
    ts, tr = twoshift_graph(), relabeled_twoshift()
    pm = PathMap(ts, tr, [(("a",), ("c",), 1), (("b",), ("d",), 1)],
                 {"v": "w"})
    x = EvPeriodic(ts, ("b",), ("a",))
    assert pm.apply(x) == EvPeriodic(tr, ("d",), ("c",))


def test_path_map_validates_rules():
    ts, tr = twoshift_graph(), relabeled_twoshift()
    with pytest.raises(InvalidStructure):
        PathMap(ts, tr, [(("a",), ("c",), 2)], {})  # consumes too much
    with pytest.raises(InvalidStructure):
        PathMap(ts, tr, [((), ("c",), 1)], {})
    with pytest.raises(InvalidStructure):
        PathMap(ts, tr, [(("a",), ("c",), 1)], {"v": "nope"})


def test_symbolic_tables_are_checked():
    ts = twoshift_graph()
    good = identity_symbolic_coe(ts)
    F = edge_group(ts)
    with pytest.raises(InvalidStructure):
        SymbolicCOE(ts, ts, good.phi, good.phi_inv,
                    {"z": RuleTable({("a",): F.inverse(F.generator("a"))})},
                    good.b_gen)
    with pytest.raises(InvalidStructure):
        SymbolicCOE(ts, ts, good.phi, good.phi_inv,
                    {"a": RuleTable({("b",): F.inverse(F.generator("a"))})},
                    good.b_gen)


def test_identity_and_relabel_validate():
    for g in (loop_graph(), twoshift_graph(), sink_graph()):
        assert validate_symbolic_coe(identity_symbolic_coe(g)) == []
    assert validate_symbolic_coe(relabel_coe()) == []


def test_identity_validates_on_random_graphs():
    for g in random_graph_suite():
        assert validate_symbolic_coe(identity_symbolic_coe(g), depth=2) == []


def test_ab_to_kl_gives_constant_zero_one_tables():
    for coe in (identity_symbolic_coe(twoshift_graph()), relabel_coe()):
        data = coe_ab_to_kl(coe)
        for table, want in ((data.k, 0), (data.l, 1),
                            (data.k_prime, 0), (data.l_prime, 1)):
            assert [v for _, v in table.items()] == [want] * len(table.cells())
        assert validate_dr_coe(data) == []
        assert check_eventual_conjugacy(data) == []
        assert check_stab_preserving_dr(data) == []


def test_kl_to_ab_round_trips_on_the_boundary():
    for coe in (identity_symbolic_coe(twoshift_graph()), relabel_coe()):
        back = coe_kl_to_ab(coe_ab_to_kl(coe))
        assert validate_symbolic_coe(back) == []
        for x in enumerate_boundary(coe.source, 2):
            if x.is_finite:
                continue
            assert back.a_sigma(x) == coe.a_sigma(x)
        for y in enumerate_boundary(coe.target, 2):
            if y.is_finite:
                continue
            assert back.b_sigma(y) == coe.b_sigma(y)


def loop_dr_data(k_val, l_val):
    lp = loop_graph()
    ident = identity_symbolic_coe(lp)
    return DRCOEData(lp, lp, ident.phi, ident.phi_inv,
                     RuleTable({("a",): k_val}), RuleTable({("a",): l_val}),
                     RuleTable({("a",): k_val}), RuleTable({("a",): l_val}))


def test_orientation_reversing_loop_data():
    """k = 1, l = 0 satisfies the equations and preserves periods, but the
    direction flip is caught by the conjugacy test."""
    data = loop_dr_data(1, 0)
    assert validate_dr_coe(data) == []
    assert check_stab_preserving_dr(data) == []
    ec = check_eventual_conjugacy(data)
    assert ec and all(v.rule == "not-eventually-conjugate" for v in ec)


def test_l_corruption_is_caught_by_the_period_sum():
    data = loop_dr_data(0, 2)
    # the equations hold degenerately on the one-point boundary
    assert validate_dr_coe(data) == []
    bad = check_stab_preserving_dr(data)
    assert {v.rule for v in bad} == {"stab-forward", "stab-backward"}
    fwd = next(v for v in bad if v.rule == "stab-forward")
    assert fwd.witness == ("(a)^inf",)
    assert "cocycle sum 2" in fwd.message and "least period 1" in fwd.message


def test_stab_check_passes_identity_on_random_graphs():
    # cap the cycle length; the default scans all cycles up to |E| and the
    # 6-edge suite members make that needlessly slow for a unit test
    for g in random_graph_suite():
        data = coe_ab_to_kl(identity_symbolic_coe(g))
        assert check_stab_preserving_dr(data, cycle_cap=3) == []


def test_symbolic_conjugacy_check():
    ts = twoshift_graph()
    assert check_eventual_conjugacy_symbolic(identity_symbolic_coe(ts)) == []
    assert check_eventual_conjugacy_symbolic(relabel_coe()) == []

    # the loop self-map transporting by +1 letter reverses the direction
    lp = loop_graph()
    F = edge_group(lp)
    ident = identity_symbolic_coe(lp)
    flipped = SymbolicCOE(lp, lp, ident.phi, ident.phi_inv,
                          {"a": RuleTable({("a",): F.generator("a")})},
                          {"a": RuleTable({("a",): F.generator("a")})})
    assert validate_symbolic_coe(flipped) == []
    ec = check_eventual_conjugacy_symbolic(flipped)
    assert ec and all(v.rule == "not-eventually-conjugate" for v in ec)
    assert "letter sum 1" in ec[0].message


def test_broken_transport_is_a_coe_violation():
    ts = twoshift_graph()
    F = edge_group(ts)
    ident = identity_symbolic_coe(ts)
    wrong = dict(ident.a_gen)
    wrong["a"] = RuleTable({("a",): F.inverse(F.generator("b"))})
    bad = SymbolicCOE(ts, ts, ident.phi, ident.phi_inv, wrong, ident.b_gen)
    rules = {v.rule for v in validate_symbolic_coe(bad)}
    assert "coe-forward" in rules
