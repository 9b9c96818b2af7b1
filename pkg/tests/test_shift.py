"""Path-space action of the edge group and its depth-bounded groupoids."""

import itertools

import pytest

from orbitkit import (
    DRArrow, EvPeriodic, MapUndefined, act_word, compose_dr, edge_group,
    enumerate_boundary, format_boundary, induced_finite_pds, inverse_dr,
    isotropy_decompose, shift_n, stab_min, stab_min_ess, truncated_dr_groupoid,
    unit_dr, validate, vertex_path, xi, xi_inverse,
)

from conftest import (
    EssentialOracle, loop_graph, simple_digraphs, sink_graph, twoshift_graph,
)


def ts_points():
    ts = twoshift_graph()
    F = edge_group(ts)
    a_inf = EvPeriodic(ts, (), ("a",))
    b_a = EvPeriodic(ts, ("b",), ("a",))
    return ts, F, a_inf, b_a


def test_act_word_examples():
    ts, F, a_inf, b_a = ts_points()
    assert act_word(F.word(["a", "b^-1"]), b_a) == a_inf
    assert act_word(F.word(["a"]), a_inf) == a_inf
    assert act_word(F.word(["b^-1"]), a_inf) is None
    assert act_word(F.identity(), b_a) == b_a
    # only alpha.beta^-1 shaped words act at all
    assert act_word(F.word(["a^-1", "b"]), b_a) is None


def test_xi_frozen_loop_arrow():
    lp = loop_graph()
    F = edge_group(lp)
    x = EvPeriodic(lp, (), ("a",))
    arrow = xi(F.word(["a"]), x)
    assert (arrow.target, arrow.k, arrow.source) == (x, 1, x)
    assert arrow.witness == (1, 0)
    # a different certificate for the same triple is the same arrow
    assert arrow == DRArrow(x, 1, x, (2, 1))
    assert F.format_element(xi_inverse(F, DRArrow(x, 1, x, (2, 1)))) == "a"


def test_xi_frozen_twoshift_arrow():
    ts, F, a_inf, b_a = ts_points()
    arrow = xi(F.word(["a", "b^-1"]), b_a)
    assert (arrow.target, arrow.k, arrow.source) == (a_inf, 0, b_a)
    assert arrow.witness == (1, 1)


def test_xi_outside_domain_raises():
    ts, F, a_inf, b_a = ts_points()
    with pytest.raises(MapUndefined):
        xi(F.word(["b^-1"]), a_inf)
    with pytest.raises(MapUndefined):
        xi(F.word(["a^-1", "b"]), b_a)


def all_words(F, max_len):
    letters = ["a", "b", "a^-1", "b^-1"]
    out = []
    for n in range(max_len + 1):
        for combo in itertools.product(letters, repeat=n):
            out.append(F.word(list(combo)))
    return sorted(set(out), key=F.format_element)


def test_xi_is_a_partial_functor():
    """xi(gh, x) = xi(g, h.x) o xi(h, x) wherever both factors act."""
    ts, F, a_inf, b_a = ts_points()
    pts = enumerate_boundary(ts, 2)
    words = all_words(F, 2)
    checked = 0
    for g, h, x in itertools.product(words, words, pts):
        y = act_word(h, x)
        if y is None or act_word(g, y) is None:
            continue
        lhs = compose_dr(xi(g, y), xi(h, x))
        assert lhs == xi(F.multiply(g, h), x)
        checked += 1
    assert checked > 400


def test_xi_inverse_round_trips():
    ts, F, a_inf, b_a = ts_points()
    pts = enumerate_boundary(ts, 2)
    for g, x in itertools.product(all_words(F, 3), pts):
        if act_word(g, x) is None:
            continue
        arrow = xi(g, x)
        back = xi_inverse(F, arrow)
        assert back == g
        assert xi(back, arrow.source) == arrow


def test_unit_and_inverse_arrows():
    ts, F, a_inf, b_a = ts_points()
    arrow = xi(F.word(["a", "b^-1"]), b_a)
    assert compose_dr(inverse_dr(arrow), arrow) == unit_dr(b_a)
    assert compose_dr(arrow, inverse_dr(arrow)) == unit_dr(a_inf)
    assert compose_dr(arrow, unit_dr(b_a)) == arrow


def test_compose_pads_witnesses():
    lp = loop_graph()
    x = EvPeriodic(lp, (), ("a",))
    one = DRArrow(x, 1, x, (1, 0))
    two = compose_dr(one, one)
    assert (two.k, two.witness) == (2, (2, 0))


def test_isotropy_decompose_frozen_examples():
    lp = loop_graph()
    Fl = edge_group(lp)
    x = EvPeriodic(lp, (), ("a",))
    assert isotropy_decompose(xi(Fl.word(["a"]), x)) == ((), ("a",))

    ts, F, a_inf, b_a = ts_points()
    ab = EvPeriodic(ts, (), ("a", "b"))
    arrow = xi(F.word(["a", "b"]), ab)
    assert (arrow.k, arrow.witness) == (2, (2, 0))
    assert isotropy_decompose(arrow) == ((), ("a", "b"))

    # a nontrivial delta: the same loop seen one step before the cycle
    off = DRArrow(b_a, 1, b_a, (2, 1))
    assert isotropy_decompose(off) == (("b",), ("a",))
    assert isotropy_decompose(inverse_dr(off)) == (("b",), ("a",))
    assert isotropy_decompose(unit_dr(b_a)) == ((), ())

    with pytest.raises(MapUndefined):
        isotropy_decompose(xi(F.word(["a", "b^-1"]), b_a))


def test_decomposition_reassembles_the_point():
    ts, F, a_inf, b_a = ts_points()
    for arrow in (DRArrow(b_a, 1, b_a, (2, 1)),
                  xi(F.word(["a", "b"]), EvPeriodic(ts, (), ("a", "b")))):
        delta, gamma = isotropy_decompose(arrow)
        assert len(gamma) == abs(arrow.k)
        assert EvPeriodic(ts, delta, gamma) == arrow.source
        assert shift_n(arrow.source, len(delta) + len(gamma)) == \
            shift_n(arrow.source, len(delta))


def test_stab_frozen_values():
    lp, ts, sk = loop_graph(), twoshift_graph(), sink_graph()
    a_loop = EvPeriodic(lp, (), ("a",))
    assert (stab_min(a_loop), stab_min_ess(a_loop)) == (1, 1)
    a_shift = EvPeriodic(ts, (), ("a",))
    assert stab_min(a_shift) == 1
    assert stab_min_ess(a_shift) == float("inf")
    ab = EvPeriodic(ts, (), ("a", "b"))
    assert stab_min(ab) == 2
    w = vertex_path(sk, "w")
    assert (stab_min(w), stab_min_ess(w)) == (float("inf"), float("inf"))


def test_truncated_dr_groupoid_loop_frozen():
    gpd = truncated_dr_groupoid(loop_graph(), 1, k_cap=1)
    assert len(gpd.units) == 1
    ks = sorted(a.k for a in gpd.arrows)
    assert ks == [-1, 0, 1]
    x = next(iter(gpd.units))
    assert all(a.source == a.target == x for a in gpd.arrows)
    assert gpd.truncated  # k=2 composites fall outside the cap


def test_truncated_dr_groupoid_sink_table_is_total():
    gpd = truncated_dr_groupoid(sink_graph(), 1, k_cap=1)
    assert gpd.truncated  # the flag records construction, not table gaps
    assert len(gpd.arrows) == 4
    composable = [(a, b) for a in gpd.arrows for b in gpd.arrows
                  if a.source == b.target]
    assert all(pair in gpd.compose for pair in composable)


def test_induced_system_matches_the_point_action():
    ts = twoshift_graph()
    sysb = induced_finite_pds(ts, 1)
    assert validate(sysb.pds) == []
    F = sysb.pds.group
    a = F.word(["a"])
    for name, x in sysb.paths.items():
        y = act_word(a, x)
        expect = format_boundary(y) if y is not None and y in set(
            sysb.paths.values()) else None
        assert sysb.pds.act(a, name) == expect


def test_stab_oracle_agreement_on_tiny_graphs():
    graphs = [g for g in simple_digraphs() if len(g.vertices) <= 2]
    for g in graphs:
        oracle = EssentialOracle(g, 2)
        for x in enumerate_boundary(g, 2):
            assert stab_min_ess(x) == oracle(x)
