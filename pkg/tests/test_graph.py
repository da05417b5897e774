from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from routerlab.graph import (MultiGraph, Demand, Routing, Weighting, _key,
                             ball, is_restricted, verify_routing)


def triangle():
    g = MultiGraph()
    for v in range(3):
        g.add_vertex(v)
    g.add_edge(0, 1)
    g.add_edge(1, 2)
    g.add_edge(0, 2)
    return g


def test_multigraph_basics():
    g = MultiGraph()
    g.add_edge(1, 2, 3)
    assert g.multiplicity(1, 2) == 3
    assert g.multiplicity(2, 1) == 3
    assert g.degree(1) == 3
    assert g.num_edges() == 3
    g.remove_copies(1, 2, 2)
    assert g.multiplicity(1, 2) == 1
    g.remove_copies(1, 2)
    assert not g.has_edge(1, 2)


def test_remove_vertex_clears_incident():
    g = triangle()
    g.remove_vertex(1)
    assert 1 not in g.vertices
    assert not g.has_edge(0, 1)
    assert g.has_edge(0, 2)


def test_demand_rejects_bad_pairs():
    d = Demand()
    with pytest.raises(ValueError):
        d.add(1, 1, 1)
    d.add(1, 2, 1)
    with pytest.raises(ValueError):
        d.add(2, 1, 1)
    with pytest.raises(ValueError):
        d.add(3, 4, 0)


def test_demand_normalizes_pairs():
    d = Demand([(5, 2, 1)])
    assert d.value(2, 5) == 1
    assert d.value(5, 2) == 1
    assert d.total_at(5) == 1


def test_is_restricted():
    d = Demand([(0, 1, 2), (0, 2, 1)])
    assert is_restricted(d, Weighting.uniform(3))
    assert not is_restricted(d, Weighting.uniform(2))
    g = triangle()
    assert is_restricted(d, Weighting.explicit({0: 3, 1: 2, 2: 1}))
    assert not is_restricted(d, Weighting.degrees(g))


def test_ball():
    g = MultiGraph()
    for i in range(5):
        g.add_vertex(i)
    for i in range(4):
        g.add_edge(i, i + 1)
    assert ball(g, 0, 0) == {0}
    assert ball(g, 0, 2) == {0, 1, 2}
    assert ball(g, 2, 10) == set(range(5))


def test_verify_routing_ok_and_violations():
    g = triangle()
    d = Demand([(0, 1, 1)])
    r = Routing()
    r.add((0, 1), (0, 1), 1)
    assert verify_routing(g, d, r, 1, 1).ok
    # wrong value
    r2 = Routing()
    r2.add((0, 1), (0, 1), Fraction(1, 2))
    assert not verify_routing(g, d, r2, 1, 1).ok
    # too long
    r3 = Routing()
    r3.add((0, 2, 1), (0, 1), 1)
    assert not verify_routing(g, d, r3, 1, 1).ok
    assert verify_routing(g, d, r3, 2, 1).ok
    # congestion over a single copy
    d2 = Demand([(0, 1, 2)])
    r4 = Routing()
    r4.add((0, 1), (0, 1), 2)
    rep = verify_routing(g, d2, r4, 1, 1)
    assert not rep.ok and rep.worst_congestion == 2
    assert verify_routing(g, d2, r4, 1, 2).ok


def test_verify_routing_rejects_missing_edge():
    g = triangle()
    d = Demand([(0, 1, 1)])
    r = Routing()
    r.add((0, 3, 1), (0, 1), 1)
    assert not verify_routing(g, d, r, 3, 1).ok


@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8),
                          st.integers(1, 5)), max_size=20))
@settings(max_examples=60, deadline=None)
def test_multiplicity_accumulates(edges):
    g = MultiGraph()
    want = {}
    for u, v, m in edges:
        if u == v:
            continue
        if g.has_edge(u, v):
            cur = g.multiplicity(u, v)
            g.remove_copies(u, v, cur)
            g.add_edge(u, v, cur + m)
        else:
            g.add_edge(u, v, m)
        want[_key(u, v)] = want.get(_key(u, v), 0) + m
    assert {e: g.multiplicity(*e) for e in g.superedges} == want
    assert g.num_edges() == sum(want.values())


@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6),
                          st.fractions(min_value=Fraction(1, 4),
                                       max_value=4)), max_size=10),
       st.fractions(min_value=1, max_value=30))
@settings(max_examples=60, deadline=None)
def test_restriction_monotone_in_weight(pairs, cap):
    d = Demand()
    for a, b, val in pairs:
        if a != b and d.value(a, b) == 0:
            d.add(a, b, val)
    if is_restricted(d, Weighting.uniform(cap)):
        assert is_restricted(d, Weighting.uniform(cap * 2))
