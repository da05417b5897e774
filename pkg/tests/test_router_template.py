import pytest
from hypothesis import given, settings, strategies as st

from routerlab.router_template import build, realize


def test_w2_4_3_structure():
    t = build(4, 2, 3)
    assert t.num_vertices() == 16
    centers = [v for v in t.vertices() if t.is_center(v)]
    assert len(centers) == 4
    edges = sum(1 for i in (1, 2) for _ in t.superedges(i)) * t.delta
    assert edges == 72
    assert t.center_degree() == (4 - 1) * 3 * 2 == 18
    assert t.leaf_degree() == 3 * 2 == 6


def test_centers_are_multiples_of_n():
    t = build(5, 2, 2)
    for v in t.vertices():
        assert t.is_center(v) == (v % 5 == 0)


def test_recursive_self_similarity():
    # every level-1 cluster of W_3 induces the same subtemplate as W_1
    t = build(3, 3, 2)
    small = build(3, 1, 2)
    want = {(leaf % 3, c % 3) for (leaf, c) in small.superedges(1)}
    for cl in range(t.num_stars(1)):
        verts = t.cluster_vertices(1, cl)
        base = min(verts)
        got = {(l - base, c - base) for (l, c) in t.superedges(1)
               if l in verts}
        assert got == want


def test_superedge_levels_partition():
    t = build(4, 3, 2)
    seen = set()
    for i in range(1, 4):
        for e in t.superedges(i):
            key = tuple(sorted(e))
            assert key not in seen
            seen.add(key)
            assert t.superedge_level(*e) == i


def test_realize_matches_template():
    t = build(4, 2, 3)
    g = realize(t)
    assert len(g.vertices) == 16
    assert g.num_edges() == 72
    assert max(g.degree(v) for v in g.vertices) == 18
    for i in (1, 2):
        for (leaf, c) in t.superedges(i):
            assert g.multiplicity(leaf, c) == 3


def test_strict_mode_rejects_small_parameters():
    with pytest.raises(ValueError):
        build(4, 2, 3, strict=True)


@given(st.integers(2, 5), st.integers(1, 3), st.integers(1, 4))
@settings(max_examples=40, deadline=None)
def test_degree_formulas(N, k, delta):
    t = build(N, k, delta)
    g = realize(t)
    assert len(g.vertices) == N ** k
    for v in g.vertices:
        want = (N - 1) * delta * k if t.is_center(v) else delta * k
        assert g.degree(v) == want


@given(st.integers(2, 5), st.integers(1, 3))
@settings(max_examples=30, deadline=None)
def test_star_membership_consistent(N, k):
    t = build(N, k, 2)
    for i in range(1, k + 1):
        for s in range(t.num_stars(i)):
            members = t.star_members(i, s)
            assert len(members) == N
            center = t.star_center(i, s)
            assert center in members
            for m in members:
                assert t.star_id(i, m) == s
