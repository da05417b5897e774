import random
from fractions import Fraction

import pytest

from routerlab.graph import Demand, verify_routing
from routerlab.router_template import build
from routerlab.pruning import PruningConfig, new_pruned
from routerlab.routing import (RoutingError, route_level, route_u1_to_uk,
                               route_demand)


def pruned(N, k, delta, seed=None, deletions=0):
    t = build(N, k, delta)
    s = new_pruned(t, PruningConfig.relaxed(k))
    if deletions:
        rng = random.Random(seed)
        ses = [(l, c) for i in range(1, k + 1) for (l, c) in t.superedges(i)]
        for _ in range(deletions):
            s.delete_edge(*rng.choice(ses))
        assert s.is_properly_pruned().ok
    return t, s


def test_route_level_one_star():
    t, s = pruned(4, 1, 32)
    d = Demand([(1, 2, 1)])
    r = route_level(s, 1, d)
    rep = verify_routing(s.current_graph(), d, r, 2, 1)
    assert rep.ok and rep.worst_length == 2


def test_route_level_rejects_unrestricted():
    t, s = pruned(4, 1, 32)
    with pytest.raises(RoutingError):
        route_level(s, 1, Demand([(1, 2, 33)]))


def test_route_level_rejects_bad_level():
    t, s = pruned(4, 2, 64)
    with pytest.raises(RoutingError):
        route_level(s, 3, Demand())


def test_route_level_two():
    rng = random.Random(7)
    for trial in range(12):
        t, s = pruned(4, 2, 4096, seed=trial, deletions=rng.randrange(0, 30))
        u2 = sorted(s.u_set(2))
        r2 = Fraction(t.delta, 32 ** 2)
        d = Demand()
        budget = {v: r2 for v in u2}
        for _ in range(10):
            a, b = rng.sample(u2, 2)
            if d.value(a, b) > 0:
                continue
            val = Fraction(rng.randrange(1, 5), rng.choice([1, 2, 4]))
            if budget[a] >= val and budget[b] >= val:
                d.add(a, b, val)
                budget[a] -= val
                budget[b] -= val
        r = route_level(s, 2, d)
        rep = verify_routing(s.current_graph(), d, r, 8, 1)
        assert rep.ok, (trial, rep.violations[:5])


def test_u1_to_uk_sink_map():
    for (N, k, delta) in [(4, 2, 4096), (3, 3, 512)]:
        t, s = pruned(N, k, delta, seed=N * k, deletions=20)
        flow, sm = route_u1_to_uk(s)
        assert set(sm.paths) == s.u_set(1)
        for v, p in sm.paths.items():
            assert p[0] == v and p[-1] == sm.sigma[v]
            assert s.in_u(p[-1], k)
        dem = Demand()
        for v, sg in sorted(sm.sigma.items()):
            if v != sg:
                dem.add(v, sg, t.delta)
        rep = verify_routing(s.current_graph(), dem, flow, (4 * k) ** 2,
                             Fraction(32 ** k * 3 ** (3 * k)))
        assert rep.ok, rep.violations[:5]
        assert flow.is_integral()


def random_restricted_demand(rng, verts, cap, tries=12):
    d = Demand()
    budget = {v: cap for v in verts}
    for _ in range(tries if len(verts) >= 2 else 0):
        a, b = rng.sample(verts, 2)
        if d.value(a, b) > 0:
            continue
        val = min(budget[a], budget[b], Fraction(1))
        if val > 0:
            d.add(a, b, val)
            budget[a] -= val
            budget[b] -= val
    return d


def test_route_demand_verifies():
    rng = random.Random(11)
    for (N, k, delta, ntr) in [(4, 2, 4096, 10), (3, 3, 32 ** 3, 4)]:
        for trial in range(ntr):
            t, s = pruned(N, k, delta, seed=trial * 13 + N,
                          deletions=rng.randrange(0, 40))
            u1 = sorted(s.u_set(1))
            cap = Fraction(t.delta, k ** (4 * k))
            d = random_restricted_demand(rng, u1, cap)
            if not len(d):
                continue
            r = route_demand(s, d)
            rep = verify_routing(s.current_graph(), d, r, 20 * k * k, 1)
            assert rep.ok, (N, k, trial, rep.violations[:3])
            if d.is_integral():
                assert r.is_integral()


def test_route_demand_single_flow_path_per_pair():
    t, s = pruned(4, 2, 4096)
    d = Demand([(1, 2, 1), (1, 3, Fraction(1, 2))])
    r = route_demand(s, d)
    pairs = [pr for _p, pr, _v in r.flow_paths]
    assert len(pairs) == len(set(pairs)) == 2


def test_route_demand_rejects_unrestricted():
    t, s = pruned(4, 2, 64)
    cap = Fraction(t.delta, 2 ** 8)
    with pytest.raises(RoutingError):
        route_demand(s, Demand([(1, 2, cap + 1)]))
