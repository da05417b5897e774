"""Router witnesses: embeddings of a pruned router into a host graph,
and routing host demands through them.

An embedding maps router vertices to distinct host vertices and assigns
every live edge copy a host path between the mapped endpoints.  A
witness adds two parameters: every host vertex lies on at least
Delta/beta embedding paths, and every host degree is at most
alpha*Delta.  Host demands are then routed by handing each pair off to
proxy leaves of the router (picked positionally from the per-vertex path
sets), routing the proxy demand inside the router, and translating the
result back through the embedding.

Also here: the sparsified router (a low-degree subgraph of the host that
still routes Delta*-restricted demands), the bipartite degree-lowering
selection it relies on, and the scattered-or-large-ball search.
"""

import heapq
from fractions import Fraction

from .graph import (MultiGraph, Demand, Routing, Weighting, _key,
                    is_restricted)
from .pruning import PrunedRouter
from .router_template import build
from .routing import route_demand


def ceil_frac(x):
    x = Fraction(x)
    return -(-x.numerator // x.denominator)


class Embedding:
    """Injective vertex map plus one host path per live edge copy.

    Paths are keyed (level, leaf, copy) and stored oriented from the
    mapped leaf to the mapped center.
    """

    def __init__(self, vertex_map, paths):
        self.vertex_map = dict(vertex_map)
        self.paths = {k: tuple(p) for k, p in paths.items()}
        self.d_star = max((len(p) - 1 for p in self.paths.values()), default=1)
        self.d_star = max(self.d_star, 1)
        self.eta_star = None        # filled by stats()

    def edge_loads(self):
        loads = {}
        for p in self.paths.values():
            for a, b in zip(p, p[1:]):
                e = _key(a, b)
                loads[e] = loads.get(e, 0) + 1
        return loads

    def stats(self, host):
        """Recompute d* and the per-copy congestion eta* against a host."""
        self.d_star = max(max((len(p) - 1 for p in self.paths.values()),
                              default=1), 1)
        eta = Fraction(1)
        for e, cnt in self.edge_loads().items():
            eta = max(eta, Fraction(cnt, host.multiplicity(*e)))
        self.eta_star = eta
        return self.d_star, self.eta_star


class RouterWitness:
    def __init__(self, host, pruned, emb, alpha, beta):
        self.host = host
        self.pruned = pruned
        self.emb = emb
        self.alpha = Fraction(alpha)
        self.beta = Fraction(beta)

    @property
    def q(self):
        return ceil_frac(Fraction(self.pruned.t.delta) / self.beta)

    def path_sets(self):
        """For each host vertex v: list of (distinguished leaf u, subpath
        from v to the mapped leaf), over all embedding paths through v,
        in key order."""
        out = {v: [] for v in self.host.vertices}
        for key in sorted(self.emb.paths):
            p = self.emb.paths[key]
            leaf = key[1]
            for idx, v in enumerate(p):
                if v in out:
                    out[v].append((leaf, tuple(reversed(p[:idx + 1]))))
        return out


class WitnessReport:
    def __init__(self, checks):
        self.checks = checks                     # list of (name, ok, detail)
        self.ok = all(ok for _, ok, _ in checks)

    def __bool__(self):
        return self.ok


def _live_copy_keys(s):
    keys = set()
    for (i, leaf), live in s.in_w.items():
        if live:
            for c in range(s.rem[(i, leaf)]):
                keys.add((i, leaf, c))
    return keys


def identity_witness(s):
    """Witness for the pruned router embedded into its own realization:
    every surviving copy maps to itself."""
    host = s.current_graph()
    t = s.t
    vm = {v: v for v in host.vertices}
    paths = {}
    for (i, leaf), live in sorted(s.in_w.items()):
        if not live or s.rem[(i, leaf)] <= 0:
            continue
        center = t.level_center(i, leaf)
        for c in range(s.rem[(i, leaf)]):
            paths[(i, leaf, c)] = (leaf, center)
    emb = Embedding(vm, paths)
    emb.stats(host)
    degs = [host.degree(v) for v in host.vertices]
    max_deg = max(degs, default=t.delta)
    min_deg = min(degs, default=t.delta)
    alpha = max(Fraction(max_deg, t.delta), Fraction(1))
    beta = max(Fraction(1), Fraction(t.delta, min_deg)) if min_deg else Fraction(1)
    return RouterWitness(host, s, emb, alpha, beta)


def validate_witness(w):
    checks = []
    host, emb, s = w.host, w.emb, w.pruned
    t = s.t
    images = list(emb.vertex_map.values())
    checks.append(("vertex-map-injective", len(set(images)) == len(images), None))
    bad = []
    for key, p in emb.paths.items():
        i, leaf, _c = key
        center = t.level_center(i, leaf)
        if t.is_center(leaf) or not t.is_center(center):
            bad.append(("edge-shape", key))
        if p[0] != emb.vertex_map.get(leaf) or p[-1] != emb.vertex_map.get(center):
            bad.append(("endpoints", key))
        for a, b in zip(p, p[1:]):
            if not host.has_edge(a, b):
                bad.append(("missing-host-edge", key, (a, b)))
    checks.append(("paths-well-formed", not bad, bad[:5]))
    want = _live_copy_keys(s)
    have = set(emb.paths)
    checks.append(("one-path-per-live-copy", want == have,
                   (len(want - have), len(have - want))))
    loads = emb.edge_loads()
    uncovered = [e for e in host.superedges if e not in loads]
    checks.append(("every-host-edge-covered", not uncovered, uncovered[:5]))
    q = w.q
    counts = {v: 0 for v in host.vertices}
    for p in emb.paths.values():
        for v in set(p):
            if v in counts:
                counts[v] += 1
    low = [v for v, c in counts.items() if c < q]
    checks.append(("path-count-at-least-q", not low, low[:5]))
    cap = w.alpha * t.delta
    high = [v for v in host.vertices if host.degree(v) > cap]
    checks.append(("degree-at-most-alpha-delta", not high, high[:5]))
    checks.append(("beta-at-least-one", w.beta >= 1, w.beta))
    d_star = max(max((len(p) - 1 for p in emb.paths.values()), default=1), 1)
    eta = Fraction(1)
    for e, cnt in loads.items():
        eta = max(eta, Fraction(cnt, host.multiplicity(*e)))
    checks.append(("stats-consistent",
                   emb.d_star == d_star and emb.eta_star == eta,
                   (emb.d_star, d_star, emb.eta_star, eta)))
    pp = s.is_properly_pruned()
    checks.append(("properly-pruned", bool(pp), getattr(pp, "violations", None)))
    return WitnessReport(checks)


def _dijkstra(host, src, dst, weight, usable):
    dist = {src: Fraction(0)}
    prev = {}
    heap = [(Fraction(0), src)]
    while heap:
        dv, v = heapq.heappop(heap)
        if dv > dist[v]:
            continue
        if v == dst:
            break
        for u in host.neighbors(v):
            e = _key(v, u)
            if not usable(e):
                continue
            nd = dv + weight(e)
            if u not in dist or nd < dist[u]:
                dist[u] = nd
                prev[u] = v
                heapq.heappush(heap, (nd, u))
    if dst not in dist:
        return None
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    path.reverse()
    return tuple(path)


def _hop_path(host, src, dst, usable, d_max):
    seen = {src: None}
    frontier = [src]
    for _ in range(d_max):
        nxt = []
        for v in frontier:
            for u in sorted(host.neighbors(v)):
                if u not in seen and usable(_key(v, u)):
                    seen[u] = v
                    nxt.append(u)
                    if u == dst:
                        path = [dst]
                        while path[-1] != src:
                            path.append(seen[path[-1]])
                        path.reverse()
                        return tuple(path)
        if not nxt:
            break
        frontier = nxt
    return None


def greedy_embed(c, t, d_max, eta_max, fake_budget):
    """Map the template into host c and embed each edge copy along a
    congestion-penalized shortest path of hop length at most d_max.
    Copies that cannot be placed go to the fake set F; returns
    (Embedding, F) when |F| <= fake_budget, else None."""
    if t.num_vertices() > len(c.vertices):
        raise ValueError("template larger than host")
    eta_max = Fraction(eta_max)
    if (all(v in c.vertices for v in t.vertices())
            and all(c.has_edge(leaf, center)
                    for i in range(1, t.k + 1)
                    for (leaf, center) in t.superedges(i))):
        # host already contains the template on the same ids; keep them
        vm = {v: v for v in t.vertices()}
        return _embed_with_map(c, t, vm, d_max, eta_max, fake_budget)
    seed = max(sorted(c.vertices), key=lambda v: c.degree(v))
    order = []
    seen = {seed}
    frontier = [seed]
    while frontier:
        nxt = []
        for v in frontier:
            order.append(v)
            for u in sorted(c.neighbors(v)):
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    for v in sorted(c.vertices):
        if v not in seen:
            order.append(v)
            seen.add(v)
    vm = {}
    for tv, hv in zip(sorted(t.vertices()), order):
        vm[tv] = hv
    return _embed_with_map(c, t, vm, d_max, eta_max, fake_budget)


def _embed_with_map(c, t, vm, d_max, eta_max, fake_budget):
    load = {}

    def usable(e):
        return load.get(e, 0) < eta_max * c.multiplicity(*e)

    def weight(e):
        return 1 + Fraction(4 * load.get(e, 0),
                            c.multiplicity(*e)) / eta_max

    paths = {}
    fakes = set()
    for i in range(1, t.k + 1):
        for (leaf, center) in t.superedges(i):
            src, dst = vm[leaf], vm[center]
            for copy in range(t.delta):
                key = (i, leaf, copy)
                p = _dijkstra(c, src, dst, weight, usable)
                if p is not None and len(p) - 1 > d_max:
                    p = _hop_path(c, src, dst, usable, d_max)
                if p is None or len(p) - 1 > d_max:
                    fakes.add(key)
                    continue
                paths[key] = p
                for a, b in zip(p, p[1:]):
                    e = _key(a, b)
                    load[e] = load.get(e, 0) + 1
    if len(fakes) > fake_budget:
        return None
    emb = Embedding(vm, paths)
    emb.stats(c)
    return emb, fakes


class ScatteredCert:
    """Asserts every radius-d ball of the input graph has fewer than
    n^(1-eps) vertices."""

    def __init__(self, d, eps, n):
        self.d = d
        self.eps = Fraction(eps)
        self.n = n


def scattered_or_ball(g, d, eps):
    """Either a ScatteredCert, or a vertex whose radius-4d/eps ball
    holds at least n^(1-eps) vertices."""
    eps = Fraction(eps)
    if not (0 < eps < 1) or d < 1:
        raise ValueError("need 0 < eps < 1 and d >= 1")
    p, q = eps.numerator, eps.denominator
    n = len(g.vertices)
    if n == 0:
        return ScatteredCert(d, eps, n)
    if n == 1:
        return next(iter(g.vertices))
    m = max(g.num_edges(), 1)
    gp = g.copy()
    scattered = set()

    def big(size):
        # size >= n^(1 - eps)
        return size ** q >= n ** (q - p)

    while True:
        for v in [v for v in gp.vertices if not gp.neighbors(v)]:
            gp.remove_vertex(v)
            scattered.add(v)
        live_u = [v for v in sorted(gp.vertices) if v not in scattered]
        if not live_u or not big(len(gp.vertices)):
            return ScatteredCert(d, eps, n)
        u = live_u[0]
        # BFS once; dist labels drive the layer edge counts
        dist = {u: 0}
        frontier = [u]
        r = 0
        edge_at = {}         # radius -> cumulative edge count
        cum = 0
        while frontier:
            for x in frontier:
                cum += sum(gp.multiplicity(x, y) for y in gp.neighbors(x)
                           if dist.get(y, r + 1) <= r)
            edge_at[r] = cum
            nxt = []
            for x in frontier:
                for y in sorted(gp.neighbors(x)):
                    if y not in dist:
                        dist[y] = r + 1
                        nxt.append(y)
            frontier = nxt
            r += 1
        max_r = r - 1

        def e_j(j):
            # edges inside B(u, 2(j+1)d)
            return edge_at[min(2 * (j + 1) * d, max_r)]

        j = 1
        while e_j(j + 1) ** q > (m ** p) * (e_j(j) ** q):
            j += 1
        s_radius = 2 * (j + 1) * d
        s = {v for v, dv in dist.items() if dv <= s_radius}
        s2 = {v for v, dv in dist.items() if dv <= 2 * (j + 2) * d}
        s1 = {v for v, dv in dist.items() if dv <= s_radius + d}
        if big(len(s2)):
            return u
        for v in s:
            gp.remove_vertex(v)
        scattered |= s1


def lower_degrees(h, z, delta_hat, gamma_p, r_hat, trace=None):
    """Pick ceil(delta_hat) incident edges per left vertex of a bipartite
    graph so that no right vertex is overused.

    h maps each left vertex x to its list of right endpoints (one entry
    per edge).  Requires deg(x) >= z*delta_hat and deg(y) <=
    gamma_p*z*delta_hat.  Runs rounds of greedy selection with
    overload counters; each round settles at least half of the remaining
    left vertices.  Returns {x: selected right endpoints}.
    """
    delta_hat = Fraction(delta_hat)
    z = Fraction(z)
    gamma_p = Fraction(gamma_p)
    r_hat = Fraction(r_hat)
    if z < 2:
        raise ValueError("need z >= 2")
    xs = sorted(h)
    if not xs:
        return {}
    ydeg = {}
    for x in xs:
        if len(h[x]) < z * delta_hat:
            raise ValueError("left vertex %r has degree below z*delta_hat" % (x,))
        for y in h[x]:
            ydeg[y] = ydeg.get(y, 0) + 1
    cap = gamma_p * z * delta_hat
    for y, dy in ydeg.items():
        if dy > cap:
            raise ValueError("right vertex %r exceeds gamma'*z*delta_hat" % (y,))
    rounds_cap = max(1, (len(xs) - 1).bit_length()) if len(xs) > 1 else 1
    r = r_hat / rounds_cap
    if r <= 4 * gamma_p:
        raise ValueError("r_hat too small: r_hat/ceil(log|X|) must exceed "
                         "4*gamma'")
    dh = ceil_frac(delta_hat)
    out = {}
    remaining = list(xs)
    guard = 0
    while remaining:
        guard += 1
        if guard > rounds_cap + 2:
            raise AssertionError("round-halving guarantee failed")
        n_y = {}

        def overloaded(y):
            return n_y.get(y, 0) >= (r - 1) * dh

        settled = []
        for x in remaining:
            usable = [y for y in h[x] if not overloaded(y)]
            if len(usable) >= delta_hat:
                pick = usable[:dh]
                out[x] = pick
                for y in pick:
                    n_y[y] = n_y.get(y, 0) + 1
                settled.append(x)
        if trace is not None:
            trace.append((len(remaining), len(settled)))
        if not settled:
            raise AssertionError("no left vertex settled in a round")
        remaining = [x for x in remaining if x not in out]
    return out


def _proxy_route(host, pruned, emb, path_sets, width, demand, factor, copy_count):
    """Shared core of witness_route and sparsified_route: positional
    proxy matching, router routing at a scaled-down value, translation
    back through the embedding."""
    t = pruned.t
    k = t.k
    proxy = {}
    plan = []            # (a, b, j, unit, a_leaf, r_a, b_leaf, r_b)
    for (a, b), val in sorted(demand.values.items()):
        unit = val / width
        for j in range(width):
            a_leaf, r_a = path_sets[a][j]
            b_leaf, r_b = path_sets[b][j]
            plan.append((a, b, j, unit, a_leaf, r_a, b_leaf, r_b))
            if a_leaf != b_leaf:
                key = _key(a_leaf, b_leaf)
                proxy[key] = proxy.get(key, Fraction(0)) + unit
    # partial-flow congestion along the handoff subpaths stays within
    # d* * eta* * (per-path demand cap); checked by callers' verify
    if proxy:
        dprime = Demand()
        for (x, y), val in proxy.items():
            dprime.values[(x, y)] = val / factor
        mid = route_demand(pruned, dprime)
        mid_paths = {}
        for path, pair, _val in mid.flow_paths:
            mid_paths[_key(*pair)] = path
    else:
        mid_paths = {}

    copy_load = {}       # (level, leaf) -> per-copy accumulated flow

    def translate(wpath, value):
        """Host path for a router path, one embedding path per edge,
        least-loaded copy first."""
        host_path = [emb.vertex_map[wpath[0]]]
        for x, y in zip(wpath, wpath[1:]):
            i = t.superedge_level(x, y)
            leaf = x if not t.is_center(x) else y
            loads = copy_load.setdefault(
                (i, leaf), [Fraction(0)] * copy_count(i, leaf))
            c = min(range(len(loads)), key=lambda idx: loads[idx])
            loads[c] += value
            ep = emb.paths[(i, leaf, c)]
            if x != leaf:
                ep = tuple(reversed(ep))
            host_path.extend(ep[1:])
        return tuple(host_path)

    out = Routing()
    for a, b, j, unit, a_leaf, r_a, b_leaf, r_b in plan:
        if a_leaf == b_leaf:
            full = tuple(r_a) + tuple(reversed(r_b))[1:]
        else:
            wpath = mid_paths[_key(a_leaf, b_leaf)]
            if wpath[0] != a_leaf:
                wpath = tuple(reversed(wpath))
            # r_a ends at vm[a_leaf] == mid_host[0]; mid_host ends at
            # vm[b_leaf] == r_b's last vertex
            mid_host = translate(wpath, unit)
            full = tuple(r_a) + tuple(mid_host[1:]) + tuple(reversed(r_b))[1:]
        out.add(full, (a, b), unit)
    return out


def witness_route(w, demand, restriction=None):
    """Route a degree-restricted host demand through the witness.

    The result verifies with length at most 22*d*(k^2) and congestion at
    most 2*alpha*beta*k^(4k+1)*d**eta*.
    """
    rep = validate_witness(w)
    if not rep:
        raise ValueError("invalid witness: %r" %
                         [c for c in rep.checks if not c[1]])
    if restriction is None:
        restriction = Weighting.degrees(w.host)
    if not is_restricted(demand, restriction):
        raise ValueError("demand exceeds the degree restriction")
    s = w.pruned
    t = s.t
    k = t.k
    q = w.q
    ps = w.path_sets()
    trimmed = {v: lst[:q] for v, lst in ps.items()}
    for v in demand.support():
        if len(trimmed[v]) < q:
            raise ValueError("vertex %r lies on fewer than q paths" % (v,))
    factor = w.alpha * w.beta * (k ** (4 * k + 1)) * w.emb.d_star
    return _proxy_route(w.host, s, w.emb, trimmed, q, demand, factor,
                        lambda i, leaf: s.rem[(i, leaf)])


class SparsifiedRouter:
    def __init__(self, cprime, bundles, qsets, delta_star, delta_prime,
                 gamma, thinned):
        self.cprime = cprime            # simple host subgraph
        self.bundles = bundles          # (level, leaf) -> selected copy count
        self.qsets = qsets              # host vertex -> list of path keys
        self.delta_star = delta_star
        self.delta_prime = delta_prime
        self.gamma = gamma
        self.thinned = thinned          # pruned router thinned to delta_prime


def thinned_view(s, delta_prime):
    """The pruned router re-read with bundles of size delta_prime: same
    membership sets, each surviving bundle keeps its first delta_prime
    copies."""
    t = s.t
    view = PrunedRouter(build(t.N, t.k, delta_prime), s.cfg)
    view.mask = dict(s.mask)
    view.star_destroyed = set(s.star_destroyed)
    view.cluster_destroyed = set(s.cluster_destroyed)
    view.n2 = dict(s.n2)
    for key in list(view.in_w):
        if s.in_w.get(key) and s.rem[key] > 0:
            view.in_w[key] = True
            view.rem[key] = delta_prime
        else:
            view.in_w[key] = False
            view.rem[key] = 0
    return view


def _iroot_ceil(x, r):
    """Smallest integer g with g**r >= x."""
    if x <= 1:
        return 1
    g = int(round(x ** (1.0 / r)))
    while g ** r >= x:
        g -= 1
    while g ** r < x:
        g += 1
    return g


def sparsify(w, delta_star, gamma=None, trace=None):
    """Select delta_prime copies per bundle and delta_prime paths per
    host vertex, and return their union as a sparse routable subgraph."""
    s = w.pruned
    t = s.t
    k = t.k
    d_star = w.emb.d_star
    delta_prime = delta_star // (2 * k * d_star)
    if delta_prime < 1:
        raise ValueError("delta_star below 2*k*d*")
    for (i, leaf), live in s.in_w.items():
        if live and 0 < s.rem[(i, leaf)] < delta_prime:
            raise ValueError("bundle (%d,%r) thinner than delta_prime" %
                             (i, leaf))
    bundles = {key: delta_prime for key, live in s.in_w.items()
               if live and s.rem[key] > 0}

    # bipartite selection: host vertex x -> paths through x, grouped by
    # the path's distinguished leaf
    incident = {v: [] for v in w.host.vertices}
    for key in sorted(w.emb.paths):
        for v in set(w.emb.paths[key]):
            if v in incident:
                incident[v].append(key)
    h = {x: [key[1] for key in keys] for x, keys in incident.items()}
    min_deg = min((len(lst) for lst in h.values()), default=0)
    if min_deg < 2 * delta_prime:
        raise ValueError("some host vertex lies on fewer than 2*delta_prime "
                         "embedding paths; selection cap infeasible")
    z = Fraction(min_deg, delta_prime)
    ydeg = {}
    for lst in h.values():
        for y in lst:
            ydeg[y] = ydeg.get(y, 0) + 1
    gamma_p = max(Fraction(1),
                  Fraction(ceil_frac(Fraction(max(ydeg.values())) /
                                     (z * delta_prime))))
    n_x = len(h)
    rounds = max(1, (n_x - 1).bit_length()) if n_x > 1 else 1
    if gamma is None:
        gamma = max(_iroot_ceil(len(w.host.vertices) ** 16, k),
                    ceil_frac(8 * gamma_p * rounds))
    gamma = Fraction(gamma)
    if gamma / rounds <= 4 * gamma_p:
        raise ValueError("gamma too small for the degree-lowering rounds: "
                         "need gamma > 4*gamma'*ceil(log|X|) = %s" %
                         (4 * gamma_p * rounds,))
    sel_leaves = lower_degrees(h, z, delta_prime, gamma_p, gamma, trace)
    # convert selected leaf picks back to concrete path keys per vertex
    qsets = {}
    for x, picks in sel_leaves.items():
        used = set()
        keys = []
        want = {}
        for y in picks:
            want[y] = want.get(y, 0) + 1
        for key in incident[x]:
            if want.get(key[1], 0) > 0 and key not in used:
                want[key[1]] -= 1
                used.add(key)
                keys.append(key)
        qsets[x] = keys

    cprime = MultiGraph()
    for v in w.host.vertices:
        cprime.add_vertex(v)

    def add_path(p):
        for a, b in zip(p, p[1:]):
            if not cprime.has_edge(a, b):
                cprime.add_edge(a, b, 1, w.host.lengths.get(_key(a, b)))

    for keys in qsets.values():
        for key in keys:
            add_path(w.emb.paths[key])
    for (i, leaf), cnt in bundles.items():
        for c in range(cnt):
            add_path(w.emb.paths[(i, leaf, c)])
    if cprime.num_edges() > len(w.host.vertices) * delta_star:
        raise AssertionError("sparsified edge bound violated")
    return SparsifiedRouter(cprime, bundles, qsets, delta_star, delta_prime,
                            gamma, thinned_view(s, delta_prime))


def sparsified_route(sp, w, demand):
    """Route a Delta*-restricted host demand inside the sparsified
    subgraph; verifies with length 22*d*(k^2) and congestion
    8*gamma*(d*)^2*eta**k^(4k+1)."""
    if not is_restricted(demand, Weighting.uniform(sp.delta_star)):
        raise ValueError("demand is not delta_star-restricted")
    t = sp.thinned.t
    k = t.k
    d_star = w.emb.d_star
    path_sets = {}
    for v in demand.support():
        lst = []
        for key in sp.qsets[v]:
            p = w.emb.paths[key]
            idx = p.index(v)
            lst.append((key[1], tuple(reversed(p[:idx + 1]))))
        if len(lst) < sp.delta_prime:
            raise ValueError("vertex %r has too few selected paths" % (v,))
        path_sets[v] = lst[:sp.delta_prime]
    factor = 4 * sp.gamma * d_star * (k ** (4 * k + 1))
    # restrict translation to the selected copies
    sel_paths = {}
    for (i, leaf), cnt in sp.bundles.items():
        for c in range(cnt):
            sel_paths[(i, leaf, c)] = w.emb.paths[(i, leaf, c)]
    emb_view = Embedding(w.emb.vertex_map, sel_paths)
    emb_view.stats(w.host)
    return _proxy_route(sp.cprime, sp.thinned, emb_view, path_sets,
                        sp.delta_prime, demand, factor,
                        lambda i, leaf: sp.bundles[(i, leaf)])
