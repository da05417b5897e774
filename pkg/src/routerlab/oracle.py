"""Independent cross-checks: exact small-instance oracles and an
approximate concurrent-flow feasibility test.

The feasibility test packs flow on the explicit path system produced by
enum_paths, using the usual multiplicative-weights scheme.  It is only
approximate, so negative guarantees elsewhere always go through the
exact verifier; here the contract is one-sided: a demand that some
verified routing realizes must never be called infeasible.
"""

from fractions import Fraction

from .graph import Demand, _key


class CapExceeded(ValueError):
    pass


def dist_matrix(g, cap=4000):
    """All-pairs hop distances by BFS from every vertex."""
    if len(g.vertices) > cap:
        raise CapExceeded("vertex cap exceeded")
    out = {}
    for s in sorted(g.vertices):
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                for u in g.neighbors(v):
                    if u not in dist:
                        dist[u] = dist[v] + 1
                        nxt.append(u)
            frontier = nxt
        out[s] = dist
    return out


def enum_paths(g, u, v, d, cap=200000):
    """All simple u-v paths with at most d edges, by bounded DFS."""
    if u not in g.vertices or v not in g.vertices:
        raise KeyError("endpoint not in graph")
    out = []
    stack = [(u, (u,))]
    while stack:
        x, path = stack.pop()
        if x == v:
            out.append(path)
            if len(out) > cap:
                raise CapExceeded("path cap exceeded")
            continue
        if len(path) - 1 >= d:
            continue
        for y in sorted(g.neighbors(x), reverse=True):
            if y not in path:
                stack.append((y, path + (y,)))
    return out


class FeasibilityReport:
    def __init__(self, feasible, ratio, flow, dual):
        self.feasible = feasible
        self.ratio = ratio          # achieved concurrent throughput
        self.flow = flow            # {pair: {path: value}}
        self.dual = dual            # None, or (edges, total weight) witness

    def __bool__(self):
        return self.feasible


def approx_feasible(g, demand, d, eta, eps=Fraction(1, 20), iters=None,
                    cap=200000):
    """Can the demand be routed via paths of <= d edges with congestion
    <= eta?  Multiplicative-weights packing over the explicit path
    system; answers up to a (1 - eps) factor."""
    eps = Fraction(eps)
    eta = Fraction(eta)
    pairs = sorted(demand.values.items())
    if not pairs:
        return FeasibilityReport(True, Fraction(1), {}, None)
    systems = {}
    for (a, b), _val in pairs:
        ps = enum_paths(g, a, b, d, cap)
        if not ps:
            return FeasibilityReport(False, Fraction(0), {},
                                     ((a, b), "no path of length <= %d" % d))
        systems[(a, b)] = ps
    caps = {e: eta * m for e, m in g.superedges.items()}
    weights = {e: 1.0 / float(c) for e, c in caps.items()}
    flow = {pair: {} for pair, _ in pairs}
    if iters is None:
        iters = max(40, int(8 / float(eps)))
    epsf = float(eps) / 4

    def path_weight(p):
        return sum(weights[_key(a, b)] for a, b in zip(p, p[1:]))

    for _round in range(iters):
        for (pair, val) in pairs:
            p = min(systems[pair], key=lambda q: (path_weight(q), q))
            flow[pair][p] = flow[pair].get(p, Fraction(0)) + val
            for a, b in zip(p, p[1:]):
                e = _key(a, b)
                weights[e] *= 1.0 + epsf * float(val / caps[e])
    # scale the accumulated flow back to feasibility
    worst = Fraction(0)
    loads = {}
    for pair, paths in flow.items():
        for p, v in paths.items():
            for a, b in zip(p, p[1:]):
                e = _key(a, b)
                loads[e] = loads.get(e, Fraction(0)) + v
    for e, load in loads.items():
        worst = max(worst, load / caps[e])
    # every pair accumulated iters*val flow; throughput is limited by the
    # most loaded edge
    ratio = Fraction(iters) / worst if worst > 0 else Fraction(1)
    scale = Fraction(1) / max(worst, Fraction(iters))
    out_flow = {pair: {p: v * scale for p, v in paths.items()}
                for pair, paths in flow.items()}
    feasible = ratio >= 1 - eps
    if not feasible and iters < 2000:
        # MW may just not have converged; one deeper pass before giving
        # a negative verdict
        return approx_feasible(g, demand, d, eta, eps, iters=8 * iters,
                               cap=cap)
    dual = None
    if not feasible:
        hot = sorted(loads, key=lambda e: -(loads[e] / caps[e]))[:5]
        dual = (hot, float(sum(weights[e] for e in hot)))
    return FeasibilityReport(feasible, ratio, out_flow, dual)


def _restricted_value(w, a, b, used):
    room_a = w.of(a) - used.get(a, Fraction(0))
    room_b = w.of(b) - used.get(b, Fraction(0))
    return min(room_a, room_b)


def _candidate_demands(g, w):
    verts = sorted(g.vertices)
    out = []
    # greedy matching over vertex pairs
    d = Demand()
    used = {}
    for a, b in zip(verts[::2], verts[1::2]):
        val = _restricted_value(w, a, b, used)
        if val > 0:
            d.add(a, b, val)
            used[a] = used.get(a, Fraction(0)) + val
            used[b] = used.get(b, Fraction(0)) + val
    if len(d):
        out.append(("matching", d))
    # star-concentrated on the max-weight vertex
    c = max(verts, key=lambda v: (w.of(v), v))
    d = Demand()
    others = [v for v in verts if v != c]
    if others:
        share = w.of(c) / len(others)
        for v in others:
            val = min(share, w.of(v))
            if val > 0:
                d.add(c, v, val)
        if len(d):
            out.append(("star", d))
    # A/B bisection matched in order
    half = len(verts) // 2
    a_side, b_side = verts[:half], verts[half:]
    d = Demand()
    used = {}
    for a, b in zip(a_side, b_side):
        val = _restricted_value(w, a, b, used)
        if val > 0:
            d.add(a, b, val)
            used[a] = used.get(a, Fraction(0)) + val
            used[b] = used.get(b, Fraction(0)) + val
    if len(d):
        out.append(("bisection", d))
    return out


def router_probe(g, w, d, eta, eps=Fraction(1, 20)):
    """Adversarial search over extremal restricted demands; reports the
    hardest one found for the (d, eta) routing definition."""
    worst = None
    for name, dem in _candidate_demands(g, w):
        rep = approx_feasible(g, dem, d, eta, eps)
        if worst is None or rep.ratio < worst[2].ratio:
            worst = (name, dem, rep)
    if worst is None:
        return {"demand": None, "kind": "empty", "feasible": True,
                "ratio": Fraction(1)}
    name, dem, rep = worst
    return {"demand": dem, "kind": name, "feasible": rep.feasible,
            "ratio": rep.ratio, "dual": rep.dual}
