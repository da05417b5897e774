"""Undirected multigraphs, demands, and exact flow verification.

Parallel edges are stored as a single superedge (u,v) with an integer
multiplicity, never materialized individually.  All flow arithmetic is
done with Fraction so that congestion comparisons are exact; no float
ever enters the accounting.
"""

from fractions import Fraction


def _key(u, v):
    return (u, v) if u < v else (v, u)


class MultiGraph:
    """Multigraph over dense integer vertex ids.

    superedges maps (u,v) with u<v to a positive multiplicity.  Removing
    the last copy removes the superedge.  Self-loops are rejected.
    """

    def __init__(self):
        self.vertices = set()
        self.superedges = {}     # (u,v) u<v -> multiplicity
        self.lengths = {}        # (u,v) -> positive int, absent means 1
        self.adj = {}            # v -> set of neighbors

    def add_vertex(self, v):
        if v not in self.vertices:
            self.vertices.add(v)
            self.adj[v] = set()

    def add_edge(self, u, v, mult=1, length=None):
        if u == v:
            raise ValueError("self-loop rejected: %r" % (u,))
        if mult < 1:
            raise ValueError("multiplicity must be >= 1")
        self.add_vertex(u)
        self.add_vertex(v)
        k = _key(u, v)
        self.superedges[k] = self.superedges.get(k, 0) + mult
        self.adj[u].add(v)
        self.adj[v].add(u)
        if length is not None:
            if length < 1:
                raise ValueError("length must be >= 1")
            self.lengths[k] = length

    def remove_copies(self, u, v, count=1):
        k = _key(u, v)
        m = self.superedges.get(k, 0)
        if m < count:
            raise ValueError("removing %d copies of %r, only %d present" % (count, k, m))
        if m == count:
            del self.superedges[k]
            self.lengths.pop(k, None)
            self.adj[k[0]].discard(k[1])
            self.adj[k[1]].discard(k[0])
        else:
            self.superedges[k] = m - count

    def remove_vertex(self, v):
        for u in list(self.adj.get(v, ())):
            k = _key(u, v)
            del self.superedges[k]
            self.lengths.pop(k, None)
            self.adj[u].discard(v)
        self.adj.pop(v, None)
        self.vertices.discard(v)

    def multiplicity(self, u, v):
        return self.superedges.get(_key(u, v), 0)

    def has_edge(self, u, v):
        return _key(u, v) in self.superedges

    def length(self, u, v):
        return self.lengths.get(_key(u, v), 1)

    def degree(self, v):
        return sum(self.superedges[_key(v, u)] for u in self.adj.get(v, ()))

    def neighbors(self, v):
        return self.adj.get(v, set())

    def num_edges(self):
        """Total number of edge copies."""
        return sum(self.superedges.values())

    def copy(self):
        g = MultiGraph()
        g.vertices = set(self.vertices)
        g.superedges = dict(self.superedges)
        g.lengths = dict(self.lengths)
        g.adj = {v: set(s) for v, s in self.adj.items()}
        return g

    def without_edges(self, edges):
        """Copy with every listed superedge removed entirely."""
        g = self.copy()
        for (u, v) in edges:
            if g.has_edge(u, v):
                g.remove_copies(u, v, g.multiplicity(u, v))
        return g


class Demand:
    """A set of unordered vertex pairs with positive rational values."""

    def __init__(self, pairs=()):
        self.values = {}         # (a,b) a<b -> Fraction > 0
        for a, b, val in pairs:
            self.add(a, b, val)

    def add(self, a, b, value):
        if a == b:
            raise ValueError("demand pair endpoints must differ")
        value = Fraction(value)
        if value <= 0:
            raise ValueError("demand values must be positive")
        k = _key(a, b)
        if k in self.values:
            raise ValueError("pair %r listed twice" % (k,))
        self.values[k] = value

    def pairs(self):
        return [(a, b, v) for (a, b), v in sorted(self.values.items())]

    def value(self, a, b):
        return self.values.get(_key(a, b), Fraction(0))

    def support(self):
        s = set()
        for (a, b) in self.values:
            s.add(a)
            s.add(b)
        return s

    def total_at(self, v):
        return sum((val for (a, b), val in self.values.items() if v == a or v == b),
                   Fraction(0))

    def scaled(self, factor):
        factor = Fraction(factor)
        d = Demand()
        for (a, b), val in self.values.items():
            d.values[(a, b)] = val * factor
        return d

    def is_integral(self):
        return all(v.denominator == 1 for v in self.values.values())

    def __len__(self):
        return len(self.values)


class Weighting:
    """Per-vertex weight: uniform constant, degrees of a graph, or explicit map."""

    def __init__(self, kind, payload):
        self.kind = kind
        self.payload = payload

    @classmethod
    def uniform(cls, delta):
        return cls("uniform", Fraction(delta))

    @classmethod
    def degrees(cls, g):
        return cls("degrees", g)

    @classmethod
    def explicit(cls, mapping):
        return cls("explicit", {v: Fraction(w) for v, w in mapping.items()})

    def of(self, v):
        if self.kind == "uniform":
            return self.payload
        if self.kind == "degrees":
            return Fraction(self.payload.degree(v))
        if v not in self.payload:
            raise KeyError("no weight for vertex %r" % (v,))
        return self.payload[v]


class Routing:
    """Flow paths: (vertex sequence, demand pair, positive rational value)."""

    def __init__(self):
        self.flow_paths = []

    def add(self, path, pair, value):
        value = Fraction(value)
        if value <= 0:
            raise ValueError("flow value must be positive")
        self.flow_paths.append((tuple(path), pair, value))

    def is_integral(self):
        return all(v.denominator == 1 for _, _, v in self.flow_paths)

    def scaled(self, factor):
        factor = Fraction(factor)
        r = Routing()
        for path, pair, value in self.flow_paths:
            r.flow_paths.append((path, pair, value * factor))
        return r

    def __len__(self):
        return len(self.flow_paths)


class VerifyReport:
    def __init__(self, ok, worst_congestion, worst_length, violations):
        self.ok = ok
        self.worst_congestion = worst_congestion
        self.worst_length = worst_length
        self.violations = violations

    def __bool__(self):
        return self.ok


def ball(g, v, d):
    """Vertices at hop distance at most d from v (multiplicities irrelevant)."""
    if v not in g.vertices:
        raise KeyError("unknown vertex %r" % (v,))
    seen = {v}
    frontier = [v]
    for _ in range(d):
        nxt = []
        for x in frontier:
            for y in g.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if not nxt:
            break
        frontier = nxt
    return seen


def is_restricted(d, w):
    """True iff every vertex's total incident demand is at most its weight."""
    totals = {}
    for (a, b), val in d.values.items():
        totals[a] = totals.get(a, Fraction(0)) + val
        totals[b] = totals.get(b, Fraction(0)) + val
    return all(t <= w.of(v) for v, t in totals.items())


def verify_routing(g, d, r, max_len, max_cong):
    """Check a routing against its demand and a (length, congestion) contract.

    Each parallel copy has unit capacity, so a superedge of multiplicity m
    may carry up to m * max_cong total flow.  All checks are exact.
    """
    max_cong = Fraction(max_cong)
    violations = []
    edge_flow = {}
    pair_totals = {}
    worst_length = 0
    for path, pair, value in r.flow_paths:
        a, b = pair
        if not path or path[0] != a or path[-1] != b:
            violations.append(("endpoints", path, pair))
            continue
        ok_path = True
        for x, y in zip(path, path[1:]):
            if not g.has_edge(x, y):
                violations.append(("missing-edge", (x, y), pair))
                ok_path = False
                break
        if not ok_path:
            continue
        if len(path) - 1 > max_len:
            violations.append(("length", len(path) - 1, pair))
        worst_length = max(worst_length, len(path) - 1)
        for x, y in zip(path, path[1:]):
            k = _key(x, y)
            edge_flow[k] = edge_flow.get(k, Fraction(0)) + value
        pair_totals[_key(a, b)] = pair_totals.get(_key(a, b), Fraction(0)) + value

    for k, val in d.values.items():
        if pair_totals.get(k, Fraction(0)) != val:
            violations.append(("pair-total", k, pair_totals.get(k, Fraction(0)), val))
    for k in pair_totals:
        if k not in d.values:
            violations.append(("unrequested-pair", k))

    worst_congestion = Fraction(0)
    for k, flow in edge_flow.items():
        m = g.superedges.get(k, 0)
        cong = flow / m if m else None
        if m == 0:
            violations.append(("missing-edge", k, None))
            continue
        worst_congestion = max(worst_congestion, cong)
        if cong > max_cong:
            violations.append(("congestion", k, cong))
    return VerifyReport(not violations, worst_congestion, worst_length, violations)


def vertex_split(g, delta):
    """Split high-degree vertices until every degree is near 2*delta.

    Repeatedly peels ceil(delta)-edge chunks off any vertex of degree
    above 2*delta into fresh copies.  Returns the split graph, a map
    from its superedges to originals, and a map from copies to their
    original vertex.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    chunk = -(-delta.numerator // delta.denominator)   # ceil(delta)
    g2 = g.copy()
    edge_map = {k: k for k in g.superedges}
    copy_map = {v: v for v in g.vertices}
    next_id = max(g.vertices, default=-1) + 1
    for v in sorted(g.vertices):
        while g2.degree(v) > 2 * delta:
            nv = next_id
            next_id += 1
            g2.add_vertex(nv)
            copy_map[nv] = v
            moved = 0
            for u in sorted(g2.neighbors(v)):
                if moved >= chunk:
                    break
                take = min(chunk - moved, g2.multiplicity(v, u))
                g2.remove_copies(v, u, take)
                g2.add_edge(nv, u, take)
                moved += take
    # split never merges distinct superedges, so the map follows copy_map
    edge_map = {k: _key(copy_map[k[0]], copy_map[k[1]]) for k in g2.superedges}
    return g2, edge_map, copy_map


def lift_routing(r2, edge_map, copy_map):
    """Map a routing in a split graph back to the original graph."""
    r = Routing()
    for path, (a, b), value in r2.flow_paths:
        for x, y in zip(path, path[1:]):
            if _key(x, y) not in edge_map:
                raise KeyError("edge %r not in split map" % (_key(x, y),))
        lifted = tuple(copy_map[x] for x in path)
        r.flow_paths.append((lifted, (copy_map[a], copy_map[b]), value))
    return r
