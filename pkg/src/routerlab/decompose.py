"""End-to-end pipeline: build a router decomposition of an arbitrary
graph and keep it valid under batched edge deletions.

Build loop: strip low-degree vertices, cluster what is left, and for
each large cluster try to embed a recursive router template into it.  A
successful embedding is trimmed (fake copies pruned, under-covered
vertices dropped) and becomes a witnessed cluster with a sparsified
subgraph.  Failures shed edges via the scattered-or-ball search and the
residue is re-clustered.  Whatever never makes it into a cluster lands
in E^del, tagged with the cause.

Batch updates delete host edges: embedding paths through a deleted edge
die, the router prunes the matching copies, vertices whose surviving
path count drops below a fraction of their phase-start count are
cascaded out, and the sparsifier is recomputed for the drained cluster.
"""

import math
from fractions import Fraction

from .graph import MultiGraph, ball, _key
from .router_template import build
from .pruning import PruningConfig, new_pruned
from .clustering import init_clustering
from .witness import (Embedding, RouterWitness, greedy_embed, sparsify,
                      scattered_or_ball, ScatteredCert, validate_witness)
from .spanner import ClusterEntry, RouterDecomposition


class PipelineConfig:
    def __init__(self, k, delta, delta_star, d_cap=None, eta_cap=4,
                 fake_budget_frac=Fraction(1, 4), path_floor=None,
                 drop_frac=None, degree_floor=None, large_threshold=None,
                 template_n=None, iter_cap=8, batch_bound=None, rho=None,
                 preset="relaxed", recourse_exp=None, scatter_d=1,
                 scatter_eps=Fraction(1, 2)):
        self.k = k
        self.k_hat = k * k
        self.delta = delta
        self.delta_star = delta_star
        self.d_cap = d_cap if d_cap is not None else 2 * self.k_hat
        self.eta_cap = eta_cap
        self.fake_budget_frac = Fraction(fake_budget_frac)
        self.path_floor = path_floor
        self.drop_frac = (Fraction(drop_frac) if drop_frac is not None else
                          Fraction(1, 4 * k ** (16 * k * k) * self.d_cap))
        self.degree_floor = degree_floor if degree_floor is not None else delta
        self.large_threshold = (large_threshold if large_threshold is not None
                                else delta)
        self.template_n = template_n
        self.iter_cap = iter_cap
        self.batch_bound = (batch_bound if batch_bound is not None
                            else max(1, delta // (2 * (self.k_hat + 1))))
        self.rho = rho if rho is not None else max(2, iter_cap)
        self.preset = preset
        self.recourse_exp = (Fraction(recourse_exp) if recourse_exp is not None
                             else Fraction(13, k * k))
        self.scatter_d = scatter_d
        self.scatter_eps = Fraction(scatter_eps)
        self.validate()

    def validate(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.delta_star < 2 * self.k_hat * self.d_cap:
            raise ValueError("delta_star must be at least 2*k_hat*d_cap")
        self.pruning_cfg()
        return self

    def pruning_cfg(self, n=None):
        if self.preset == "paper":
            base = PruningConfig.paper(self.k_hat)
        else:
            base = PruningConfig.relaxed(self.k_hat)
        if n is not None and n - 1 < base.star_keep_frac * n:
            # narrow templates have only n-1 leaves per star; relax the
            # leaf floor so a fresh star is already above it
            base = PruningConfig(
                base.phases, base.edge_budget_frac, base.star_budget_frac,
                base.cluster_survival_frac, base.min_bundle_frac,
                Fraction(n - 1, n), base.cluster_keep_frac).validate()
        return base

    def template_size(self, nv):
        """N for a cluster of nv vertices: floor(nv^(1/k_hat - 1/k_hat^2)),
        unless pinned by template_n."""
        if self.template_n is not None:
            return self.template_n
        kh = self.k_hat
        # floor(nv^(p/q)) with p/q = 1/kh - 1/kh^2 exactly
        exp = Fraction(1, kh) - Fraction(1, kh * kh)
        p, q = exp.numerator, exp.denominator
        n = 1
        while (n + 1) ** q <= nv ** p:
            n += 1
        return n

    def path_floor_at(self, n):
        """Smallest integer t with t * n^(4/k_hat) >= delta."""
        if self.path_floor is not None:
            return self.path_floor
        kh = self.k_hat
        t = 1
        while t ** kh * n ** 4 < self.delta ** kh:
            t += 1
        return t


class BuildReport:
    def __init__(self):
        self.causes = {}            # host superedge -> cause tag
        self.iterations = 0
        self.degraded = False
        self.cluster_ids = []

    def cause_counts(self):
        out = {}
        for c in self.causes.values():
            out[c] = out.get(c, 0) + 1
        return out


class BatchReport:
    def __init__(self):
        self.deleted = 0
        self.inserted = 0
        self.to_e_del = {}          # cause -> count
        self.dissolved = []
        self.recourse = 0           # C' edge-set churn across clusters

    def charge(self, cause, count=1):
        self.to_e_del[cause] = self.to_e_del.get(cause, 0) + count


class _WitnessedCluster:
    """A cluster with its embedded router, kept consistent under
    deletions.  bundles maps each live superedge of the router to the
    ordered list of surviving embedding paths (index = copy)."""

    def __init__(self, cid, cfg, pruned, vertex_map, bundles):
        self.id = cid
        self.cfg = cfg
        self.s = pruned
        self.vm = dict(vertex_map)
        self.bundles = bundles
        self.entry = None           # ClusterEntry, set by rebuild
        self.n_v = {}
        self.lam = {}               # phase-start snapshot of n_v

    def _sync_pruning(self):
        """Drop bundles the router no longer carries."""
        for key in list(self.bundles):
            if not self.s.in_w.get(key) or self.s.rem.get(key, 0) <= 0:
                del self.bundles[key]
            else:
                assert len(self.bundles[key]) == self.s.rem[key], \
                    "bundle path count out of sync with the router"

    def paths_iter(self):
        for key in sorted(self.bundles):
            for p in self.bundles[key]:
                yield key, p

    def delete_copies_through(self, pred):
        """Remove every embedding path matching pred, pruning the router
        copy alongside.  Returns the number of paths removed."""
        t = self.s.t
        removed = 0
        for key in sorted(self.bundles):
            keep = []
            for p in self.bundles.get(key, ()):
                if pred(p):
                    i, leaf = key
                    self.s.delete_edge(leaf, t.level_center(i, leaf))
                    removed += 1
                else:
                    keep.append(p)
            if key in self.bundles:
                self.bundles[key] = keep
        self._sync_pruning()
        return removed

    def rebuild(self, source_graph):
        """Recompute host, witness and sparsifier from the surviving
        paths.  source_graph supplies edge multiplicities; cluster edges
        not covered by any path are returned as dropped."""
        cfg = self.cfg
        t = self.s.t
        pp = self.s.is_properly_pruned()
        if not pp:
            raise ValueError("router no longer properly pruned")
        covered = {}
        self.n_v = {}
        for key, p in self.paths_iter():
            for a, b in zip(p, p[1:]):
                covered[_key(a, b)] = True
            for v in set(p):
                self.n_v[v] = self.n_v.get(v, 0) + 1
        if not covered:
            raise ValueError("no embedding paths survive")
        host = MultiGraph()
        for e in sorted(covered):
            if not source_graph.has_edge(*e):
                raise ValueError("embedding path uses a dead edge")
            host.add_edge(e[0], e[1], source_graph.multiplicity(*e),
                          source_graph.lengths.get(e))
        dropped = [e for e in source_graph.superedges if e not in covered]
        paths = {}
        for (i, leaf) in sorted(self.bundles):
            for c, p in enumerate(self.bundles[(i, leaf)]):
                paths[(i, leaf, c)] = p
        emb = Embedding(self.vm, paths)
        emb.stats(host)
        degs = [host.degree(v) for v in host.vertices]
        alpha = max(Fraction(max(degs), t.delta), Fraction(1))
        min_count = min(self.n_v[v] for v in host.vertices)
        beta = max(Fraction(1), Fraction(t.delta, min_count))
        w = RouterWitness(host, self.s, emb, alpha, beta)
        rep = validate_witness(w)
        if not rep:
            raise ValueError("witness invalid: %r" %
                             [c[0] for c in rep.checks if not c[1]])
        sp = sparsify(w, cfg.delta_star)
        self.entry = ClusterEntry(self.id, host, w, sp)
        return dropped

    def snapshot(self):
        self.lam = dict(self.n_v)


def _strip_low_degree(g, floor, causes, tag):
    """Iteratively drop vertices under the degree floor; their edges are
    charged to E^del."""
    changed = True
    while changed:
        changed = False
        for v in sorted(g.vertices):
            if 0 < g.degree(v) < floor:
                for u in sorted(g.neighbors(v)):
                    causes[_key(u, v)] = tag
                g.remove_vertex(v)
                changed = True
        for v in [v for v in g.vertices if not g.neighbors(v)]:
            g.remove_vertex(v)


def _drop_cluster_edges(g0, sub, causes, tag):
    for e in sorted(sub.superedges):
        causes[e] = tag
        if g0.has_edge(*e):
            g0.remove_copies(e[0], e[1], g0.multiplicity(*e))
    for v in [v for v in g0.vertices if not g0.neighbors(v)]:
        g0.remove_vertex(v)


def _try_witness(cid, cfg, sub):
    """Attempt the template embedding on one cluster.  Returns a
    _WitnessedCluster (entry not yet built) or None."""
    nv = len(sub.vertices)
    n_c = cfg.template_size(nv)
    if n_c < 2:
        return None
    t = build(n_c, cfg.k_hat, cfg.delta)
    if t.num_vertices() > nv:
        return None
    total = sum(1 for i in range(1, t.k + 1)
                for _ in t.superedges(i)) * t.delta
    budget = int(cfg.fake_budget_frac * total)
    got = greedy_embed(sub, t, cfg.d_cap, cfg.eta_cap, budget)
    if got is None:
        return None
    emb, fakes = got
    try:
        s = new_pruned(t, cfg.pruning_cfg(n_c))
    except ValueError:
        return None
    for (i, leaf, _c) in sorted(fakes):
        s.delete_edge(leaf, t.level_center(i, leaf))
    if not s.is_properly_pruned():
        return None
    bundles = {}
    for (i, leaf) in sorted(s.in_w):
        if not s.in_w[(i, leaf)] or s.rem[(i, leaf)] <= 0:
            continue
        alive = [emb.paths[(i, leaf, c)] for c in range(t.delta)
                 if (i, leaf, c) not in fakes]
        bundles[(i, leaf)] = alive[:s.rem[(i, leaf)]]
        if len(bundles[(i, leaf)]) != s.rem[(i, leaf)]:
            return None
    wc = _WitnessedCluster(cid, cfg, s, emb.vertex_map, bundles)

    # trim under-covered host vertices until stable
    d_star = max(max((len(p) - 1 for _k2, p in wc.paths_iter()), default=1), 1)
    dprime = cfg.delta_star // (2 * cfg.k_hat * d_star)
    floor = max(cfg.path_floor_at(nv), 2 * dprime)
    while True:
        counts = {}
        for _key2, p in wc.paths_iter():
            for v in set(p):
                counts[v] = counts.get(v, 0) + 1
        low = {v for v, c in counts.items() if c < floor}
        if not low:
            break
        if wc.delete_copies_through(lambda p: any(v in low for v in p)) == 0:
            break
        if not wc.s.is_properly_pruned():
            return None
    return wc


def build_decomposition(g, cfg):
    """Decompose g into witnessed router clusters plus E^del."""
    report = BuildReport()
    g0 = g.copy()
    _strip_low_degree(g0, cfg.degree_floor, report.causes, "low-degree")
    machinery = {}
    entries = []
    next_id = 0
    it = 0
    while g0.num_edges() and it < cfg.iter_cap:
        it += 1
        cs = init_clustering(g0.copy(), cfg.k)
        for c in cs.active_clusters():
            sub = c.graph
            if not sub.superedges:
                continue
            if len(sub.vertices) < cfg.large_threshold:
                _drop_cluster_edges(g0, sub, report.causes, "small")
                continue
            wc = _try_witness(next_id, cfg, sub)
            if wc is None:
                _scatter_shed(g0, sub, cfg, report.causes)
                continue
            try:
                dropped = wc.rebuild(sub)
            except ValueError:
                _scatter_shed(g0, sub, cfg, report.causes)
                continue
            for e in dropped:
                report.causes[e] = "fake-trim"
            _consume_cluster(g0, sub, wc.entry.graph)
            machinery[next_id] = wc
            entries.append(wc.entry)
            report.cluster_ids.append(next_id)
            next_id += 1
        _strip_low_degree(g0, cfg.degree_floor, report.causes, "low-degree")
    if g0.num_edges():
        report.degraded = True
        for e in sorted(g0.superedges):
            report.causes[e] = "cap"
    report.iterations = it
    e_del = {e for e in g.superedges
             if not any(e in wc.entry.graph.superedges
                        for wc in machinery.values())}
    kh = cfg.k_hat
    d_t = 22 * cfg.d_cap * kh * kh
    eta_t = 1
    for wc in machinery.values():
        d_s = wc.entry.witness.emb.d_star
        eta_s = wc.entry.witness.emb.eta_star
        eta_t = max(eta_t, 8 * wc.entry.sparse.gamma * d_s * d_s * eta_s
                    * kh ** (4 * kh + 1))
    rd = RouterDecomposition(g, entries, e_del, cfg.delta_star, d_t, eta_t,
                             cfg.rho)
    rd.cfg = cfg
    rd.machinery = machinery
    rd.report = report
    bad = rd.check_valid()
    if bad:
        raise AssertionError("decomposition invalid: %r" % (bad[:3],))
    for wc in machinery.values():
        wc.snapshot()
    return rd


def _scatter_shed(g0, sub, cfg, causes):
    """Embedding failed: keep at most one dense ball, charge the rest to
    E^del so re-clustering can make progress."""
    res = scattered_or_ball(sub, cfg.scatter_d, cfg.scatter_eps)
    if isinstance(res, ScatteredCert):
        _drop_cluster_edges(g0, sub, causes, "scatter")
        return
    u = res
    eps = cfg.scatter_eps
    radius = math.ceil(4 * cfg.scatter_d / eps)
    keep = ball(sub, u, radius)
    outside = [e for e in sorted(sub.superedges)
               if e[0] not in keep or e[1] not in keep]
    if not outside:
        _drop_cluster_edges(g0, sub, causes, "scatter")
        return
    for e in outside:
        causes[e] = "scatter"
        if g0.has_edge(*e):
            g0.remove_copies(e[0], e[1], g0.multiplicity(*e))
    for v in [v for v in g0.vertices if not g0.neighbors(v)]:
        g0.remove_vertex(v)


def _consume_cluster(g0, sub, kept):
    """Remove a finished cluster's edges from the working graph."""
    for e in sorted(sub.superedges):
        if g0.has_edge(*e):
            g0.remove_copies(e[0], e[1], g0.multiplicity(*e))
    for v in [v for v in g0.vertices if not g0.neighbors(v)]:
        g0.remove_vertex(v)


def process_batch(rd, deletions, insertions=()):
    """Apply one batch of host edge deletions (and optional insertions,
    which land in E^del) to a built decomposition."""
    cfg = rd.cfg
    report = BatchReport()
    dels = [_key(u, v) for (u, v) in deletions]
    for e in dels:
        if not rd.host.has_edge(*e):
            raise ValueError("deletion of unknown edge %r" % (e,))
    owner = {}
    for wc in rd.machinery.values():
        for e in dels:
            if wc.entry.graph.has_edge(*e):
                owner[e] = wc.id
    per_cluster = {}
    for e in dels:
        per_cluster.setdefault(owner.get(e), []).append(e)

    def dissolve(wc, cause):
        for e in sorted(wc.entry.graph.superedges):
            if rd.host.has_edge(*e):
                rd.e_del.add(e)
                report.charge(cause)
        report.dissolved.append(wc.id)
        report.recourse += wc.entry.sparse.cprime.num_edges()
        rd.clusters.remove(wc.entry)
        del rd.machinery[wc.id]

    # untracked deletions: host edges in E^del (or stale bookkeeping)
    for e in per_cluster.pop(None, []):
        rd.host.remove_copies(e[0], e[1], rd.host.multiplicity(*e))
        rd.e_del.discard(e)
        report.deleted += 1

    for cid, edges in sorted(per_cluster.items()):
        wc = rd.machinery[cid]
        pi_c = len(edges)
        report.deleted += pi_c
        if pi_c > cfg.batch_bound:
            for e in edges:
                rd.host.remove_copies(e[0], e[1], rd.host.multiplicity(*e))
                wc.entry.graph.remove_copies(e[0], e[1],
                                             wc.entry.graph.multiplicity(*e))
            dissolve(wc, "dissolve")
            continue
        before_sparse = set(wc.entry.sparse.cprime.superedges)
        e_del_before = report_total(report)
        try:
            wc.s.begin_phase()
        except ValueError:
            for e in edges:
                rd.host.remove_copies(e[0], e[1], rd.host.multiplicity(*e))
                wc.entry.graph.remove_copies(e[0], e[1],
                                             wc.entry.graph.multiplicity(*e))
            dissolve(wc, "dissolve")
            continue
        dead = set()
        for e in edges:
            rd.host.remove_copies(e[0], e[1], rd.host.multiplicity(*e))
            wc.entry.graph.remove_copies(e[0], e[1],
                                         wc.entry.graph.multiplicity(*e))
            dead.add(e)
        wc.delete_copies_through(
            lambda p: any(_key(a, b) in dead for a, b in zip(p, p[1:])))
        # cascade: vertices whose surviving path count fell too far
        while True:
            low = {v for v, lam in wc.lam.items()
                   if sum(1 for _k2, p in wc.paths_iter() if v in p)
                   < lam * cfg.drop_frac}
            low = {v for v in low
                   if any(v in p for _k2, p in wc.paths_iter())
                   or v in wc.entry.graph.vertices}
            if not low:
                break
            shed = [e for e in sorted(wc.entry.graph.superedges)
                    if e[0] in low or e[1] in low]
            if not shed and not wc.delete_copies_through(
                    lambda p: any(v in low for v in p)):
                break
            for e in shed:
                wc.entry.graph.remove_copies(e[0], e[1],
                                             wc.entry.graph.multiplicity(*e))
                rd.e_del.add(e)
                report.charge("cascade")
                dead.add(e)
            for v in low:
                wc.lam.pop(v, None)
            wc.delete_copies_through(
                lambda p: any(v in low for v in p)
                or any(_key(a, b) in dead for a, b in zip(p, p[1:])))
        try:
            dropped = wc.rebuild(wc.entry.graph)
        except ValueError:
            dissolve(wc, "dissolve")
            continue
        for e in dropped:
            if wc.entry.graph.has_edge(*e):
                wc.entry.graph.remove_copies(e[0], e[1],
                                             wc.entry.graph.multiplicity(*e))
            rd.e_del.add(e)
            report.charge("cascade")
        # the entry object was rebuilt; swap it into the decomposition
        old = next(c for c in rd.clusters if c.id == cid)
        rd.clusters[rd.clusters.index(old)] = wc.entry
        after_sparse = set(wc.entry.sparse.cprime.superedges)
        report.recourse += len(before_sparse ^ after_sparse)
        added = report_total(report) - e_del_before
        n = len(rd.host.vertices)
        exp = cfg.recourse_exp
        bound = pi_c * math.ceil(max(n, 2) ** float(exp))
        assert added <= max(bound, added if wc.id in report.dissolved else 0),\
            "per-batch E^del accounting bound broken"
        wc.snapshot()
    rd.e_del = {e for e in rd.e_del if rd.host.has_edge(*e)}
    for (u, v, *rest) in insertions:
        mult = rest[0] if rest else 1
        length = rest[1] if len(rest) > 1 else None
        rd.host.add_edge(u, v, mult, length)
        rd.e_del.add(_key(u, v))
        rd.report.causes[_key(u, v)] = "insert"
        report.charge("insert")
        report.inserted += 1
    bad = rd.check_valid()
    if bad:
        raise AssertionError("decomposition invalid after batch: %r"
                             % (bad[:3],))
    return report


def report_total(report):
    return sum(report.to_e_del.values())
