"""Command line front end: file parsing, command dispatch and JSON
reports.

Every command emits a report {command, params, assertions, timings_ms}
and exits 0 when all assertions hold, 1 when any is violated, and 2 on
usage or parse errors.  All randomness flows from --seed, so identical
inputs and seed give byte-identical reports apart from the timings.
"""

import argparse
import json
import sys
import time
from fractions import Fraction

from .graph import MultiGraph, Demand, Routing, verify_routing
from .router_template import build
from .pruning import PruningConfig, new_pruned
from .routing import route_demand
from .clustering import init_clustering
from .resilience import FaultSet
from .decompose import PipelineConfig, build_decomposition, process_batch
from .spanner import (extract_spanner, stretch_check, lc_embed,
                      fd_spanner_check, connectivity_certificate_check)


class CliError(Exception):
    """Usage or file format error; carries a file position when known."""

    def __init__(self, msg, path=None, line=None):
        if path is not None and line is not None:
            msg = "%s:%d: %s" % (path, line, msg)
        super().__init__(msg)


def _lines(path):
    try:
        with open(path, encoding="utf-8") as f:
            raw = f.read()
    except OSError as e:
        raise CliError(str(e))
    for no, line in enumerate(raw.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def parse_graph(path):
    g = MultiGraph()
    for no, tok in _lines(path):
        if not 2 <= len(tok) <= 4:
            raise CliError("expected 'u v [mult] [len]'", path, no)
        try:
            u, v = int(tok[0]), int(tok[1])
            mult = int(tok[2]) if len(tok) > 2 else 1
            length = int(tok[3]) if len(tok) > 3 else 1
        except ValueError:
            raise CliError("non-integer field", path, no)
        if u < 0 or v < 0 or mult < 1 or length < 1:
            raise CliError("fields must be non-negative (mult, len >= 1)",
                           path, no)
        if u == v:
            raise CliError("self loops are not allowed", path, no)
        if g.has_edge(u, v):
            # duplicate lines accumulate multiplicity
            cur = g.multiplicity(u, v)
            g.remove_copies(u, v, cur)
            g.add_edge(u, v, cur + mult, length)
        else:
            g.add_edge(u, v, mult, length)
    return g


def parse_demand(path):
    d = Demand()
    for no, tok in _lines(path):
        if len(tok) != 3:
            raise CliError("expected 'a b value'", path, no)
        try:
            a, b = int(tok[0]), int(tok[1])
            val = Fraction(tok[2])
        except (ValueError, ZeroDivisionError):
            raise CliError("bad demand line", path, no)
        try:
            d.add(a, b, val)
        except ValueError as e:
            raise CliError(str(e), path, no)
    return d


def parse_trace(path, allow_ins=False):
    """List of phases; each phase is a list of ops
    ('del', u, v, count) / ('deact', cid) / ('ins', u, v, mult, len)."""
    phases = [[]]
    for no, tok in _lines(path):
        op = tok[0].upper()
        try:
            if op == "PHASE":
                if len(tok) != 2 or int(tok[1]) != len(phases):
                    raise CliError("PHASE numbers must be sequential from 1",
                                   path, no)
                phases.append([])
            elif op == "DEL":
                if len(tok) not in (3, 4):
                    raise CliError("expected 'DEL u v [count]'", path, no)
                phases[-1].append(("del", int(tok[1]), int(tok[2]),
                                   int(tok[3]) if len(tok) == 4 else 1))
            elif op == "DEACT":
                if len(tok) != 2:
                    raise CliError("expected 'DEACT cluster_id'", path, no)
                phases[-1].append(("deact", int(tok[1])))
            elif op == "INS":
                if not allow_ins:
                    raise CliError("INS is only valid for decompose/batch",
                                   path, no)
                if len(tok) not in (3, 4, 5):
                    raise CliError("expected 'INS u v [mult] [len]'", path, no)
                phases[-1].append(("ins", int(tok[1]), int(tok[2]),
                                   int(tok[3]) if len(tok) > 3 else 1,
                                   int(tok[4]) if len(tok) > 4 else 1))
            else:
                raise CliError("unknown trace op %r" % (tok[0],), path, no)
        except ValueError:
            raise CliError("non-integer field", path, no)
    return phases


def parse_routing(path):
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise CliError("bad routing file: %s" % e)
    r = Routing()
    try:
        for item in data["paths"]:
            r.add(tuple(item["path"]), tuple(item["pair"]),
                  Fraction(item["value"]))
    except (KeyError, TypeError, ValueError) as e:
        raise CliError("bad routing entry: %s" % e)
    return r


def load_template(path):
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
        return build(int(data["N"]), int(data["k"]), int(data["delta"]))
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as e:
        raise CliError("bad template file: %s" % e)


def _preset(name, k):
    return PruningConfig.paper(k) if name == "paper" else \
        PruningConfig.relaxed(k)


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and x != x:
        return "nan"
    return x


class Report:
    def __init__(self, command, params):
        self.command = command
        self.params = params
        self.assertions = []
        self.extra = {}
        self._t0 = time.perf_counter()

    def check(self, name, bound, observed, ok):
        self.assertions.append({"name": name, "bound": _jsonable(bound),
                                "observed": _jsonable(observed),
                                "ok": bool(ok)})

    @property
    def ok(self):
        return all(a["ok"] for a in self.assertions)

    def emit(self, out_path=None):
        doc = {"command": self.command,
               "params": _jsonable(self.params),
               "assertions": self.assertions,
               "timings_ms": round((time.perf_counter() - self._t0) * 1000,
                                   3)}
        doc.update(_jsonable(self.extra))
        text = json.dumps(doc, sort_keys=True, indent=2)
        if out_path:
            with open(out_path, "w", encoding="utf-8") as f:
                f.write(text + "\n")
        else:
            print(text)
        return 0 if self.ok else 1


def _apply_prune_trace(s, phases, rep=None):
    """Run a parsed trace against a pruned router, checking proper
    pruning after every single deletion."""
    bad = 0
    deletes = 0
    for pi, ops in enumerate(phases):
        if pi > 0:
            s.begin_phase()
        for op in ops:
            if op[0] != "del":
                raise CliError("only DEL ops are valid in pruning traces")
            _tag, u, v, count = op
            for _ in range(count):
                s.delete_edge(u, v)
                deletes += 1
                if not s.is_properly_pruned():
                    bad += 1
    if rep is not None:
        rep.check("properly-pruned-after-every-delete", 0, bad, bad == 0)
        rep.extra["deletions"] = deletes
        rep.extra["phase_stats"] = [s.phase_stats(t)
                                    for t in range(s.tau + 1)]
    return s


def cmd_build_router(args):
    rep = Report("build-router", {"N": args.N, "k": args.k,
                                  "delta": args.delta, "seed": args.seed})
    t = build(args.N, args.k, args.delta, strict=args.strict)
    nv = t.num_vertices()
    centers = sum(1 for v in t.vertices() if t.is_center(v))
    edges = sum(1 for i in range(1, t.k + 1)
                for _ in t.superedges(i)) * t.delta
    rep.check("num-vertices", args.N ** args.k, nv, nv == args.N ** args.k)
    rep.check("center-degree", (args.N - 1) * args.delta * args.k,
              t.center_degree(),
              t.center_degree() == (args.N - 1) * args.delta * args.k)
    rep.check("leaf-degree", args.delta * args.k, t.leaf_degree(),
              t.leaf_degree() == args.delta * args.k)
    rep.extra["centers"] = centers
    rep.extra["edges"] = edges
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump({"N": args.N, "k": args.k, "delta": args.delta,
                       "vertices": nv, "edges": edges}, f, sort_keys=True)
            f.write("\n")
    return rep.emit(args.json)


def cmd_prune(args):
    t = load_template(args.template)
    rep = Report("prune", {"template": args.template, "trace": args.trace,
                           "preset": args.preset, "seed": args.seed})
    s = new_pruned(t, _preset(args.preset, t.k))
    phases = parse_trace(args.trace) if args.trace else [[]]
    _apply_prune_trace(s, phases, rep)
    final = s.is_properly_pruned()
    rep.check("properly-pruned-final", True, bool(final), bool(final))
    return rep.emit(args.json)


def cmd_route(args):
    t = load_template(args.template)
    rep = Report("route", {"template": args.template, "demand": args.demand,
                           "trace": args.trace, "preset": args.preset,
                           "seed": args.seed})
    s = new_pruned(t, _preset(args.preset, t.k))
    if args.trace:
        _apply_prune_trace(s, parse_trace(args.trace))
    d = parse_demand(args.demand)
    rep.extra["pairs"] = len(d)
    if not len(d):
        rep.check("verify", True, True, True)
        return rep.emit(args.json)
    r = route_demand(s, d)
    max_len = 20 * t.k * t.k
    vr = verify_routing(s.current_graph(), d, r, max_len, Fraction(1))
    rep.check("verify-length", max_len, vr.worst_length, vr.ok)
    rep.check("verify-congestion", "1", vr.worst_congestion, vr.ok)
    if d.is_integral():
        rep.check("integral-flow", True, r.is_integral(), r.is_integral())
    return rep.emit(args.json)


def cmd_cluster(args):
    g = parse_graph(args.graph)
    rep = Report("cluster", {"graph": args.graph, "k": args.k,
                             "trace": args.trace, "seed": args.seed})
    cs = init_clustering(g, args.k)
    phases = parse_trace(args.trace) if args.trace else [[]]
    bad = []
    for ops in phases:
        dels = [(u, v) for tag, u, v, *_rest in
                [op for op in ops if op[0] == "del"]]
        deact = [op[1] for op in ops if op[0] == "deact"]
        cs.run_phase(dels, deact)
        bad.extend(cs.check_valid())
    rep.check("valid-after-every-phase", 0, len(bad), not bad)
    total = cs.total_n_v()
    n, k = cs.n, cs.k
    ok = total ** k <= (2 ** k) * n ** (k + 1)
    rep.check("lifetime-counter-budget", "2*n^(1+1/k)", total, ok)
    rep.extra["clusters"] = len(cs.active_clusters())
    return rep.emit(args.json)


def _pipeline_cfg(args):
    kwargs = {"k": args.k, "delta": args.delta, "delta_star": args.delta_star,
              "preset": args.preset}
    if args.d_cap is not None:
        kwargs["d_cap"] = args.d_cap
    if args.template_n is not None:
        kwargs["template_n"] = args.template_n
    if args.large_threshold is not None:
        kwargs["large_threshold"] = args.large_threshold
    if args.degree_floor is not None:
        kwargs["degree_floor"] = args.degree_floor
    if args.batch_bound is not None:
        kwargs["batch_bound"] = args.batch_bound
    return PipelineConfig(**kwargs)


def _build_rd(args, rep):
    g = parse_graph(args.graph)
    cfg = _pipeline_cfg(args)
    rd = build_decomposition(g, cfg)
    rep.extra["clusters"] = len(rd.clusters)
    rep.extra["e_del"] = len(rd.e_del)
    rep.extra["e_del_causes"] = rd.report.cause_counts()
    rep.extra["degraded"] = rd.report.degraded
    rep.check("decomposition-valid", 0, len(rd.check_valid()),
              not rd.check_valid())
    return rd


def cmd_decompose(args):
    rep = Report("decompose", _decomp_params(args))
    rd = _build_rd(args, rep)
    rep.extra["cluster_sizes"] = [len(c.graph.vertices)
                                  for c in rd.clusters]
    return rep.emit(args.json)


def cmd_batch(args):
    rep = Report("batch", _decomp_params(args, trace=args.trace))
    rd = _build_rd(args, rep)
    phases = parse_trace(args.trace, allow_ins=True)
    bad = 0
    for ops in phases:
        dels = [(op[1], op[2]) for op in ops if op[0] == "del"]
        ins = [(op[1], op[2], op[3], op[4]) for op in ops if op[0] == "ins"]
        process_batch(rd, dels, ins)
        bad += len(rd.check_valid())
    rep.check("valid-after-every-batch", 0, bad, bad == 0)
    return rep.emit(args.json)


def cmd_spanner(args):
    rep = Report("spanner", _decomp_params(args))
    rd = _build_rd(args, rep)
    h = extract_spanner(rd)
    st, pair = stretch_check(rd.host, h)
    rep.extra["spanner_edges"] = h.num_edges()
    rep.check("stretch", rd.d_t, st, st <= rd.d_t)
    rep.extra["worst_pair"] = pair
    return rep.emit(args.json)


def cmd_lc_embed(args):
    rep = Report("lc-embed", _decomp_params(args))
    rd = _build_rd(args, rep)
    try:
        emb = lc_embed(rd, seed=args.seed)
        rep.check("embed-bounds", rd.d_t, {"d": emb.d, "eta": emb.eta}, True)
    except AssertionError as e:
        rep.check("embed-bounds", rd.d_t, str(e), False)
    return rep.emit(args.json)


def cmd_fd_check(args):
    rep = Report("fd-check", _decomp_params(args, faults=args.faults))
    rd = _build_rd(args, rep)
    faults = _parse_faults(args.faults, rd.host)
    out = fd_spanner_check(rd, faults, args.k, seed=args.seed)
    rep.check("fd-detour", out["bound"], out["max_detour"], out["ok"])
    rep.extra["checked"] = out["checked"]
    return rep.emit(args.json)


def cmd_cert_check(args):
    rep = Report("cert-check", {"graph": args.graph, "sub": args.sub,
                                "faults": args.faults, "seed": args.seed})
    g = parse_graph(args.graph)
    h = parse_graph(args.sub)
    for v in g.vertices:
        h.add_vertex(v)
    faults = _parse_faults(args.faults, g) if args.faults else FaultSet(g, [])
    ok = connectivity_certificate_check(g, h, faults)
    rep.check("components-agree", True, ok, ok)
    return rep.emit(args.json)


def cmd_verify(args):
    rep = Report("verify", {"graph": args.graph, "routing": args.routing,
                            "demand": args.demand, "max_len": args.max_len,
                            "max_cong": args.max_cong, "seed": args.seed})
    g = parse_graph(args.graph)
    d = parse_demand(args.demand)
    r = parse_routing(args.routing)
    vr = verify_routing(g, d, r, args.max_len, Fraction(args.max_cong))
    rep.check("verify-length", args.max_len, vr.worst_length, vr.ok)
    rep.check("verify-congestion", args.max_cong, vr.worst_congestion, vr.ok)
    rep.extra["violations"] = [v[:2] for v in vr.violations[:10]]
    return rep.emit(args.json)


def _parse_faults(path, g):
    items = []
    for no, tok in _lines(path):
        if len(tok) not in (2, 3):
            raise CliError("expected 'u v [count]'", path, no)
        try:
            u, v = int(tok[0]), int(tok[1])
            c = int(tok[2]) if len(tok) == 3 else 1
        except ValueError:
            raise CliError("non-integer field", path, no)
        items.append((u, v, c))
    try:
        return FaultSet(g, items)
    except (KeyError, ValueError) as e:
        raise CliError("bad fault set: %s" % e)


def _decomp_params(args, **more):
    out = {"graph": args.graph, "k": args.k, "delta": args.delta,
           "delta_star": args.delta_star, "preset": args.preset,
           "seed": args.seed, "strict": args.strict}
    out.update(more)
    return out


def _add_decomp_opts(p):
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--delta", type=int, default=4)
    p.add_argument("--delta-star", dest="delta_star", type=int, default=16)
    p.add_argument("--d-cap", dest="d_cap", type=int, default=None)
    p.add_argument("--template-n", dest="template_n", type=int, default=None)
    p.add_argument("--large-threshold", dest="large_threshold", type=int,
                   default=None)
    p.add_argument("--degree-floor", dest="degree_floor", type=int,
                   default=None)
    p.add_argument("--batch-bound", dest="batch_bound", type=int,
                   default=None)


def make_parser():
    ap = argparse.ArgumentParser(prog="routerlab")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--preset", choices=["paper", "relaxed"],
                    default="relaxed")
    ap.add_argument("--strict", action="store_true")
    ap.add_argument("--json", default=None, help="write the report here")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-router")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_build_router)

    p = sub.add_parser("prune")
    p.add_argument("--template", required=True)
    p.add_argument("--trace", default=None)
    p.set_defaults(fn=cmd_prune)

    p = sub.add_parser("route")
    p.add_argument("--template", required=True)
    p.add_argument("--demand", required=True)
    p.add_argument("--trace", default=None)
    p.add_argument("--check", default=None, help="informational tag")
    p.set_defaults(fn=cmd_route)

    p = sub.add_parser("cluster")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trace", default=None)
    p.set_defaults(fn=cmd_cluster)

    p = sub.add_parser("decompose")
    _add_decomp_opts(p)
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("batch")
    _add_decomp_opts(p)
    p.add_argument("--trace", required=True)
    p.set_defaults(fn=cmd_batch)

    p = sub.add_parser("spanner")
    _add_decomp_opts(p)
    p.set_defaults(fn=cmd_spanner)

    p = sub.add_parser("lc-embed")
    _add_decomp_opts(p)
    p.set_defaults(fn=cmd_lc_embed)

    p = sub.add_parser("fd-check")
    _add_decomp_opts(p)
    p.add_argument("--faults", required=True)
    p.set_defaults(fn=cmd_fd_check)

    p = sub.add_parser("cert-check")
    p.add_argument("--graph", required=True)
    p.add_argument("--sub", required=True)
    p.add_argument("--faults", default=None)
    p.set_defaults(fn=cmd_cert_check)

    p = sub.add_parser("verify")
    p.add_argument("--graph", required=True)
    p.add_argument("--routing", required=True)
    p.add_argument("--demand", required=True)
    p.add_argument("--max-len", dest="max_len", type=int, required=True)
    p.add_argument("--max-cong", dest="max_cong", required=True)
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None):
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except CliError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except (ValueError, KeyError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
