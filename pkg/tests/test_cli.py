import json

import pytest

from routerlab.cli import main
from routerlab.router_template import build, realize


@pytest.fixture
def host_file(tmp_path):
    g = realize(build(3, 4, 4))
    p = tmp_path / "host.graph"
    lines = ["# realized recursive star host"]
    for (u, v), m in sorted(g.superedges.items()):
        lines.append("%d %d %d" % (u, v, m))
    p.write_text("\n".join(lines) + "\n")
    return str(p)


DECOMP_OPTS = ["--k", "2", "--delta", "4", "--delta-star", "16",
               "--d-cap", "2", "--template-n", "3", "--batch-bound", "6"]


def decomp_argv(cmd, host, *extra, json_out=None):
    argv = []
    if json_out:
        argv += ["--json", json_out]
    argv += [cmd, "--graph", host] + DECOMP_OPTS + list(extra)
    return argv


def run_json(capsys, argv):
    rc = main(argv)
    out = capsys.readouterr().out
    return rc, json.loads(out)


def test_build_router_manifest(tmp_path, capsys):
    man = tmp_path / "router.json"
    rc, doc = run_json(capsys, ["build-router", "--N", "4", "--k", "2",
                                "--delta", "3", "--out", str(man)])
    assert rc == 0
    assert doc["command"] == "build-router"
    assert all(a["ok"] for a in doc["assertions"])
    saved = json.loads(man.read_text())
    assert saved == {"N": 4, "k": 2, "delta": 3, "vertices": 16, "edges": 72}


def test_build_router_strict_rejects(capsys):
    rc = main(["--strict", "build-router", "--N", "4", "--k", "2",
               "--delta", "3"])
    assert rc == 2


def test_prune_with_trace(tmp_path, capsys):
    man = tmp_path / "router.json"
    assert main(["build-router", "--N", "4", "--k", "2", "--delta", "32",
                 "--out", str(man)]) == 0
    capsys.readouterr()
    tr = tmp_path / "trace.txt"
    tr.write_text("DEL 1 0 2\nPHASE 1\nDEL 2 0\n")
    rc, doc = run_json(capsys, ["prune", "--template", str(man),
                                "--trace", str(tr)])
    assert rc == 0
    assert doc["deletions"] == 3
    assert len(doc["phase_stats"]) == 2
    assert all(a["ok"] for a in doc["assertions"])


def test_route_empty_demand_ok(tmp_path, capsys):
    man = tmp_path / "router.json"
    main(["build-router", "--N", "4", "--k", "2", "--delta", "3",
          "--out", str(man)])
    capsys.readouterr()
    dm = tmp_path / "demand.txt"
    dm.write_text("# nothing to route\n")
    rc, doc = run_json(capsys, ["route", "--template", str(man),
                                "--demand", str(dm)])
    assert rc == 0
    assert doc["pairs"] == 0


def test_route_small_demand(tmp_path, capsys):
    man = tmp_path / "router.json"
    main(["build-router", "--N", "4", "--k", "2", "--delta", "4096",
          "--out", str(man)])
    capsys.readouterr()
    dm = tmp_path / "demand.txt"
    dm.write_text("1 2 1\n5 6 1/2\n")
    rc, doc = run_json(capsys, ["route", "--template", str(man),
                                "--demand", str(dm)])
    assert rc == 0
    assert doc["pairs"] == 2
    assert all(a["ok"] for a in doc["assertions"])


def test_route_over_cap_is_usage_error(tmp_path, capsys):
    man = tmp_path / "router.json"
    main(["build-router", "--N", "4", "--k", "2", "--delta", "3",
          "--out", str(man)])
    capsys.readouterr()
    dm = tmp_path / "demand.txt"
    dm.write_text("1 2 1\n")
    assert main(["route", "--template", str(man), "--demand", str(dm)]) == 2


def test_cluster_command(tmp_path, capsys):
    p = tmp_path / "g.graph"
    p.write_text("".join("%d %d\n" % (i, i + 1) for i in range(60)))
    tr = tmp_path / "trace.txt"
    tr.write_text("DEL 10 11\nPHASE 1\nDEL 40 41\n")
    rc, doc = run_json(capsys, ["cluster", "--graph", str(p), "--k", "2",
                                "--trace", str(tr)])
    assert rc == 0
    assert all(a["ok"] for a in doc["assertions"])


def test_decompose_and_spanner(host_file, capsys):
    rc, doc = run_json(capsys, decomp_argv("decompose", host_file))
    assert rc == 0
    assert doc["clusters"] == 1 and doc["e_del"] == 0

    rc2, doc2 = run_json(capsys, decomp_argv("spanner", host_file))
    assert rc2 == 0
    st = next(a for a in doc2["assertions"] if a["name"] == "stretch")
    assert st["ok"] and st["observed"] <= st["bound"]


def test_batch_command_with_insert(host_file, tmp_path, capsys):
    tr = tmp_path / "batch.txt"
    tr.write_text("DEL 1 0\nPHASE 1\nINS 0 200 1\n")
    rc, doc = run_json(capsys, decomp_argv("batch", host_file,
                                           "--trace", str(tr)))
    assert rc == 0
    assert all(a["ok"] for a in doc["assertions"])


def test_lc_embed_and_fd_check(host_file, tmp_path, capsys):
    rc, doc = run_json(capsys, decomp_argv("lc-embed", host_file))
    assert rc == 0
    fl = tmp_path / "faults.txt"
    fl.write_text("1 0 1\n")
    rc2, doc2 = run_json(capsys, decomp_argv("fd-check", host_file,
                                             "--faults", str(fl)))
    assert rc2 == 0
    assert all(a["ok"] for a in doc2["assertions"])


def test_cert_check(tmp_path, capsys):
    g = tmp_path / "g.graph"
    g.write_text("0 1\n1 2\n0 2\n2 3\n")
    sub = tmp_path / "h.graph"
    sub.write_text("0 1\n1 2\n0 2\n2 3\n")
    rc, doc = run_json(capsys, ["cert-check", "--graph", str(g),
                                "--sub", str(sub)])
    assert rc == 0
    # dropping the bridge from the subgraph breaks the certificate
    sub.write_text("0 1\n1 2\n0 2\n")
    rc2, _doc2 = run_json(capsys, ["cert-check", "--graph", str(g),
                                   "--sub", str(sub)])
    assert rc2 == 1


def test_verify_command_exit_codes(tmp_path, capsys):
    g = tmp_path / "g.graph"
    g.write_text("0 1\n1 2\n0 2\n")
    dm = tmp_path / "d.txt"
    dm.write_text("0 2 1\n")
    rt = tmp_path / "r.json"
    rt.write_text(json.dumps(
        {"paths": [{"path": [0, 1, 2], "pair": [0, 2], "value": "1"}]}))
    assert main(["verify", "--graph", str(g), "--routing", str(rt),
                 "--demand", str(dm), "--max-len", "2",
                 "--max-cong", "1"]) == 0
    capsys.readouterr()
    assert main(["verify", "--graph", str(g), "--routing", str(rt),
                 "--demand", str(dm), "--max-len", "1",
                 "--max-cong", "1"]) == 1


def test_bad_files_are_usage_errors(tmp_path, capsys):
    bad = tmp_path / "bad.graph"
    bad.write_text("0 0\n")
    assert main(["cluster", "--graph", str(bad), "--k", "2"]) == 2
    bad.write_text("0 x\n")
    assert main(["cluster", "--graph", str(bad), "--k", "2"]) == 2
    assert main(["cluster", "--graph", str(tmp_path / "missing"),
                 "--k", "2"]) == 2
    assert main(["no-such-command"]) == 2


def test_trace_phase_numbers_must_be_sequential(tmp_path, capsys):
    man = tmp_path / "router.json"
    main(["build-router", "--N", "4", "--k", "2", "--delta", "32",
          "--out", str(man)])
    capsys.readouterr()
    tr = tmp_path / "trace.txt"
    tr.write_text("PHASE 2\nDEL 1 0\n")
    assert main(["prune", "--template", str(man), "--trace", str(tr)]) == 2


def strip_timings(path):
    doc = json.loads(open(path).read())
    doc.pop("timings_ms", None)
    return json.dumps(doc, sort_keys=True)


def test_reports_deterministic(host_file, tmp_path, capsys):
    outs = []
    for i in (1, 2):
        out = str(tmp_path / ("rep%d.json" % i))
        argv = ["--seed", "5"] + decomp_argv("lc-embed", host_file,
                                             json_out=out)
        rc = main(argv)
        assert rc == 0
        outs.append(strip_timings(out))
    assert outs[0] == outs[1]
