import json
import subprocess
import sys

import numpy as np
import pytest

import ngg
from ngg.cli import main
from ngg.edgelist import read_adjacency, read_edge_list, write_adjacency
from ngg.errors import DomainError


# --- edge list parsing ------------------------------------------------------------


def test_read_edge_list_konect_style(tmp_path):
    path = tmp_path / "graph.txt"
    path.write_text(
        "% comment header\n"
        "% another\n"
        "1 2\n"
        "2 1\n"          # reversed duplicate
        "1 2\n"          # duplicate
        "3 3\n"          # self loop
        "\n"
        "2 4\n"
    )
    data = read_edge_list(path)
    assert data.one_based
    assert data.n == 4
    assert data.edges == ((0, 1), (1, 3))
    assert any("self-loop" in w for w in data.warnings)
    a = data.adjacency()
    assert np.array_equal(a, a.T) and a[0, 1] == 1 and a[1, 3] == 1


def test_read_edge_list_zero_based(tmp_path):
    path = tmp_path / "graph.txt"
    path.write_text("0 1\n1 2\n")
    data = read_edge_list(path)
    assert not data.one_based
    assert data.n == 3


def test_read_edge_list_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 x\n")
    with pytest.raises(DomainError):
        read_edge_list(bad)
    empty = tmp_path / "empty.txt"
    empty.write_text("% nothing\n")
    with pytest.raises(DomainError):
        read_edge_list(empty)


@pytest.mark.parametrize("fmt", ["rle", "dense"])
def test_adjacency_dump_roundtrip(tmp_path, fmt):
    rng = np.random.default_rng(0)
    a = (rng.random((17, 17)) < 0.3).astype(float)
    a = np.triu(a, 1)
    a = a + a.T
    path = tmp_path / "adj.txt"
    write_adjacency(path, a, fmt=fmt)
    assert np.array_equal(read_adjacency(path), a)


# --- commands -----------------------------------------------------------------------


def test_cli_bad_envelope_is_usage_error(tmp_path, capsys):
    rc = main(["simulate", "--envelope", "p9", "--n", "100",
               "--out", str(tmp_path / "x.json")])
    assert rc == 2
    assert "p9" in capsys.readouterr().err


def test_cli_eval_envelope_flags(capsys):
    assert main(["eval-envelope"]) == 2
    capsys.readouterr()


def test_cli_estimate_missing_input(tmp_path, capsys):
    rc = main(["estimate", "--input", str(tmp_path / "none.txt"),
               "--out", str(tmp_path / "o.json")])
    assert rc == 1


def test_cli_coefs_values(capsys):
    assert main(["coefs", "--envelope", "p5", "--dim", "3", "--degree", "4"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "degree,dim,coefficient"
    rows = [line.split(",") for line in lines[1:]]
    assert [int(r[1]) for r in rows] == [1, 3, 5, 7, 9]
    coefs = [float(r[2]) for r in rows]
    assert coefs[0] == pytest.approx(1 / 3, abs=1e-9)
    assert coefs[4] == pytest.approx(2 / 27, abs=1e-9)
    assert max(abs(c) for c in coefs[1:4]) < 1e-9


def test_cli_coefs_step_envelope_has_negative_entries(capsys):
    assert main(["coefs", "--envelope", "p2", "--dim", "3", "--degree", "6"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()[1:]
    coefs = [float(line.split(",")[2]) for line in lines]
    assert min(coefs) < 0


def test_cli_eval_envelope_builtin(capsys):
    assert main(["eval-envelope", "--envelope", "p1", "--grid", "5"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "t,value"
    t, v = zip(*(map(float, line.split(",")) for line in lines[1:]))
    assert np.allclose(v, ((1 + np.asarray(t)) / 2) ** 4)


def test_cli_simulate_estimate_round_trip(tmp_path):
    sim_json = tmp_path / "sim.json"
    adj = tmp_path / "adj.txt"
    rc = main([
        "simulate", "--envelope", "p4", "--n", "150", "--replicates", "1",
        "--seed", "9", "--r-max", "2", "--out", str(sim_json),
        "--dump-adjacency", str(adj),
    ])
    assert rc == 0
    est_json = tmp_path / "est.json"
    rc = main(["estimate", "--input", str(adj), "--dim", "3", "--r-max", "2",
               "--out", str(est_json)])
    assert rc == 0
    sim = json.loads(sim_json.read_text())
    est = json.loads(est_json.read_text())
    rec = sim["records"][0]
    assert est["selected_r"] == rec["selected_r"]
    stages = next(f["stages"] for f in rec["fits"] if f["r"] == est["selected_r"])
    assert stages == est["stages"]  # bit-exact


def test_cli_simulate_deterministic(tmp_path):
    args = ["simulate", "--envelope", "p5", "--n", "120", "--replicates", "2",
            "--seed", "3", "--r-max", "2"]
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_estimate_small_real_graph(tmp_path):
    # a 27-node interaction network; defaults (r_max 4, kappa 0.25) must run
    space = ngg.sphere(3)
    lat = ngg.sample_latent(space, 27, 14)
    graph = ngg.generate_graph(lat, ngg.builtin_envelope(4), 15)
    lines = ["% generated test network"]
    bool_adj = graph.adjacency_bool()
    for i in range(27):
        for j in range(i + 1, 27):
            if bool_adj[i, j]:
                lines.append(f"{i + 1} {j + 1}")
    path = tmp_path / "zebra_like.txt"
    path.write_text("\n".join(lines) + "\n")
    out = tmp_path / "est.json"
    assert main(["estimate", "--input", str(path), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["schema"] == 1
    assert doc["n"] == 27
    assert len(doc["spectrum"]) == 27
    assert 1 <= doc["selected_r"] <= 4
    assert len(doc["per_r"]) == 4
    values = doc["envelope_grid"]["value"]
    assert min(values) >= 0.0 and max(values) <= 1.0
    assert any("selection may be unstable" in w for w in doc["warnings"])


def test_cli_estimate_r_max_too_large(tmp_path, capsys):
    path = tmp_path / "tiny.txt"
    path.write_text("1 2\n2 3\n3 4\n4 5\n")
    rc = main(["estimate", "--input", str(path), "--out", str(tmp_path / "o.json")])
    assert rc == 2
    assert "smaller --r-max" in capsys.readouterr().err


def test_cli_envelope_coefficients_file(tmp_path, capsys):
    coeffs = tmp_path / "env.txt"
    coeffs.write_text("# degree value\n0 0.4\n2 0.1\n")
    assert main(["eval-envelope", "--envelope", str(coeffs), "--grid", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    vals = [float(line.split(",")[1]) for line in lines[1:]]
    basis = ngg.harmonic_basis(ngg.sphere(3), 4)
    expect = basis.reconstruct(np.array([0.4, 0.0, 0.1]), np.array([-1.0, 0.0, 1.0]))
    assert np.allclose(vals, expect)


def test_cli_from_report_eval(tmp_path, capsys):
    sim_json = tmp_path / "sim.json"
    adj = tmp_path / "adj.txt"
    main(["simulate", "--envelope", "p4", "--n", "150", "--replicates", "1",
          "--seed", "2", "--r-max", "2", "--out", str(sim_json),
          "--dump-adjacency", str(adj)])
    est_json = tmp_path / "est.json"
    main(["estimate", "--input", str(adj), "--r-max", "2", "--out", str(est_json)])
    capsys.readouterr()
    assert main(["eval-envelope", "--from-report", str(est_json), "--grid", "7"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "t,value"
    vals = [float(line.split(",")[1]) for line in lines[1:]]
    assert len(vals) == 7
    assert all(0.0 <= v <= 1.0 for v in vals)


def test_cli_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "ngg", "coefs", "--envelope", "p5", "--degree", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("degree,dim,coefficient")
