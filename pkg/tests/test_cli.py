import json

import numpy as np
import pytest

from homspace.cli import main
from homspace.gallery import load_space


def run(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = main(list(argv) + ["--out", str(out)])
    text = out.read_text() if out.exists() else ""
    return code, text


def test_analyze_writes_report(tmp_path):
    code, text = run(tmp_path, "analyze", "--gallery", "euclidean_grid",
                     "--n", "64", "--dim", "1", "--check-lower-bound", "--omega", "1.0")
    assert code == 0
    report = json.loads(text)
    assert report["schema"] == 1
    assert report["n_points"] == 64
    assert 0.75 <= report["stats"]["omega_est"] <= 1.6
    assert report["lower_bound"]["verdict"] == "PASS"


def test_analyze_missing_file_exits_2(tmp_path, capsys):
    code = main(["analyze", "--space", str(tmp_path / "missing.json")])
    assert code == 2
    assert "missing.json" in capsys.readouterr().err


def test_analyze_weighted_local_bound_fails(tmp_path):
    code, text = run(tmp_path, "analyze", "--gallery", "weighted_grid",
                     "--n", "129", "--alpha", "2", "--beta", "0", "--extent", "2",
                     "--check-local-lower-bound", "--omega", "1.0")
    assert code == 0
    report = json.loads(text)
    assert report["local_lower_bound"]["verdict"] == "FAIL"


def test_cubes_default_pass(tmp_path):
    code, text = run(tmp_path, "cubes", "--gallery", "euclidean_grid", "--n", "64")
    assert code == 0
    report = json.loads(text)
    assert report["axioms"]["ok"] is True
    assert report["chain"]["max_chain_len"] <= report["chain"]["bound_N"]
    levels = report["system"]["levels"]
    assert levels[0]["k"] <= levels[-1]["k"]
    assert report["system"]["c1"] == pytest.approx(1.0 / 3.0)
    assert report["system"]["C1"] == pytest.approx(4.0)


def test_cubes_inadmissible_exit_3(tmp_path, capsys):
    code = main(["cubes", "--gallery", "euclidean_grid", "--n", "16",
                 "--delta", "0.2", "--c0", "1", "--C0", "2", "--A0", "1"])
    assert code == 3
    assert "inadmissible" in capsys.readouterr().err


def test_embed_test_uniform_pass(tmp_path):
    code, text = run(tmp_path, "embed-test", "--gallery", "euclidean_grid",
                     "--n", "64", "--omega", "1.0",
                     "--s1", "0.5", "--p1", "2", "--s2", "1.0", "--p2", "1", "--q", "1",
                     "--n-sequences", "64")
    assert code == 0
    report = json.loads(text)
    assert report["verdict"] == "PASS"
    assert report["result"]["scan"]["sup_ratio"] <= report["result"]["scan"]["proof_constant"] * (1 + 1e-9)


def test_embed_test_weighted_fail_consistent(tmp_path):
    code, text = run(tmp_path, "embed-test", "--gallery", "weighted_grid",
                     "--n", "129", "--alpha", "2", "--beta", "0", "--extent", "2",
                     "--omega", "1.0", "--variant", "inhomogeneous",
                     "--s1", "0.5", "--p1", "2", "--s2", "1.0", "--p2", "1", "--q", "1",
                     "--n-sequences", "48")
    assert code == 0      # a consistent FAIL is a clean exit
    assert json.loads(text)["verdict"] == "FAIL"


def test_embed_test_bad_trace_line_exit_2(tmp_path, capsys):
    code = main(["embed-test", "--gallery", "euclidean_grid", "--n", "16",
                 "--omega", "1.0", "--s1", "0.4", "--p1", "2", "--s2", "1.0",
                 "--p2", "1", "--q", "1"])
    assert code == 2
    assert "trace-line" in capsys.readouterr().err


def test_norms_command_matches_library(tmp_path, grid64_cubes):
    from homspace.seqnorm import CoefSequence, NormParams, besov_norm

    index = grid64_cubes.index_cubes("homogeneous", "fresh")
    rows = [{"k": k, "alpha": a, "value": 1.0 + i} for i, (k, a) in enumerate(index[:3])]
    seq_path = tmp_path / "seq.json"
    seq_path.write_text(json.dumps(rows))
    code, text = run(tmp_path, "norms", "--gallery", "euclidean_grid", "--n", "64",
                     "--seq", str(seq_path), "--family", "besov",
                     "--s", "0.5", "--p", "2", "--q", "1")
    assert code == 0
    report = json.loads(text)
    seq = CoefSequence(grid64_cubes, {(r["k"], r["alpha"]): r["value"] for r in rows})
    expected = besov_norm(seq, NormParams(s=0.5, p=2.0, q=1.0,
                                          delta=grid64_cubes.delta, family="besov"))
    assert report["value"] == pytest.approx(expected, rel=1e-12)


def test_norms_layer_cake_flag(tmp_path, grid64_cubes):
    index = grid64_cubes.index_cubes("homogeneous", "fresh")
    rows = [{"k": k, "alpha": a, "value": 0.3} for k, a in index[:4]]
    seq_path = tmp_path / "seq.json"
    seq_path.write_text(json.dumps(rows))
    code, text = run(tmp_path, "norms", "--gallery", "euclidean_grid", "--n", "64",
                     "--seq", str(seq_path), "--family", "triebel_lizorkin",
                     "--s", "0.2", "--p", "1.5", "--q", "2", "--layer-cake")
    assert code == 0
    report = json.loads(text)
    assert report["layer_cake_value"] == pytest.approx(report["value"], rel=1e-12)


def test_gallery_space_file_roundtrip(tmp_path):
    code, text = run(tmp_path, "gallery", "--gallery", "cantor", "--depth", "5")
    assert code == 0
    report = json.loads(text)
    space_path = tmp_path / "space.json"
    space_path.write_text(json.dumps(report["space"]))
    sp = load_space(str(space_path))
    assert sp.n == 32


def test_maximal_values(tmp_path):
    values = tmp_path / "f.json"
    values.write_text(json.dumps([1.0] * 16))
    code, text = run(tmp_path, "maximal", "--gallery", "euclidean_grid",
                     "--n", "16", "--values", str(values))
    assert code == 0
    report = json.loads(text)
    assert np.allclose(report["maximal"], 1.0)


def test_kernel_check_small(tmp_path):
    code, text = run(tmp_path, "kernel-check", "--gallery", "euclidean_grid",
                     "--n", "16", "--omega", "1.0", "--p2", "1",
                     "--calibration", "4", "--trials", "4")
    assert code == 0
    report = json.loads(text)
    assert report["verdict"] == "PASS"
    assert report["calibration"]["c_report"] > 0


def test_csv_format(tmp_path):
    code, text = run(tmp_path, "analyze", "--gallery", "euclidean_grid", "--n", "32",
                     "--format", "csv", name="out.csv")
    assert code == 0
    lines = text.strip().splitlines()
    assert len(lines) >= 2
    assert "n_points" in lines[0]


def test_reports_byte_identical(tmp_path):
    args = ["analyze", "--gallery", "cantor", "--depth", "5",
            "--check-lower-bound", "--omega", "0.6309", "--seed", "99"]
    _, first = run(tmp_path, *args, name="a.json")
    _, second = run(tmp_path, *args, name="b.json")
    assert first == second
    args2 = ["embed-test", "--gallery", "euclidean_grid", "--n", "32",
             "--omega", "1.0", "--s1", "0.5", "--p1", "2", "--s2", "1.0",
             "--p2", "1", "--q", "1", "--n-sequences", "32", "--seed", "7"]
    _, third = run(tmp_path, *args2, name="c.json")
    _, fourth = run(tmp_path, *args2, name="d.json")
    assert third == fourth


def test_analyze_reverse_doubling_flag(tmp_path):
    code, text = run(tmp_path, "analyze", "--gallery", "euclidean_grid",
                     "--n", "64", "--check-reverse-doubling", "1.0")
    assert code == 0
    report = json.loads(text)
    assert report["reverse_doubling"]["verdict"] == "PASS"
    assert report["stats"]["kappa_est"] is None or report["stats"]["kappa_est"] > 0


def test_maximal_random_mode(tmp_path):
    code, text = run(tmp_path, "maximal", "--gallery", "euclidean_grid",
                     "--n", "32", "--random", "5")
    assert code == 0
    report = json.loads(text)
    assert len(report["max_over_sup_ratios"]) == 5
    assert all(r >= 1.0 - 1e-12 for r in report["max_over_sup_ratios"])


def test_usage_error_exit_2():
    assert main(["analyze"]) == 2          # no space given
    assert main(["nonsense"]) == 2         # argparse rejects the command
