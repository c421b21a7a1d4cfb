import math
import subprocess
import sys

import pytest

from anglediv.cli import ExperimentConfig, UsageError, main, parse_config_text

PI = math.pi


def _values(text):
    out = {}
    for line in text.splitlines():
        if " = " in line:
            key, value = line.split(" = ", 1)
            out[key.strip()] = value.strip()
    return out


def test_gallery_listing(capsys):
    assert main(["gallery"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 7
    assert [line.split("\t")[0] for line in lines] == ["plane", "sphere", "cylinder", "torus", "saddle",
                                                       "ellipsoid", "monkey-saddle"]


def test_gallery_torus(capsys):
    assert main(["gallery", "--surface", "torus"]) == 0
    out = capsys.readouterr().out
    assert "domain: u in (" in out
    assert "K > 0" in out and "K < 0" in out


def test_gallery_unknown(capsys):
    assert main(["gallery", "--surface", "klein"]) == 1
    assert "unknown surface" in capsys.readouterr().err


def test_run_plane(capsys, tmp_path):
    out_csv = tmp_path / "trace.csv"
    code = main(["run", "--surface", "plane", "--mu", "1.0471975512", "--p-const", "1", "--q-const", "1",
                 "--output", str(out_csv)])
    assert code == 0
    vals = _values(capsys.readouterr().out)
    assert abs(float(vals["alpha_inf_emp"]) - 2 * PI / 9) < 1e-9
    header = out_csv.read_text().splitlines()[0]
    assert header == "k,au,av,bu,bv,len_VA,len_VB,alpha,beta,raw_alpha,raw_beta,int_ABA,int_ABV,eps,res_eq1,res_eq2"


def test_run_sphere(capsys):
    code = main(["run", "--surface", "sphere", "--radius", "1", "--mu", "1.5707963268", "--p-const", "1",
                 "--q-const", "1", "--a1", "0.2", "--alpha1", "0.7853981634"])
    assert code == 0
    vals = _values(capsys.readouterr().out)
    assert abs(float(vals["alpha_inf_emp"]) - PI / 6) < 1e-5
    assert abs(float(vals["beta_inf_emp"]) - PI / 6) < 1e-5


def test_run_saddle_corollary(capsys):
    assert main(["run", "--surface", "saddle", "--mu", "1.5707963268", "--pq", "corollary2"]) == 0
    vals = _values(capsys.readouterr().out)
    assert abs(float(vals["alpha_inf_emp"]) - 17 * PI / 70) < 1e-4
    assert abs(float(vals["beta_inf_emp"]) - PI / 70) < 1e-4


def test_run_no_convergence(capsys, tmp_path):
    out_csv = tmp_path / "t.csv"
    code = main(["run", "--surface", "plane", "--max-iters", "2", "--step-h", "0.01", "-o", str(out_csv)])
    assert code == 2
    assert len(out_csv.read_text().splitlines()) == 4


def test_run_geometric_failure(capsys):
    assert main(["run", "--surface", "plane", "--alpha1", "2.0"]) == 1
    assert "NoIntersection" in capsys.readouterr().err


def test_run_bad_flag_value(capsys):
    assert main(["run", "--surface", "torus", "--radius", "2"]) == 1
    assert main(["run", "--mu", "4"]) == 1


def test_config_round_trip():
    cfg = ExperimentConfig(surface="torus", R=3.0, r=0.7, vu=0.1, vv=-0.2, mu=1.2345678901234567, a1=0.11,
                           alpha1=0.3, pq="corollary2", step_h=1e-4, max_iters=50, conv_tol=1e-11, output="x.csv")
    assert ExperimentConfig.from_text(cfg.to_text()) == cfg


def test_config_comments_and_errors():
    vals = parse_config_text("# experiment\nmu = 1.0  # radians\n\nsurface = sphere\n")
    assert vals == {"mu": 1.0, "surface": "sphere"}
    with pytest.raises(UsageError):
        parse_config_text("nonsense = 3\n")


def test_flags_override_file(capsys, tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("surface = plane\nmu = 2.0\np-const = 2\nq-const = 2\nstep-h = 0.05\n")
    assert main(["run", "--config", str(conf), "--mu", "1.0471975512"]) == 0
    vals = _values(capsys.readouterr().out)
    assert abs(float(vals["alpha_inf_theory"]) - (PI - 1.0471975512) / 4) < 1e-12


def test_identical_configs_identical_csv(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("surface = sphere\nmu = 1.2\na1 = 0.15\nstep-h = 0.001\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["run", "--config", str(conf), "-o", str(a)]) == 0
    assert main(["run", "--config", str(conf), "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_saved_config_reproduces_run(tmp_path, capsys):
    saved = tmp_path / "saved.conf"
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["run", "--surface", "torus", "--vu", "0.5", "--a1", "0.1", "--step-h", "0.001", "-o", str(a),
                 "--save-config", str(saved)]) == 0
    assert main(["run", "--config", str(saved), "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("surface,u,kind", [("cylinder", "0", "parabolic"), ("sphere", "0.7853981634", "elliptic"),
                                            ("saddle", "0", "hyperbolic")])
def test_classify(capsys, surface, u, kind):
    assert main(["classify", "--surface", surface, "--u", u, "--v", "0", "--mu", "1.5707963268"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("surface,u,v,K,k1,k2,p,q,")
    assert lines[1].split(",")[-3] == kind


def test_classify_out_of_domain(capsys):
    assert main(["classify", "--surface", "sphere", "--u", "0", "--v", "0"]) == 1


def test_gbcheck_plane(capsys):
    assert main(["gbcheck", "--surface", "plane", "--vertex", "0", "0", "--vertex", "1", "0",
                 "--vertex", "0", "1"]) == 0
    assert float(_values(capsys.readouterr().out)["residual"]) < 1e-9


def test_gbcheck_sphere(capsys):
    assert main(["gbcheck", "--surface", "sphere", "--vertex", "1.4", "-0.2", "--vertex", "1.75", "0.1",
                 "--vertex", "1.3", "0.25"]) == 0
    assert float(_values(capsys.readouterr().out)["residual"]) < 1e-6


def test_gbcheck_collinear(capsys):
    assert main(["gbcheck", "--surface", "plane", "--vertex", "0", "0", "--vertex", "1", "0",
                 "--vertex", "2", "0"]) == 1
    assert "NonSimplePolygon" in capsys.readouterr().err


def test_gbcheck_failure_exit(capsys):
    code = main(["gbcheck", "--surface", "sphere", "--vertex", "1.2", "-0.6", "--vertex", "1.9", "0.1",
                 "--vertex", "1.0", "0.6", "--step-h", "0.3"])
    assert code == 4


def test_gbcheck_needs_three_vertices(capsys):
    assert main(["gbcheck", "--vertex", "0", "0", "--vertex", "1", "0"]) == 1


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "anglediv.cli", "gallery"], capture_output=True, text=True)
    assert res.returncode == 0
    assert len(res.stdout.strip().splitlines()) == 7
