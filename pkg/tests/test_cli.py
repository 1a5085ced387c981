import os

import pytest

from mzres.cli import _endpoint_derivative, main
from mzres.io_store import CACHE_ENV, ExperimentConfig, save_config
from mzres.windows import Disc


@pytest.fixture(autouse=True)
def _shared_cache(monkeypatch, cache_dir, dist3):
    # point the CLI at the session cache so no command rebuilds the profile
    monkeypatch.setenv(CACHE_ENV, cache_dir)


@pytest.fixture()
def config_path(tmp_path):
    cfg = ExperimentConfig(
        d=3,
        shells=((1.0, 6.0 + 0.0j),),
        radii=(6.0, 9.0, 12.0),
        windows=(Disc(-0.5j, 0.45),),
        mesh=0.05,
        tol=1e-9,
        seed=3,
        outdir=str(tmp_path / "run"),
    )
    path = str(tmp_path / "exp.cfg")
    save_config(cfg, path)
    return path


def test_endpoint_derivative_matches_slope():
    assert abs(_endpoint_derivative(3, True) - 4.0 / 3.0) < 1e-4
    assert abs(_endpoint_derivative(3, False) + 4.0 / 3.0) < 1e-4


def test_verify_passes_for_d3(capsys):
    assert main(["verify", "--d", "3"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 8


def test_verify_usage_errors(capsys):
    assert main(["verify", "--d", "4"]) == 2
    assert main(["verify", "--d", "3", "--tol", "0.0"]) == 2
    assert "error:" in capsys.readouterr().err


def test_hd_table(tmp_path, capsys):
    out = str(tmp_path / "hd.csv")
    assert main(["hd-table", "--d", "3", "--n", "5", "--out", out,
                 "--no-figures"]) == 0
    lines = open(out).read().splitlines()
    assert lines[0] == "theta,h,dh,ddh,density"
    assert len(lines) == 6
    assert not os.path.exists(str(tmp_path / "hd.png"))
    assert main(["hd-table", "--d", "3", "--n", "1", "--out", out]) == 2


def test_hd_table_figure(tmp_path):
    out = str(tmp_path / "hd.csv")
    assert main(["hd-table", "--d", "3", "--n", "5", "--out", out]) == 0
    assert os.path.getsize(str(tmp_path / "hd.png")) > 0


def test_sector_mass_conventions(capsys):
    assert main(["sector-mass", "--d", "3", "--theta1", "0.0",
                 "--theta2", "0.7853981633974483"]) == 0
    out = capsys.readouterr().out
    assert "lemma" in out and "corollary" in out
    # away from the axis the two conventions coincide: one line only
    assert main(["sector-mass", "--d", "3", "--theta1", "0.5",
                 "--theta2", "1.5"]) == 0
    out = capsys.readouterr().out
    assert "lemma" in out and "corollary" not in out
    assert main(["sector-mass", "--d", "3", "--theta1", "2.0",
                 "--theta2", "1.0"]) == 2


def test_sample_determinism(tmp_path):
    p1, p2 = str(tmp_path / "s1.csv"), str(tmp_path / "s2.csv")
    for p in (p1, p2):
        assert main(["sample", "--d", "3", "--n", "500", "--seed", "42",
                     "--out", p, "--no-figures"]) == 0
    assert open(p1, "rb").read() == open(p2, "rb").read()
    assert main(["sample", "--d", "3", "--n", "0", "--seed", "1",
                 "--out", p1]) == 2


def test_resonances_command(config_path, tmp_path, capsys):
    assert main(["resonances", "--config", config_path, "--oracle",
                 "--no-figures"]) == 0
    out = capsys.readouterr().out
    assert "oracle check passed" in out
    run = os.path.dirname(config_path) + "/run"
    lines = open(os.path.join(run, "resonances.csv")).read().splitlines()
    assert lines[0].startswith("re_lambda,im_lambda,l,")
    assert len(lines) > 10
    assert os.path.exists(os.path.join(run, "resonances_summary.json"))


def test_converge_command(config_path, tmp_path):
    assert main(["converge", "--config", config_path, "--no-figures"]) == 0
    run = os.path.dirname(config_path) + "/run"
    conv = open(os.path.join(run, "convergence.csv"), "rb").read()
    dist_csv = open(os.path.join(run, "distance.csv"), "rb").read()
    assert conv.startswith(b"r,window_id,variant,empirical_mass,mz_mass,gap\n")
    assert dist_csv.startswith(b"r,omega_id,gamma,value,solver_gap,mesh\n")
    assert os.path.exists(os.path.join(run, "rates.csv"))
    # the whole pipeline is deterministic: rerun reproduces identical bytes
    assert main(["converge", "--config", config_path, "--no-figures"]) == 0
    assert open(os.path.join(run, "convergence.csv"), "rb").read() == conv
    assert open(os.path.join(run, "distance.csv"), "rb").read() == dist_csv


def test_converge_figures(config_path):
    assert main(["converge", "--config", config_path]) == 0
    run = os.path.dirname(config_path) + "/run"
    for name in ("convergence.png", "distance.png"):
        assert os.path.getsize(os.path.join(run, name)) > 0


def test_bad_config_is_usage_error(tmp_path, capsys):
    bad = str(tmp_path / "bad.cfg")
    open(bad, "w").write("schema = 1\nnot a line\n")
    assert main(["resonances", "--config", bad]) == 2
    assert "error:" in capsys.readouterr().err
