import math

import numpy as np
import pytest

import gctl


def test_g_eval_interval():
    g = gctl.GammaSet.interval(0.5, 1.0)
    assert gctl.g_eval(2.0, g) == pytest.approx(1.0)
    assert gctl.g_eval(-2.0, g) == pytest.approx(-0.25)
    assert gctl.g_eval(np.array([[2.0]]), g) == pytest.approx(1.0)
    assert gctl.g_maximizer(np.array([[-2.0]]), g)[0, 0] == 0.5


def test_g_eval_finite_set():
    g = gctl.GammaSet.finite([np.eye(2), 2 * np.eye(2)])
    assert g.dim == 2
    assert gctl.g_eval(np.eye(2), g) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        gctl.g_eval(np.array([[1.0, 0.5], [0.0, 1.0]]), g)


def test_bad_interval():
    with pytest.raises(ValueError):
        gctl.GammaSet.interval(0.0, 1.0)


def test_solve_hjb_catalog():
    out = gctl.solve_hjb(gctl.Config(problem_id="gheat-square"))
    i0 = int(np.argmin(np.abs(out["x"])))
    assert out["v"][0, i0] == pytest.approx(1.0, abs=5e-3)
    assert out["v"].shape == (len(out["t"]), len(out["x"]))
    assert out["policy"].shape[0] == len(out["t"]) - 1


def test_cfl_violation_is_reported():
    with pytest.raises(ValueError, match="CFL"):
        gctl.solve_hjb(gctl.Config(problem_id="gheat-square", nt=10))


def test_solve_g_heat_with_python_terminal():
    g = gctl.GammaSet.interval(0.5, 1.0)
    out = gctl.solve_g_heat(lambda x: -x * x, g, horizon=1.0, nx=201)
    i0 = int(np.argmin(np.abs(out["x"])))
    assert out["v"][-1, i0] == pytest.approx(-0.25, abs=5e-3)


def test_mc_bound():
    g = gctl.GammaSet.interval(0.5, 1.0)
    r = gctl.mc_sublinear_expectation(lambda x: x * x, g, n_paths=20000, seed=3)
    assert abs(r["estimate"] - 1.0) <= 3 * r["std_error"]
    assert r["argmax_theta"] == [1.0]


def test_tree_and_oracle_compare():
    cfg = gctl.Config(problem_id="gheat-square", tree_steps=2, n_paths=5000, mc_nt=2)
    tree = gctl.tree_solve(cfg)
    assert tree["y0"] == pytest.approx(1.0, abs=1e-12)
    assert all(k == 0.0 for layer in tree["k"] for k in layer)
    r = gctl.oracle_compare(cfg)
    assert r["mc_below_pde"]
    assert abs(r["tree_value"] - r["pde_value"]) <= 5e-2


def test_dpp_singleton():
    r = gctl.dpp_residual(gctl.Config(problem_id="single-control", nt=2000), 0, 200)
    assert r["max_residual"] <= 1e-12


def test_run_writes_csv(tmp_path):
    cfg = gctl.Config(problem_id="gheat-square", output_dir=str(tmp_path))
    status, log = gctl.run("solve-hjb", cfg)
    assert status == 0
    assert "PASS" in log
    assert (tmp_path / "value.csv").read_text().startswith("t,x,v,policy\n")
    assert "solve-hjb" in gctl.subcommands()
    assert "two-control" in gctl.catalog_ids()


def test_unknown_config_field():
    with pytest.raises(ValueError):
        gctl.Config(no_such_field=1)
