import json
import math
import os
import subprocess

import numpy as np
import pytest

import oitk


def test_grid_and_builtins():
    g = oitk.Grid(32, 32)
    assert g.nx == 32 and g.ny == 32
    assert g.total_volume == pytest.approx(4 * math.pi**2)
    assert "cosine" in oitk.builtin_names()
    mu = oitk.builtin_density("cosine", g)
    assert mu.shape == (32, 32)
    assert mu.mean() == pytest.approx(1.0, rel=1e-12)


def test_poisson_inverts_laplacian():
    g = oitk.Grid(32, 32)
    x = np.arange(32) * 2 * math.pi / 32
    f = np.sin(x)[:, None] * np.cos(2 * x)[None, :]
    assert np.abs(oitk.laplacian(f, g) + 5 * f).max() < 1e-12
    assert np.abs(oitk.solve_poisson(oitk.laplacian(f, g), g) - f).max() < 1e-12


def test_distances_and_geodesic():
    g = oitk.Grid(32, 32)
    mu0 = np.ones((32, 32))
    mu1 = oitk.builtin_density("cosine", g)
    d = oitk.distances(mu0, mu1, g)
    assert 0 < d["hellinger"] <= d["fisher_rao"] <= math.pi / 2
    assert d["kl"] >= 0 and d["chi2"] >= 0
    mid = oitk.fisher_rao_geodesic(mu0, mu1, g, 0.5)
    a = oitk.fisher_rao_distance(mu0, mid, g)
    b = oitk.fisher_rao_distance(mid, mu1, g)
    assert a == pytest.approx(b, rel=1e-8)


def test_solve_oit_matches_target():
    g = oitk.Grid(64, 64)
    mu1 = oitk.builtin_density("cosine", g)
    r = oitk.solve_oit(mu1, g, N=20)
    assert r["steps"] == 20
    assert r["residual"] < 2e-2
    assert r["map"]["jacobian"].shape == (64, 64)


def test_register_decreases_energy():
    g = oitk.Grid(32, 32)
    j = oitk.builtin_density("J", g, floor=0.1)
    v = oitk.builtin_density("V", g, floor=0.1)
    r = oitk.register(j, v, g, sigma=0.05, max_iter=10)
    trace = r["energy_trace"]
    assert len(trace) == r["iterations"]
    assert trace[-1] < r["initial_energy"]


def test_sampling_is_reproducible():
    g = oitk.Grid(32, 32)
    mu1 = oitk.builtin_density("cosine", g)
    a = oitk.sample(mu1, g, 1000, seed=3)
    b = oitk.sample(mu1, g, 1000, seed=3)
    assert a.shape == (1000, 2)
    assert np.array_equal(a, b)
    assert oitk.chi2_quantile(255, 0.999) == pytest.approx(330.5197, rel=1e-6)


def test_errors_map_to_python_exceptions():
    g = oitk.Grid(16, 16)
    with pytest.raises(ValueError):
        oitk.normalize(np.ones((8, 8)), g)
    with pytest.raises(ValueError):
        oitk.builtin_density("nope", g)
    with pytest.raises(OSError):
        oitk.write_raw_field("/nonexistent_dir_oitk/f.f64", np.ones((16, 16)), g)


def test_raw_field_round_trip(tmp_path):
    g = oitk.Grid(8, 4, 2.0, 1.0)
    f = np.random.default_rng(0).standard_normal((8, 4))
    path = str(tmp_path / "f.f64")
    oitk.write_raw_field(path, f, g)
    back, grid = oitk.read_raw_field(path)
    assert np.array_equal(back, f)
    assert (grid.nx, grid.ny, grid.Lx, grid.Ly) == (8, 4, 2.0, 1.0)


def test_oracle_1d():
    x = np.arange(512) * 2 * math.pi / 512
    r = oitk.cdf_transport_1d(list(1 + 0.5 * np.sin(x)), list(1 + 0.3 * np.cos(2 * x)))
    assert r["residual"] < 1e-4


def _cli():
    path = os.environ.get("OITK_CLI")
    if not path or not os.path.exists(path):
        pytest.skip("OITK_CLI not set")
    return path


def _schema():
    path = os.environ.get("OITK_SCHEMA")
    if not path:
        pytest.skip("OITK_SCHEMA not set")
    with open(path) as f:
        return json.load(f)


def test_cli_reports_validate(tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    cli, schema = _cli(), _schema()
    ok = subprocess.run([cli, "match-exact", "--target", "cosine", "--grid", "32", "--out", str(tmp_path / "ok")])
    assert ok.returncode == 0
    bad = subprocess.run([cli, "match-exact", "--target", "nope", "--grid", "32", "--out", str(tmp_path / "bad")],
                         stderr=subprocess.DEVNULL)
    assert bad.returncode == 3
    for name, status in (("ok", "ok"), ("bad", "error")):
        with open(tmp_path / name / "report.json") as f:
            report = json.load(f)
        jsonschema.validate(report, schema)
        assert report["status"] == status
