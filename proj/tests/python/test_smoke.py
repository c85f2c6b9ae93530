"""End-to-end smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import fracheat


def test_version_string():
    assert isinstance(fracheat.__version__, str)
    assert fracheat.__version__.count(".") == 2


def test_kernel_mass_is_one():
    for s in (0.25, 0.5, 0.75):
        for y in (0.1, 1.0, 10.0):
            assert abs(fracheat.kernel_mass(y, s) - 1.0) <= 1e-8


def test_apply_spectral_single_mode():
    L, T, s = 2 * math.pi, 1.0, 0.6
    g = fracheat.Grid(n=1, Nx=32, Nt=16, L=L, T=T)
    f = fracheat.generate("mode", {"kx": 1.0, "kt": 1.0}, g)
    assert f.shape == (32, 16)

    out = fracheat.apply_operator(f, L, T, s, method="spectral")
    m = (1.0 + 2j * math.pi) ** s
    x = np.arange(32) * (L / 32)
    t = np.arange(16) * (T / 16)
    ref = abs(m) * np.cos(
        x[:, None] + 2 * math.pi * t[None, :] + np.angle(m)
    )
    assert np.max(np.abs(out - ref)) <= 1e-10
    assert np.max(np.abs(out.imag)) <= 1e-12


def test_consistency_routes_agree():
    L, T = 2 * math.pi, 1.0
    g = fracheat.Grid(n=1, Nx=32, Nt=16, L=L, T=T)
    f = fracheat.generate("gaussian-bump", {}, g)
    rep = fracheat.consistency(f, L, T, 0.5)
    assert sorted(rep["routes"]) == ["extension", "singular", "spectral"]
    assert len(rep["pairwise"]) == 3
    for sup_rel, l2_rel in rep["pairwise"].values():
        assert 0.0 <= l2_rel <= sup_rel or l2_rel <= 2e-2
        assert l2_rel <= 2e-2
    assert rep["calibration"]["extension"] > 0.0


def test_extend_pde_trace_and_grid():
    L, T, s = 2 * math.pi, 1.0, 0.5
    g = fracheat.Grid(n=1, Nx=16, Nt=8, L=L, T=T)
    f = fracheat.generate("gaussian-bump", {}, g)
    vals, y = fracheat.extend_pde(f, L, T, s, J=16, Ymax=3.0)
    assert vals.shape == (16, len(y), 8)
    y = np.asarray(y)
    assert y[0] == 0.0
    assert np.all(np.diff(y) > 0)
    assert np.max(np.abs(vals[:, 0, :] - f)) <= 1e-12
    # solution decays away from the base
    assert np.max(np.abs(vals[:, -1, :])) < np.max(np.abs(f))


def test_config_errors():
    g = fracheat.Grid(n=1, Nx=16, Nt=8, L=1.0, T=1.0)
    f = fracheat.generate("constant", {"c": 1.0}, g)
    with pytest.raises(fracheat.ConfigError):
        fracheat.apply_operator(f, 1.0, 1.0, 1.5, method="spectral")
    with pytest.raises(fracheat.ConfigError):
        fracheat.apply_operator(f, 1.0, 1.0, 0.5, method="bogus")
    with pytest.raises(fracheat.ConfigError):
        fracheat.Grid(n=3, Nx=16, Nt=8, L=1.0, T=1.0)


def test_harnack_experiment_profile():
    res = fracheat.harnack_experiment(
        s=0.5, M=0.0, Lx=4.0, nx=24, ny=24, nt=48, t0=0.6, r=0.3, depth=3
    )
    r_k = np.asarray(res["r_k"])
    osc_k = np.asarray(res["osc_k"])
    assert len(r_k) == len(osc_k) >= 2
    assert np.all(np.diff(r_k) < 0)
    assert np.all(osc_k >= 0)
    assert res["corkscrew_quotient"] > 0.0
    if not res["exact"]:
        assert 0.0 <= res["alpha"] <= 1.0
