"""Conserved quantities, decay fitting, absorption, and the refinement study."""

from __future__ import annotations

import numpy as np
import pytest

import gkdv as G
from conftest import random_small_field, rng_for


def test_mass_is_always_zero(rng, grid8):
    assert G.mass(random_small_field(grid8, rng)) == 0.0


def test_momentum_hand_value():
    grid = G.Grid(4)
    u = G.SpectralField.from_modes(grid, {1: -0.5j})  # sin x
    # integral of sin^2 = pi
    assert abs(G.momentum(u) - np.pi) < 1e-14


def test_momentum_matches_dense_quadrature(rng, grid8):
    u = random_small_field(grid8, rng)
    dense = G.to_physical(u, samples=4096)
    assert abs(G.momentum(u) - 2.0 * np.pi * np.mean(dense**2)) < 1e-11


def test_energy_hand_value_cubic():
    # u = sin x, g = -u^3: E = (1/2) int u_x^2 - int G(u) with G = -u^4/4
    #   = pi/2 + (2 pi)(3/8)/4 = pi/2 + 3 pi/16
    grid = G.Grid.for_degree(8, 3)
    u = G.SpectralField.from_modes(grid, {1: -0.5j})
    g = G.PolynomialNonlinearity.single(3, -1.0)
    assert abs(G.energy(u, g) - (np.pi / 2 + 3 * np.pi / 16)) < 1e-13


def test_energy_matches_dense_quadrature(rng):
    grid = G.Grid.for_degree(6, 4)
    u = random_small_field(grid, rng, amplitude=0.4)
    g = G.PolynomialNonlinearity({2: 0.7, 4: -0.2})
    dense = G.to_physical(u, samples=8192)
    du = G.to_physical(G.apply_multiplier(u, lambda k: 1j * k), samples=8192)
    target = 2 * np.pi * np.mean(0.5 * du**2 - (0.7 * dense**3 / 3 - 0.2 * dense**5 / 5))
    assert abs(G.energy(u, g) - target) < 1e-9


def test_smoothing_metric_vanishes_on_linear_flow(rng, grid8):
    u0 = random_small_field(grid8, rng)
    prob = G.Problem(g=G.PolynomialNonlinearity(), gamma=0.3, f=None, grid=grid8)
    traj = G.simulate(prob, u0, G.SolverConfig(dt=1e-3, t_end=0.2, stride=20))
    metric = G.smoothing_metric(traj, rho=0.5)
    assert metric.shape == (len(traj),)
    assert np.max(metric) < 1e-11
    override = G.smoothing_metric(traj, rho=0.5, u0=u0)
    np.testing.assert_array_equal(metric, override)


def test_smoothing_metric_sees_initial_data_mismatch(rng, grid8):
    u0 = random_small_field(grid8, rng)
    prob = G.Problem(g=G.PolynomialNonlinearity(), gamma=0.0, f=None, grid=grid8)
    traj = G.simulate(prob, u0, G.SolverConfig(dt=1e-3, t_end=0.01, stride=10))
    other = random_small_field(grid8, rng_for(2, 2))
    metric = G.smoothing_metric(traj, rho=0.5, u0=other)
    assert np.all(metric > 0.1 * G.sobolev_norm(u0 - other, 1.5))


def test_decay_fit_recovers_exact_exponential():
    t = np.linspace(0, 5, 60)
    v = 3.0 * np.exp(-1.25 * t)
    fit = G.decay_fit(t, v)
    assert fit.rate == pytest.approx(1.25, abs=1e-12)
    assert fit.intercept == pytest.approx(np.log(3.0), abs=1e-12)
    assert fit.rms_residual < 1e-13
    assert fit.n_points == 60


def test_decay_fit_window_selects_subrange():
    t = np.linspace(0, 10, 101)
    v = np.exp(-0.5 * t)
    v[: 20] = 1.0  # transient plateau outside the window
    fit = G.decay_fit(t, v, window=(4.0, 10.0))
    assert fit.rate == pytest.approx(0.5, abs=1e-10)
    assert fit.window[0] >= 4.0 and fit.window[1] <= 10.0


def test_decay_fit_input_validation():
    with pytest.raises(ValueError):
        G.decay_fit([0.0], [1.0])
    with pytest.raises(ValueError):
        G.decay_fit([0.0, 1.0], [1.0, -0.5])
    with pytest.raises(ValueError):
        G.decay_fit([0.0, 1.0, 2.0], [1.0, 0.5, 0.25], window=(5.0, 6.0))


def test_absorbing_entry_matches_analytic_crossing(rng, grid8):
    u0 = random_small_field(grid8, rng)
    gamma = 0.5
    prob = G.Problem(g=G.PolynomialNonlinearity(), gamma=gamma, f=None, grid=grid8)
    traj = G.simulate(prob, u0, G.SolverConfig(dt=1e-3, t_end=4.0, stride=50))
    h1 = G.sobolev_norm(u0, 1.0)
    radius = h1 * np.exp(-gamma * 1.7)  # analytic crossing at t = 1.7
    entry = G.absorbing_entry(traj, radius)
    assert entry is not None
    assert abs(entry - 1.7) <= traj.sample_spacing + 1e-12
    assert G.absorbing_entry(traj, 2.0 * h1) == 0.0  # inside from the start
    assert G.absorbing_entry(traj, h1 * np.exp(-gamma * 10.0)) is None  # never entered


def test_rough_coefficients_magnitudes_and_nesting():
    c64 = G.rough_coefficients(64, rng_for(41, 0))
    c256 = G.rough_coefficients(256, rng_for(41, 0))
    np.testing.assert_array_equal(c64, c256[:64])  # shared-draw truncation
    np.testing.assert_allclose(np.abs(c256), (1.0 + np.arange(1, 257)) ** (-1.51), atol=1e-15)
    scaled = G.rough_coefficients(16, rng_for(41, 0), exponent=-2.0, amplitude=3.0)
    np.testing.assert_allclose(np.abs(scaled), 3.0 * (1.0 + np.arange(1, 17)) ** (-2.0), atol=1e-15)


def test_refinement_study_rows_small_smoke():
    g = G.PolynomialNonlinearity.single(3, -1.0)
    rows = G.refinement_smoothing_study(
        g, gamma=0.5, forcing_modes={1: 0.5}, N_list=[8, 16], rho=0.5,
        dt=1e-3, t_end=0.05, seed_rng=rng_for(2026, 0), stride=10,
    )
    assert [r.N for r in rows] == [8, 16]
    assert all(r.status == "completed" for r in rows)
    assert rows[0].data_norm < rows[1].data_norm  # more retained modes, bigger norm
    assert all(np.isfinite(r.sup_metric) and r.sup_metric > 0 for r in rows)
