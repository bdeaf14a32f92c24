"""Integrator exactness, convergence order, phase accumulation, and aborts."""

from __future__ import annotations

import numpy as np
import pytest

import gkdv as G
from conftest import random_small_field, rng_for


def linear_problem(grid, gamma, f=None):
    return G.Problem(g=G.PolynomialNonlinearity(), gamma=gamma, f=f, grid=grid)


def test_pure_linear_flow_is_exact(rng, grid8):
    u0 = random_small_field(grid8, rng)
    prob = linear_problem(grid8, gamma=0.4)
    traj = G.simulate(prob, u0, G.SolverConfig(dt=1e-3, t_end=0.5, stride=100))
    exact = G.airy_propagator(u0, 0.5, 0.4)
    err = G.sobolev_norm(traj.fields[-1] - exact, 0.0)
    assert traj.completed
    assert err < 1e-12


def test_forced_linear_flow_matches_analytic_solution(grid8):
    # u' = (ik^3 - gamma) u + f  has solution F + e^{(ik^3-gamma)t}(u0 - F)
    f = G.SpectralField.from_modes(grid8, {1: 0.5, 3: 0.1j})
    F = G.steady_state_linear(f, 1.0)
    u0 = G.SpectralField.from_modes(grid8, {2: -0.25j})
    prob = linear_problem(grid8, gamma=1.0, f=f)
    traj = G.simulate(prob, u0, G.SolverConfig(dt=1e-3, t_end=2.0, stride=200))
    exact = F + G.airy_propagator(u0 - F, 2.0, 1.0)
    assert G.sobolev_norm(traj.fields[-1] - exact, 1.0) < 1e-9


def test_steady_state_is_fixed_point_of_full_rhs(grid8):
    f = G.SpectralField.from_modes(grid8, {1: 0.5, 2: 0.3 - 0.2j})
    F = G.steady_state_linear(f, 0.7)
    prob = linear_problem(grid8, gamma=0.7, f=f)
    assert G.sobolev_norm(G.full_rhs(F, prob), 0.0) < 1e-14


def test_full_rhs_hand_value_quadratic():
    # u = sin x, g = u^2: du/dt = -u_xxx - (u^2)_x = cos x + sin 2x... checked
    # spectrally: at k=1 only the Airy part acts, at k=2 only the product part.
    grid = G.Grid.for_degree(4, 2)
    u = G.SpectralField.from_modes(grid, {1: -0.5j})
    prob = G.Problem(g=G.PolynomialNonlinearity.single(2), gamma=0.0, f=None, grid=grid)
    rhs = G.full_rhs(u, prob)
    # Airy: (ik^3) c_1 = i * (-i/2) = 1/2
    assert abs(rhs.coeff(1) - 0.5) < 1e-14
    # product: u^2 has c_2 = -1/4; -ik gives -2i * (-1/4) = i/2
    assert abs(rhs.coeff(2) - 0.5j) < 1e-14


def test_ifrk4_step_matches_simulate_single_step(rng, grid8):
    u0 = random_small_field(grid8, rng, amplitude=0.3)
    prob = G.Problem(g=G.PolynomialNonlinearity.single(3, -1.0), gamma=0.2,
                     f=G.SpectralField.from_modes(grid8, {1: 0.5}), grid=grid8)
    one = G.ifrk4_step(u0, prob, dt=1e-3)
    traj = G.simulate(prob, u0, G.SolverConfig(dt=1e-3, t_end=1e-3))
    np.testing.assert_allclose(one.coeffs, traj.fields[-1].coeffs, atol=1e-15)


def test_fourth_order_convergence():
    grid = G.Grid.for_degree(16, 2)
    u0 = G.SpectralField.from_modes(grid, {1: -0.5j, 2: -0.25j})
    f = G.SpectralField.from_modes(grid, {1: 0.5})
    prob = G.Problem(g=G.PolynomialNonlinearity.single(2), gamma=0.3, f=f, grid=grid)
    t_end = 0.5

    def endpoint(dt):
        cfg = G.SolverConfig(dt=dt, t_end=t_end, stride=max(1, int(round(t_end / dt))))
        return G.simulate(prob, u0, cfg).fields[-1]

    ref = endpoint(6.25e-5)
    errs = [G.sobolev_norm(endpoint(dt) - ref, 0.0) for dt in (1e-3, 5e-4, 2.5e-4)]
    r1 = errs[0] / errs[1]
    r2 = errs[1] / errs[2]
    assert 11.0 < r1 < 21.0
    assert 11.0 < r2 < 22.0


def test_phase_rate_vanishes_for_even_powers(rng, grid8):
    # integral of g'(u) = 2 * integral of u = 0 for g = u^2 and mean-zero u
    u0 = random_small_field(grid8, rng, amplitude=0.2)
    prob = G.Problem(g=G.PolynomialNonlinearity.single(2), gamma=0.0, f=None, grid=grid8)
    traj = G.simulate(prob, u0, G.SolverConfig(dt=1e-3, t_end=0.2, stride=10))
    assert np.max(np.abs(traj.thetas)) < 1e-15


def test_phase_accumulates_conserved_cubic_rate():
    # g = u^3, gamma = 0, f = 0: integral of g' = 3 * integral of u^2 is
    # conserved, so theta(t) = t * 2pi * 3 * mean(u0^2) exactly
    grid = G.Grid.for_degree(32, 3)
    u0 = G.SpectralField.from_modes(grid, {1: -0.5j})  # sin x, mean square 1/2
    prob = G.Problem(g=G.PolynomialNonlinearity.single(3), gamma=0.0, f=None, grid=grid)
    traj = G.simulate(prob, u0, G.SolverConfig(dt=1e-3, t_end=0.1, stride=10))
    assert abs(traj.thetas[-1] - 0.3 * np.pi) < 1e-10


def test_momentum_decays_at_exact_exponential_rate(rng):
    # The continuum law d/dt ||u||^2 = -2 gamma ||u||^2 holds exactly for
    # unforced flow; the discrete flow matches it to integrator order, so keep
    # the amplitude and step small enough that time error sits near 1e-8.
    grid = G.Grid.for_degree(16, 3)
    u0 = random_small_field(grid, rng, amplitude=0.05)
    prob = G.Problem(g=G.PolynomialNonlinearity.single(3, -1.0), gamma=0.5, f=None, grid=grid)
    traj = G.simulate(prob, u0, G.SolverConfig(dt=2e-4, t_end=1.0, stride=100))
    expected = G.momentum(u0) * np.exp(-2.0 * 0.5 * 1.0)
    assert abs(G.momentum(traj.fields[-1]) - expected) < 1e-7 * G.momentum(u0)


def test_blowup_aborts_with_partial_trajectory(rng, grid8):
    u0 = random_small_field(grid8, rng, amplitude=1.0)
    prob = linear_problem(grid8, gamma=0.0)
    cfg = G.SolverConfig(dt=1e-3, t_end=1.0, stride=10, blowup_cap=1e-3, check_stride=5)
    traj = G.simulate(prob, u0, cfg)
    assert not traj.completed
    assert traj.abort is not None
    assert traj.abort["step"] >= 1
    assert traj.abort["h1_norm"] > 1e-3
    assert len(traj) >= 1  # initial snapshot retained
    assert traj.times[-1] <= traj.abort["t"]


def test_sampling_grid_and_observers(rng, grid8):
    u0 = random_small_field(grid8, rng, amplitude=0.1)
    prob = G.Problem(g=G.PolynomialNonlinearity.single(2), gamma=0.1, f=None, grid=grid8)
    cfg = G.SolverConfig(dt=1e-3, t_end=0.05, stride=10)
    seen = []
    traj = G.simulate(prob, u0, cfg, observers=[lambda t, u, th: seen.append(t)])
    assert len(traj) == 6  # t = 0, .01, ..., .05
    np.testing.assert_allclose(traj.times, np.arange(6) * 0.01, atol=1e-12)
    assert traj.sample_spacing == pytest.approx(0.01)
    assert seen == list(traj.times)
    # final step is recorded even when stride does not divide n_steps
    cfg2 = G.SolverConfig(dt=1e-3, t_end=0.055, stride=10)
    traj2 = G.simulate(prob, u0, cfg2)
    assert traj2.times[-1] == pytest.approx(0.055)


def test_solver_config_validation():
    with pytest.raises(ValueError):
        G.SolverConfig(dt=0.0, t_end=1.0)
    with pytest.raises(ValueError):
        G.SolverConfig(dt=1e-3, t_end=1.0, stride=0)
    with pytest.raises(ValueError):
        G.SolverConfig(dt=1e-3, t_end=1.0, blowup_cap=0.0)


def test_grid_mismatch_is_rejected(rng, grid8):
    other = G.Grid.for_degree(12, 3)
    u0 = random_small_field(other, rng_for(1, 1))
    prob = linear_problem(grid8, gamma=0.0)
    with pytest.raises(ValueError):
        G.simulate(prob, u0, G.SolverConfig(dt=1e-3, t_end=0.01))
