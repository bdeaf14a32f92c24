"""Damping drains the solution at an exact rate; forcing balances it.

Part one: with damping gamma and no forcing, the squared L^2 norm obeys
d/dt ||u||^2 = -2 gamma ||u||^2 exactly, whatever the nonlinearity, because
the dispersive and nonlinear fluxes integrate to zero on the torus.  A
log-linear fit of the measured momentum recovers 2 gamma to high accuracy.

Part two: with g = 0 the forced-damped flow has the explicit steady state
F given mode-by-mode by f_k / (gamma - i k^3), and every solution relaxes
to it like e^{-gamma t}.
"""

import numpy as np

import gkdv as G

# --- part one: exact L^2 decay ------------------------------------------
gamma = 0.5
grid = G.Grid.for_degree(64, 3)
u0 = G.SpectralField.from_modes(grid, {1: -0.5j, 2: -0.25j})
problem = G.Problem(g=G.PolynomialNonlinearity.single(3, -1.0),
                    gamma=gamma, f=None, grid=grid)
traj = G.simulate(problem, u0, G.SolverConfig(dt=2e-4, t_end=8.0, stride=200))
momenta = np.array([G.momentum(u) for u in traj.fields])
fit = G.decay_fit(np.array(traj.times), momenta)
print(f"fitted decay rate of ||u||^2 : {fit.rate:.12f}   (exact: {2 * gamma})")
print(f"fit rms residual             : {fit.rms_residual:.2e}")

# --- part two: linear steady state ---------------------------------------
grid = G.Grid(64)
f = G.SpectralField.from_modes(grid, {1: 0.5})  # f = cos x
steady = G.steady_state_linear(f, gamma=1.0)
print(f"steady-state mode 1          : {steady.coeff(1):.6f}   (exact: (1+1j)/4)")

problem = G.Problem(g=G.PolynomialNonlinearity(), gamma=1.0, f=f, grid=grid)
start = 1.5 * steady  # start 50% above the steady state
traj = G.simulate(problem, start, G.SolverConfig(dt=1e-3, t_end=10.0, stride=1000))
for t, u in zip(traj.times, traj.fields):
    err = G.sobolev_norm(u - steady, 1.0)
    print(f"  t = {t:5.1f}   ||u - F||_H1 = {err:.3e}")
