"""Gauge transform: a time-dependent spatial translation that absorbs the
rank-one resonant part of the nonlinearity.

The phase rate is theta'(t) = integral over the torus of g'(u(t)) dx, and the
transform multiplies mode k by e^{ik theta}, i.e. maps u(x) to u(x + theta).
Along a trajectory the gauged field satisfies the original equation with the
resonant term ik*u_k*theta' removed and the forcing translated by the same
phase; `modified_pde_residual` verifies that statement numerically.
"""

from __future__ import annotations

import numpy as np

from .nonlinearity import PolynomialNonlinearity
from .spectral import SpectralField, mean_of_power, sobolev_norm, TWO_PI, dealiased_product

__all__ = [
    "theta_rate",
    "apply_gauge",
    "ungauge_translate",
    "gauged_forcing",
    "exp_multiplier_identity_check",
    "modified_pde_residual",
]


def theta_rate(u: SpectralField, g: PolynomialNonlinearity) -> float:
    """Phase speed: integral of g'(u) dx = 2*pi * sum_j j*a_j * (u^{j-1})^hat_0.

    The j = 2 monomial contributes nothing for mean-zero u.
    """
    total = 0.0
    for j, a in g.items():
        if j == 2:
            continue  # 2*a*mean(u) = 0 exactly for mean-zero fields
        total += j * a * mean_of_power(u, j - 1)
    return TWO_PI * total


def apply_gauge(u: SpectralField, theta: float) -> SpectralField:
    """Multiply mode k by e^{ik theta}; equals the translate x -> x + theta."""
    k = u.grid.wavenumbers().astype(np.float64)
    return SpectralField(np.exp(1j * k * float(theta)) * u.coeffs, u.grid, _checked=True)


def ungauge_translate(u_gauged: SpectralField, theta: float) -> SpectralField:
    """Exact inverse of apply_gauge (multiplier e^{-ik theta})."""
    return apply_gauge(u_gauged, -float(theta))


def gauged_forcing(f: SpectralField, theta: float) -> SpectralField:
    """The forcing as seen in the gauged frame: same translation as the field."""
    return apply_gauge(f, theta)


def exp_multiplier_identity_check(u: SpectralField, theta: float, n: int) -> float:
    """Max coefficient deviation between (gauged u)^n and gauged (u^n).

    Translation commutes with taking powers, so this is an exact algebraic
    identity; the return value is pure floating-point noise (<= 1e-12 * scale).
    """
    n = int(n)
    if n < 1:
        raise ValueError("power must be >= 1")
    gu = apply_gauge(u, theta)
    lhs = dealiased_product([gu] * n)
    rhs = apply_gauge(dealiased_product([u] * n), theta)
    return float(np.max(np.abs(lhs.coeffs - rhs.coeffs), initial=0.0))


def modified_pde_residual(trajectory, indices=None) -> tuple[np.ndarray, np.ndarray]:
    """H^0 residual of the gauged equation at interior sample times.

    The gauged field w(t) = e^{ik theta(t)} u(t) satisfies
        w_t + w_xxx + gamma*w + R2[w] + NR[w] = gauged f,
    where R2 and NR are the resonance components of the derivative of g(w)
    (the rank-one resonant part R1 is cancelled by the phase).  w_t is formed
    by centered differences of the gauged snapshots, so the returned residual
    is O(h^2) in the sample spacing h plus integrator error.

    Returns (times, residuals) over interior samples (endpoints skipped).
    """
    from .resonance import decompose_r1_r2_nr

    if len(trajectory) < 3:
        raise ValueError("need at least 3 snapshots for centered differences")
    problem = trajectory.problem
    n_snap = len(trajectory)
    idx = range(1, n_snap - 1) if indices is None else indices
    h_t = trajectory.sample_spacing
    k = problem.grid.wavenumbers().astype(np.float64)
    lin_symbol = -1j * k**3 + problem.gamma  # w_xxx + gamma*w on the Fourier side
    times = []
    residuals = []
    for i in idx:
        if not 1 <= i <= n_snap - 2:
            raise ValueError(f"index {i} is not interior (1..{n_snap - 2})")
        dt_spacing = float(trajectory.times[i + 1] - trajectory.times[i - 1])
        if not np.isclose(dt_spacing, 2 * h_t, rtol=1e-9):
            raise ValueError("snapshots are not uniformly spaced")
        w_prev = trajectory.gauged(i - 1)
        w_mid = trajectory.gauged(i)
        w_next = trajectory.gauged(i + 1)
        ddt = (w_next.coeffs - w_prev.coeffs) / (2.0 * h_t)
        parts = decompose_r1_r2_nr(w_mid, problem.g)
        f_tilde = gauged_forcing(problem.f, float(trajectory.thetas[i]))
        res = (
            ddt
            + lin_symbol * w_mid.coeffs
            + parts["r2"].coeffs
            + parts["nr"].coeffs
            - f_tilde.coeffs
        )
        times.append(float(trajectory.times[i]))
        residuals.append(float(np.sqrt(np.sum(np.abs(res) ** 2))))
    return np.asarray(times), np.asarray(residuals)
