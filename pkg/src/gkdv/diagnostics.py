"""Conserved functionals, smoothing metrics, decay fitting, and studies.

All integrals are over the 2*pi torus; with the normalized-coefficient
convention the integral of u^p is 2*pi times the zero mode of u^p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import Problem, SolverConfig, Trajectory, simulate
from .gauge import apply_gauge
from .nonlinearity import PolynomialNonlinearity
from .spectral import (
    TWO_PI,
    Grid,
    SpectralField,
    airy_propagator,
    sobolev_norm,
)

__all__ = [
    "mass",
    "momentum",
    "energy",
    "smoothing_metric",
    "DecayFit",
    "decay_fit",
    "absorbing_entry",
    "StudyRow",
    "refinement_smoothing_study",
    "rough_coefficients",
]


def mass(u: SpectralField) -> float:
    """Integral of u: identically zero in the mean-zero representation."""
    _ = u.coeffs  # touch to validate the argument type
    return 0.0


def momentum(u: SpectralField) -> float:
    """Integral of u^2 = 2*pi * sum of |u_k|^2 (Parseval)."""
    return TWO_PI * float(np.sum(np.abs(u.coeffs) ** 2))


def energy(u: SpectralField, g: PolynomialNonlinearity) -> float:
    """E(u) = (1/2) * integral of u_x^2 - integral of G(u), G' = g, G(0) = 0.

    Both terms are exact on the dealiased grid: the first by Parseval, the
    second because the zero mode of u^p is alias-free given the headroom the
    degree of g requires.
    """
    k = u.grid.wavenumbers().astype(np.float64)
    gradient = 0.5 * TWO_PI * float(np.sum(k**2 * np.abs(u.coeffs) ** 2))
    potential = TWO_PI * g.antiderivative_mean(u)
    return gradient - potential


def smoothing_metric(trajectory: Trajectory, rho: float,
                     u0: SpectralField | None = None) -> np.ndarray:
    """Per-sample || gauged u(t) - damped free flow of u0 ||_{H^{1+rho}}.

    The free flow is the exact damped Airy propagator applied to the initial
    data, so for the unforced linear problem the metric is identically zero.
    """
    if u0 is None:
        u0 = trajectory.fields[0]
    gamma = trajectory.problem.gamma
    s = 1.0 + float(rho)
    out = np.empty(len(trajectory))
    for i in range(len(trajectory)):
        gauged = apply_gauge(trajectory.fields[i], float(trajectory.thetas[i]))
        free = airy_propagator(u0, float(trajectory.times[i]), gamma)
        out[i] = sobolev_norm(gauged - free, s)
    return out


@dataclass(frozen=True)
class DecayFit:
    """Least-squares exponential fit value ~ exp(intercept - rate * t)."""

    rate: float
    intercept: float
    rms_residual: float
    window: tuple  # (t_lo, t_hi) actually used
    n_points: int


def decay_fit(times: Sequence[float], values: Sequence[float],
              window: tuple | None = None) -> DecayFit:
    """Fit log(values) linearly in t on the window; rate is minus the slope."""
    t = np.asarray(times, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    if t.shape != v.shape or t.ndim != 1:
        raise ValueError("times and values must be 1-d arrays of equal length")
    if window is not None:
        lo, hi = float(window[0]), float(window[1])
        keep = (t >= lo) & (t <= hi)
        t, v = t[keep], v[keep]
    if len(t) < 2:
        raise ValueError("need at least 2 points in the fit window")
    if np.any(v <= 0.0):
        raise ValueError("decay fit requires positive values in the window")
    y = np.log(v)
    design = np.stack([t, np.ones_like(t)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - (slope * t + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    return DecayFit(rate=float(-slope), intercept=float(intercept), rms_residual=rms,
                    window=(float(t[0]), float(t[-1])), n_points=int(len(t)))


def absorbing_entry(trajectory: Trajectory, radius: float, s: float = 1.0):
    """First sample time after which ||u(t)||_{H^s} stays <= radius; else None."""
    norms = np.array([sobolev_norm(f, s) for f in trajectory.fields])
    inside = norms <= float(radius)
    if not inside[-1]:
        return None
    # last index where the trajectory is outside the ball, if any
    outside = np.nonzero(~inside)[0]
    first = 0 if len(outside) == 0 else int(outside[-1]) + 1
    return float(trajectory.times[first])


# --------------------------------------------------------------------------
# Refinement study
# --------------------------------------------------------------------------


def rough_coefficients(n_max: int, rng: np.random.Generator,
                       exponent: float = -1.51, amplitude: float = 1.0) -> np.ndarray:
    """Positive-mode coefficients |c_k| = amplitude*(1+k)^exponent, random phases.

    Returns c_1..c_{n_max}; drawing once at the largest resolution and
    truncating gives nested initial data across refinement levels.
    """
    k = np.arange(1, n_max + 1, dtype=np.float64)
    phases = rng.uniform(0.0, TWO_PI, size=n_max)
    return amplitude * (1.0 + k) ** exponent * np.exp(1j * phases)


@dataclass(frozen=True)
class StudyRow:
    N: int
    data_norm: float  # ||u0||_{H^{1+rho}}
    sup_metric: float  # sup over samples of the smoothing metric
    status: str  # "completed" | "aborted"


def refinement_smoothing_study(
    g: PolynomialNonlinearity,
    gamma: float,
    forcing_modes: dict,
    N_list: Sequence[int],
    rho: float,
    dt: float,
    t_end: float,
    seed_rng: np.random.Generator,
    stride: int = 10,
    exponent: float = -1.51,
    amplitude: float = 1.0,
    blowup_cap: float = 1e6,
) -> list:
    """Run the same problem at each N with nested rough data; report per-N
    data roughness (H^{1+rho} norm) and the sup of the smoothing metric.

    forcing_modes maps positive wavenumbers to complex coefficients (the
    negative modes follow by symmetry).  Phases are drawn once at max(N) and
    truncated per N so the initial data refine consistently.
    """
    N_list = [int(N) for N in N_list]
    if any(N < 1 for N in N_list):
        raise ValueError("resolutions must be positive")
    n_max = max(N_list)
    coeffs = rough_coefficients(n_max, seed_rng, exponent=exponent, amplitude=amplitude)
    rows = []
    for N in N_list:
        grid = Grid.for_degree(N, max(g.max_degree, 1))
        f = SpectralField.from_modes(grid, forcing_modes) if forcing_modes else None
        u0 = SpectralField.from_modes(grid, {k: coeffs[k - 1] for k in range(1, N + 1)})
        problem = Problem(g=g, gamma=gamma, f=f, grid=grid)
        config = SolverConfig(dt=dt, t_end=t_end, stride=stride, blowup_cap=blowup_cap)
        traj = simulate(problem, u0, config)
        metric = smoothing_metric(traj, rho)
        rows.append(StudyRow(
            N=N,
            data_norm=sobolev_norm(u0, 1.0 + rho),
            sup_metric=float(np.max(metric)),
            status="completed" if traj.completed else "aborted",
        ))
    return rows
