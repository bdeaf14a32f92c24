"""Time integration of u_t + u_xxx + gamma*u + (g(u))_x = f on the torus.

The linear symbol i*k^3 - gamma is stiff (k^3 growth), so steps use an
integrating-factor RK4: the linear flow is applied exactly through
exp((i*k^3 - gamma)*dt) and only the nonlinear term is advanced by RK4.
The scheme is therefore exact on the purely linear problem.

The gauge phase theta, with rate theta'(t) = integral of g'(u) dx, is
advanced inside the same RK stages (classical RK4 weights on the rates
evaluated at the stage states), keeping phase accuracy at scheme order.

State lives on the half-spectrum k = 0..N during stepping (the field is
real, so negative modes are conjugates); full coefficient vectors are
materialized only at observation times.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .nonlinearity import PolynomialNonlinearity
from .spectral import TWO_PI, Grid, SpectralField, airy_propagator, sobolev_norm

__all__ = [
    "Problem",
    "SolverConfig",
    "Trajectory",
    "BlowUpError",
    "nonlinear_rhs",
    "full_rhs",
    "ifrk4_step",
    "simulate",
    "steady_state_linear",
]


class BlowUpError(RuntimeError):
    """State became non-finite or exceeded the norm cap during stepping."""

    def __init__(self, step: int, t: float, norm: float):
        super().__init__(f"solution blew up at step {step} (t={t:.6g}, H1 norm {norm:.3g})")
        self.step = step
        self.t = t
        self.norm = norm


class Problem:
    """The damped, forced flow: nonlinearity g, damping gamma >= 0, forcing f, grid."""

    __slots__ = ("g", "gamma", "f", "grid")

    def __init__(self, g: PolynomialNonlinearity, gamma: float, f: SpectralField | None,
                 grid: Grid):
        gamma = float(gamma)
        if not np.isfinite(gamma) or gamma < 0:
            raise ValueError(f"gamma must be finite and nonnegative, got {gamma}")
        if f is None:
            f = SpectralField.zeros(grid)
        if f.grid != grid:
            raise ValueError(f"forcing grid {f.grid} does not match problem grid {grid}")
        req = g.required_samples(grid)
        if grid.M < req:
            raise ValueError(
                f"grid M={grid.M} lacks dealiasing headroom for degree {g.max_degree}: "
                f"need M >= {req} at N={grid.N}"
            )
        self.g = g
        self.gamma = gamma
        self.f = f
        self.grid = grid

    def __repr__(self) -> str:
        return f"Problem(g={self.g!r}, gamma={self.gamma}, grid={self.grid!r})"


@dataclass(frozen=True)
class SolverConfig:
    """Fixed-step integration plan; stride controls observation spacing."""

    dt: float
    t_end: float
    stride: int = 1
    blowup_cap: float = 1e6
    check_stride: int = 25  # steps between finiteness/cap checks

    def __post_init__(self):
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise ValueError("dt must be positive and finite")
        if not (self.t_end > 0 and np.isfinite(self.t_end)):
            raise ValueError("t_end must be positive and finite")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.blowup_cap <= 0:
            raise ValueError("blowup_cap must be positive")

    @property
    def n_steps(self) -> int:
        n = int(round(self.t_end / self.dt))
        return max(n, 1)


@dataclass
class Trajectory:
    """Sampled solution: times, fields, gauge phases, plus completion status."""

    times: np.ndarray
    fields: list  # list[SpectralField]
    thetas: np.ndarray
    problem: Problem
    config: SolverConfig
    completed: bool = True
    abort: dict | None = None

    def __len__(self) -> int:
        return len(self.fields)

    @property
    def sample_spacing(self) -> float:
        return self.config.stride * self.config.dt

    def gauged(self, i: int) -> SpectralField:
        """Snapshot i with the accumulated phase applied: e^{ik theta} u_k."""
        from .gauge import apply_gauge

        return apply_gauge(self.fields[i], float(self.thetas[i]))


class _StepKernel:
    """Precomputed half-spectrum stage data for a fixed (problem, dt)."""

    __slots__ = ("N", "M", "E", "E2", "dx", "fhat", "monomials", "dt", "has_f")

    def __init__(self, problem: Problem, dt: float):
        grid = problem.grid
        self.N = grid.N
        self.M = grid.M
        k = np.arange(self.N + 1, dtype=np.float64)
        lam = 1j * k**3 - problem.gamma
        self.E = np.exp(lam * dt)
        self.E2 = np.exp(lam * (0.5 * dt))
        self.dx = 1j * k
        fh = problem.f.half().astype(np.complex128)
        self.has_f = bool(np.any(fh))
        self.fhat = fh
        self.monomials = problem.g.items()
        self.dt = dt

    def rates(self, h: np.ndarray) -> tuple[np.ndarray, float]:
        """Nonlinear tendency -ik*g(u)^hat + f_hat and the gauge rate, from half-spectrum h."""
        if not self.monomials:
            return (self.fhat if self.has_f else np.zeros_like(h)), 0.0
        s = np.fft.irfft(h, self.M)
        s *= self.M
        gs = None
        rate = 0.0
        power = s  # s**(j-1) tracker via incremental multiplies
        prev = 1
        for j, a in self.monomials:
            for _ in range(j - 1 - prev):
                power = power * s
            prev = j - 1
            rate += j * a * float(power.mean())
            term = power * s
            gs = a * term if gs is None else gs + a * term
        gh = np.fft.rfft(gs)[: self.N + 1]
        gh *= 1.0 / self.M
        nl = -self.dx * gh
        if self.has_f:
            nl += self.fhat
        return nl, TWO_PI * rate

    def step(self, h: np.ndarray, theta: float) -> tuple[np.ndarray, float]:
        dt = self.dt
        a1, r1 = self.rates(h)
        u2 = self.E2 * (h + (0.5 * dt) * a1)
        a2, r2 = self.rates(u2)
        eh = self.E2 * h
        u3 = eh + (0.5 * dt) * a2
        a3, r3 = self.rates(u3)
        u4 = self.E2 * (eh + dt * a3)
        a4, r4 = self.rates(u4)
        h_new = self.E2 * eh + (dt / 6.0) * (self.E * a1 + 2.0 * self.E2 * (a2 + a3) + a4)
        theta_new = theta + (dt / 6.0) * (r1 + 2.0 * (r2 + r3) + r4)
        return h_new, theta_new


def nonlinear_rhs(u: SpectralField, g: PolynomialNonlinearity) -> SpectralField:
    """-d/dx of g(u), dealiased: coefficients -ik * (g(u))^hat_k."""
    gu = g.apply(u)
    k = u.grid.wavenumbers().astype(np.float64)
    return SpectralField(-1j * k * gu.coeffs, u.grid, _checked=True)


def full_rhs(u: SpectralField, problem: Problem, t: float = 0.0) -> SpectralField:
    """du/dt in spectral form: (ik^3 - gamma) u_k - ik (g(u))^hat_k + f_k."""
    if u.grid != problem.grid:
        raise ValueError("field grid does not match problem grid")
    k = u.grid.wavenumbers().astype(np.float64)
    lin = (1j * k**3 - problem.gamma) * u.coeffs
    nl = nonlinear_rhs(u, problem.g)
    return SpectralField(lin + nl.coeffs + problem.f.coeffs, u.grid, _checked=True)


def ifrk4_step(u: SpectralField, problem: Problem, t: float = 0.0,
               dt: float = 1e-4) -> SpectralField:
    """One integrating-factor RK4 step (the flow is autonomous; t is informational)."""
    if u.grid != problem.grid:
        raise ValueError("field grid does not match problem grid")
    if dt == 0:
        return u
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    kern = _StepKernel(problem, dt)
    h, _ = kern.step(u.half().astype(np.complex128), 0.0)
    if not np.isfinite(h).all():
        raise BlowUpError(0, t, float("inf"))
    return SpectralField.from_half(h, u.grid)


def _half_h1_norm_sq(h: np.ndarray) -> float:
    k = np.arange(len(h))
    w = (1.0 + k) ** 2
    return 2.0 * float(np.sum(w * (h.real**2 + h.imag**2)))


def simulate(problem: Problem, u0: SpectralField, config: SolverConfig,
             observers: Sequence[Callable[[float, SpectralField, float], None]] = ()) -> Trajectory:
    """Fixed-step IFRK4 integration with co-integrated gauge phase.

    Snapshots (and observer calls) happen at step 0 and every `stride` steps
    thereafter, plus the final step.  On blow-up the partial trajectory is
    returned with completed=False and an abort record.
    """
    if u0.grid != problem.grid:
        raise ValueError("initial data grid does not match problem grid")
    kern = _StepKernel(problem, config.dt)
    h = u0.half().astype(np.complex128).copy()
    theta = 0.0
    n_steps = config.n_steps
    times: list[float] = []
    fields: list[SpectralField] = []
    thetas: list[float] = []
    abort = None

    def record(i: int):
        t = i * config.dt
        fld = SpectralField.from_half(h, problem.grid)
        times.append(t)
        fields.append(fld)
        thetas.append(theta)
        for obs in observers:
            obs(t, fld, theta)

    record(0)
    cap_sq = config.blowup_cap**2
    stride = config.stride
    check_stride = config.check_stride
    dt = config.dt
    for i in range(1, n_steps + 1):
        h, theta = kern.step(h, theta)
        recording = i % stride == 0 or i == n_steps
        if recording or i % check_stride == 0:
            if not np.isfinite(h).all() or _half_h1_norm_sq(h) > cap_sq:
                nrm = float(np.sqrt(_half_h1_norm_sq(h))) if np.isfinite(h).all() else float("inf")
                abort = {"step": i, "t": i * dt, "h1_norm": nrm}
                break
        if recording:
            record(i)

    return Trajectory(
        times=np.asarray(times),
        fields=fields,
        thetas=np.asarray(thetas),
        problem=problem,
        config=config,
        completed=abort is None,
        abort=abort,
    )


def steady_state_linear(f: SpectralField, gamma: float) -> SpectralField:
    """Equilibrium of the linear flow: F_k = f_k / (gamma - i k^3) (F_0 = 0)."""
    gamma = float(gamma)
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    k = f.grid.wavenumbers().astype(np.float64)
    denom = gamma - 1j * k**3
    safe = np.where(denom == 0, 1.0, denom)
    out = np.where(denom == 0, 0.0, f.coeffs / safe)
    return SpectralField(out, f.grid, _checked=True)
