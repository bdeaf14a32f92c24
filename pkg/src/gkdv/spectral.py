"""Fourier-side representation of mean-zero real functions on the 2*pi torus.

Convention: u(x) = sum_{|k| <= N} c[k] e^{ikx} with c[k] = (1/2pi) * int u e^{-ikx} dx,
so coefficient sequences convolve with no extra 2*pi factors.  Sobolev norms are
computed directly on coefficients with the weight <k> = 1 + |k|; integral
functionals carry an explicit 2*pi (int_T h dx = 2*pi * h_hat[0]).  This split is
deliberate and is relied on throughout the package.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

TWO_PI = 2.0 * np.pi

__all__ = [
    "TWO_PI",
    "Grid",
    "SpectralField",
    "PaddingError",
    "good_fft_size",
    "to_physical",
    "to_spectral",
    "dealiased_product",
    "apply_multiplier",
    "sobolev_norm",
    "airy_propagator",
    "mean_of_power",
    "integral_of_power",
    "regrid",
    "rough_field",
    "random_field",
]


class PaddingError(ValueError):
    """Grid has too few physical samples for an alias-free operation."""


def good_fft_size(m: int) -> int:
    """Smallest even 5-smooth integer >= m (fast FFT length)."""
    m = max(int(m), 4)
    if m % 2:
        m += 1
    while True:
        r = m
        for p in (2, 3, 5):
            while r % p == 0:
                r //= p
        if r == 1:
            return m
        m += 2


class Grid:
    """Fourier modes |k| <= N plus M uniform physical samples on [0, 2pi).

    M controls dealiasing headroom: a degree-d pointwise product is alias-free
    on the retained band iff M >= (d+1)*N + 1 (see ``required_samples``).
    """

    __slots__ = ("N", "M")

    def __init__(self, N: int, M: int | None = None):
        N = int(N)
        if N < 1:
            raise ValueError(f"need N >= 1, got N={N}")
        if M is None:
            M = good_fft_size(2 * N + 2)
        M = int(M)
        if M < 2 * N + 2:
            raise ValueError(f"need M >= 2N+2 = {2 * N + 2}, got M={M}")
        self.N = N
        self.M = M

    @classmethod
    def for_degree(cls, N: int, degree: int) -> "Grid":
        """Grid sized so products up to the given degree are alias-free."""
        degree = max(int(degree), 1)
        return cls(N, good_fft_size(max((degree + 1) * N + 1, 2 * N + 2)))

    def required_samples(self, degree: int) -> int:
        """Sample count needed for an alias-free degree-d product on the band.

        The product of d band-limited fields has modes up to d*N; sampling on M
        points folds mode k-M onto k, which touches the retained band |k| <= N
        unless M - N > d*N.  Hence the strict bound M >= (d+1)*N + 1.
        """
        return (degree + 1) * self.N + 1

    def points(self) -> np.ndarray:
        return np.arange(self.M) * (TWO_PI / self.M)

    def wavenumbers(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, Grid) and self.N == other.N and self.M == other.M

    def __hash__(self) -> int:
        return hash((self.N, self.M))

    def __repr__(self) -> str:
        return f"Grid(N={self.N}, M={self.M})"


class SpectralField:
    """Immutable coefficient vector of a real mean-zero function on the torus.

    ``coeffs[i]`` holds the mode k = i - N for k = -N..N.  Construction checks
    Hermitian symmetry (realness) and a vanishing zero mode, then canonicalizes
    both exactly.
    """

    __slots__ = ("grid", "coeffs")

    def __init__(self, coeffs, grid: Grid, _checked: bool = False):
        arr = np.asarray(coeffs, dtype=np.complex128)
        if arr.shape != (2 * grid.N + 1,):
            raise ValueError(
                f"expected {2 * grid.N + 1} coefficients for N={grid.N}, got shape {arr.shape}"
            )
        if not _checked:
            if not np.isfinite(arr).all():
                raise ValueError("non-finite coefficients")
            scale = float(np.max(np.abs(arr), initial=0.0))
            tol = 1e-8 * max(scale, 1.0)
            mirrored = np.conj(arr[::-1])
            if float(np.max(np.abs(arr - mirrored), initial=0.0)) > tol:
                raise ValueError("coefficients are not Hermitian-symmetric (field must be real)")
            if abs(arr[grid.N]) > tol:
                raise ValueError(f"zero mode must vanish (mean-zero field), got {arr[grid.N]}")
            arr = 0.5 * (arr + mirrored)
            arr[grid.N] = 0.0
        if arr is coeffs or (hasattr(coeffs, "base") and arr.base is not None):
            arr = arr.copy()
        arr.flags.writeable = False
        self.grid = grid
        self.coeffs = arr

    # -- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, grid: Grid) -> "SpectralField":
        return cls(np.zeros(2 * grid.N + 1, dtype=np.complex128), grid, _checked=True)

    @classmethod
    def from_modes(cls, grid: Grid, modes: Mapping[int, complex]) -> "SpectralField":
        """Build from {k: c_k} for k > 0; negative modes filled by conjugation."""
        arr = np.zeros(2 * grid.N + 1, dtype=np.complex128)
        for k, v in modes.items():
            k = int(k)
            if not 1 <= k <= grid.N:
                raise ValueError(f"mode {k} outside 1..{grid.N}")
            arr[grid.N + k] = v
            arr[grid.N - k] = np.conj(v)
        return cls(arr, grid, _checked=True)

    @classmethod
    def from_half(cls, half, grid: Grid) -> "SpectralField":
        """Build from the k = 0..N half-spectrum (k=0 entry is dropped)."""
        half = np.asarray(half, dtype=np.complex128)
        if half.shape != (grid.N + 1,):
            raise ValueError(f"expected {grid.N + 1} half-spectrum entries, got {half.shape}")
        if not np.isfinite(half).all():
            raise ValueError("non-finite coefficients")
        full = np.concatenate([np.conj(half[:0:-1]), half])
        full[grid.N] = 0.0
        return cls(full, grid, _checked=True)

    # -- accessors ----------------------------------------------------------

    def coeff(self, k: int) -> complex:
        if abs(k) > self.grid.N:
            raise ValueError(f"|k| must be <= {self.grid.N}")
        return complex(self.coeffs[self.grid.N + k])

    def half(self) -> np.ndarray:
        """Read-only view of modes k = 0..N."""
        return self.coeffs[self.grid.N :]

    # -- arithmetic (same grid, real scalars) -------------------------------

    def _binop(self, other: "SpectralField", op) -> "SpectralField":
        if not isinstance(other, SpectralField):
            return NotImplemented
        if self.grid != other.grid:
            raise ValueError(f"grid mismatch: {self.grid} vs {other.grid}")
        return SpectralField(op(self.coeffs, other.coeffs), self.grid, _checked=True)

    def __add__(self, other):
        return self._binop(other, np.add)

    def __sub__(self, other):
        return self._binop(other, np.subtract)

    def __mul__(self, a):
        if not np.isrealobj(np.asarray(a)) or np.ndim(a) != 0:
            raise TypeError("only real scalar multiplication preserves realness")
        return SpectralField(self.coeffs * float(a), self.grid, _checked=True)

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(-self.coeffs, self.grid, _checked=True)

    def __repr__(self) -> str:
        return f"SpectralField(N={self.grid.N}, max|c|={np.max(np.abs(self.coeffs)):.3e})"


# -- transforms -------------------------------------------------------------


def to_physical(field: SpectralField, samples: int | None = None) -> np.ndarray:
    """Evaluate on the uniform physical grid (default: the grid's M points)."""
    n = field.grid.M if samples is None else int(samples)
    if n < 2 * field.grid.N + 1:
        raise ValueError(f"need at least {2 * field.grid.N + 1} samples, got {n}")
    return np.fft.irfft(field.half(), n=n) * n


def to_spectral(samples, grid: Grid) -> SpectralField:
    """Project M real samples onto modes |k| <= N; the mean is dropped."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.shape != (grid.M,):
        raise ValueError(f"expected {grid.M} samples for this grid, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("non-finite samples")
    half = np.fft.rfft(arr)[: grid.N + 1] / grid.M
    return SpectralField.from_half(half, grid)


def dealiased_product(fields: Sequence[SpectralField], grid: Grid | None = None) -> SpectralField:
    """Pointwise product of the fields, truncated to the band and mean-projected.

    With enough padding this equals the exact truncated convolution of the
    coefficient sequences (no aliasing on |k| <= N).
    """
    fields = list(fields)
    if not fields:
        raise ValueError("need at least one field")
    grid = grid or fields[0].grid
    for f in fields:
        if f.grid != grid:
            raise ValueError(f"grid mismatch: {f.grid} vs {grid}")
    d = len(fields)
    req = grid.required_samples(d)
    if grid.M < req:
        raise PaddingError(
            f"degree-{d} product needs M >= {req} at N={grid.N}, grid has M={grid.M}"
        )
    prod = to_physical(fields[0])
    for f in fields[1:]:
        prod = prod * to_physical(f)
    return to_spectral(prod, grid)


def apply_multiplier(field: SpectralField, symbol: Callable[[np.ndarray], np.ndarray]) -> SpectralField:
    """Apply a Fourier multiplier; ``symbol`` maps the wavenumber array to values."""
    k = field.grid.wavenumbers()
    vals = np.asarray(symbol(k))
    if vals.shape != k.shape:
        vals = np.array([symbol(int(kk)) for kk in k])
    if not np.isfinite(vals).all():
        raise ValueError("multiplier produced non-finite values")
    return SpectralField(vals * field.coeffs, field.grid)


def sobolev_norm(field: SpectralField, s: float) -> float:
    """H^s norm (sum_k <k>^{2s} |c_k|^2)^{1/2} with <k> = 1 + |k|."""
    w = (1.0 + np.abs(field.grid.wavenumbers())) ** (2.0 * s)
    return float(np.sqrt(np.sum(w * np.abs(field.coeffs) ** 2)))


def airy_propagator(field: SpectralField, t: float, gamma: float = 0.0) -> SpectralField:
    """Damped Airy group: multiply mode k by exp((i k^3 - gamma) t)."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    k = field.grid.wavenumbers().astype(np.float64)
    mult = np.exp((1j * k**3 - gamma) * t)
    return SpectralField(mult * field.coeffs, field.grid, _checked=True)


def mean_of_power(field: SpectralField, p: int) -> float:
    """Exact zero mode of u^p, i.e. (1/2pi) int u^p dx, via alias-free sampling."""
    p = int(p)
    if p < 1:
        raise ValueError("power must be >= 1")
    if p == 1:
        return 0.0
    req = p * field.grid.N + 1
    if field.grid.M < req:
        raise PaddingError(
            f"zero mode of a degree-{p} power needs M >= {req}, grid has M={field.grid.M}"
        )
    return float(np.mean(to_physical(field) ** p))


def integral_of_power(field: SpectralField, p: int) -> float:
    """int_T u^p dx = 2*pi * zero mode of u^p."""
    return TWO_PI * mean_of_power(field, p)


def regrid(field: SpectralField, grid: Grid) -> SpectralField:
    """Re-home the coefficients on a grid with at least as many modes."""
    if grid.N < field.grid.N:
        raise ValueError(f"target N={grid.N} would drop modes (field has N={field.grid.N})")
    arr = np.zeros(2 * grid.N + 1, dtype=np.complex128)
    lo = grid.N - field.grid.N
    arr[lo : lo + 2 * field.grid.N + 1] = field.coeffs
    return SpectralField(arr, grid, _checked=True)


# -- random data ------------------------------------------------------------


def rough_field(grid: Grid, rng: np.random.Generator, exponent: float = -1.51,
                amplitude: float = 1.0) -> SpectralField:
    """|c_k| = amplitude * <k>^exponent with uniform random phases."""
    k = np.arange(1, grid.N + 1)
    mags = amplitude * (1.0 + k) ** exponent
    phases = rng.uniform(0.0, TWO_PI, size=grid.N)
    half = np.concatenate([[0.0], mags * np.exp(1j * phases)])
    return SpectralField.from_half(half, grid)


def random_field(grid: Grid, rng: np.random.Generator, exponent: float = -1.0,
                 amplitude: float = 1.0) -> SpectralField:
    """Complex-Gaussian modes damped by <k>^exponent; generic test data."""
    k = np.arange(1, grid.N + 1)
    z = rng.standard_normal(grid.N) + 1j * rng.standard_normal(grid.N)
    half = np.concatenate([[0.0], amplitude * (1.0 + k) ** exponent * z / np.sqrt(2.0)])
    return SpectralField.from_half(half, grid)
