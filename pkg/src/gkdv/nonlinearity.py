"""Polynomial nonlinearities g(u) = sum_j a_j u^j with integer degrees j >= 2.

The constant and linear terms are excluded by design: a constant shifts the
forcing and a linear term amounts to a Galilean change of frame, so neither
adds dynamics.  An empty coefficient set is the zero polynomial (g == 0),
which the solvers accept (pure linear problems).
"""

from __future__ import annotations

from typing import Iterator, Mapping, Tuple

import numpy as np

from .spectral import Grid, PaddingError, SpectralField, to_physical, to_spectral

__all__ = ["PolynomialNonlinearity"]


class PolynomialNonlinearity:
    """Immutable map degree -> real coefficient, degrees >= 2."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, float] | None = None):
        items = {}
        for j, a in (coeffs or {}).items():
            j = int(j)
            if j < 2:
                raise ValueError(f"degrees must be >= 2 (no constant/linear term), got {j}")
            a = float(a)
            if not np.isfinite(a):
                raise ValueError(f"non-finite coefficient for degree {j}")
            if a != 0.0:
                items[j] = a
        self._coeffs = tuple(sorted(items.items()))

    @classmethod
    def single(cls, degree: int, coeff: float = 1.0) -> "PolynomialNonlinearity":
        return cls({degree: coeff})

    # -- introspection -------------------------------------------------------

    def items(self) -> Tuple[Tuple[int, float], ...]:
        """Sorted (degree, coefficient) pairs with nonzero coefficients."""
        return self._coeffs

    def __iter__(self) -> Iterator[Tuple[int, float]]:
        return iter(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def coeff(self, j: int) -> float:
        for d, a in self._coeffs:
            if d == j:
                return a
        return 0.0

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(d for d, _ in self._coeffs)

    @property
    def max_degree(self) -> int:
        """Highest degree present; 1 for the zero polynomial (linear headroom)."""
        return self._coeffs[-1][0] if self._coeffs else 1

    def required_samples(self, grid: Grid) -> int:
        """Physical samples needed for alias-free g(u) products on this grid."""
        return grid.required_samples(max(self.max_degree, 1))

    # -- evaluation ----------------------------------------------------------

    def evaluate_samples(self, samples: np.ndarray) -> np.ndarray:
        """g at physical sample values (plain pointwise polynomial)."""
        out = np.zeros_like(samples)
        for j, a in self._coeffs:
            out += a * samples**j
        return out

    def apply(self, u: SpectralField) -> SpectralField:
        """Band truncation of g(u), alias-free, mean projected away."""
        grid = u.grid
        req = self.required_samples(grid)
        if grid.M < req:
            raise PaddingError(
                f"g of degree {self.max_degree} needs M >= {req} at N={grid.N}, grid has M={grid.M}"
            )
        if not self._coeffs:
            return SpectralField.zeros(grid)
        s = to_physical(u)
        gs = np.zeros_like(s)
        for j, a in self._coeffs:
            gs += a * s**j
        return to_spectral(gs, grid)

    def antiderivative_mean(self, u: SpectralField) -> float:
        """Zero mode of G(u) where G' = g, G(0) = 0 (exact, alias-free)."""
        total = 0.0
        if not self._coeffs:
            return total
        grid = u.grid
        # mean of u^p is alias-free iff M >= p*N + 1; binding power is max_degree + 1
        req = (self.max_degree + 1) * grid.N + 1
        if grid.M < req:
            raise PaddingError(
                f"mean of G(u) (degree {self.max_degree + 1}) needs M >= {req}, grid has M={grid.M}"
            )
        s = to_physical(u)
        for j, a in self._coeffs:
            total += a / (j + 1) * float(np.mean(s ** (j + 1)))
        return total

    def __repr__(self) -> str:
        if not self._coeffs:
            return "PolynomialNonlinearity(0)"
        terms = " + ".join(f"{a:g}*u^{j}" for j, a in self._coeffs)
        return f"PolynomialNonlinearity({terms})"
