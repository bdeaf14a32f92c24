"""Shared fixtures: small grids and seeded random fields."""

from __future__ import annotations

import numpy as np
import pytest

from gkdv import Grid, PolynomialNonlinearity, SpectralField, splitmix64_stream


def rng_for(master: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(splitmix64_stream(master, index)))


def random_small_field(grid: Grid, rng: np.random.Generator, amplitude: float = 1.0) -> SpectralField:
    """Full-support random field with O(amplitude) coefficients."""
    n = grid.N
    half = amplitude * (rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1))
    half[0] = 0.0
    return SpectralField.from_half(half, grid)


@pytest.fixture
def rng():
    return rng_for(7, 0)


@pytest.fixture
def grid8():
    return Grid.for_degree(8, 3)


@pytest.fixture
def grid12():
    return Grid.for_degree(12, 5)


@pytest.fixture
def cubic():
    return PolynomialNonlinearity.single(3, 1.0)


@pytest.fixture
def quadratic():
    return PolynomialNonlinearity.single(2, 1.0)
