"""Shared fixtures and FFT-free field builders for the test suite.

The builders here synthesize band-limited fields directly from cosines so
that test inputs never depend on the transform code under test.
"""

from __future__ import annotations

import numpy as np
import pytest

from oseenlab.fields import GridSpec, ScalarField, VectorField


def trig_values(grid: GridSpec, seed: int, max_mode: int = 3, terms: int = 12) -> np.ndarray:
    """Random band-limited scalar samples built from explicit cosines."""
    rng = np.random.default_rng(seed)
    coords = grid.coordinates()
    scale = grid.half_period
    values = np.zeros(grid.shape)
    for _ in range(terms):
        modes = rng.integers(-max_mode, max_mode + 1, size=grid.dim)
        amplitude = rng.normal()
        phase = rng.uniform(0.0, 2.0 * np.pi)
        arg = np.zeros(grid.shape)
        for axis in range(grid.dim):
            arg = arg + (modes[axis] / scale) * coords[axis]
        values = values + amplitude * np.cos(arg + phase)
    return values


def trig_scalar(grid: GridSpec, seed: int, max_mode: int = 3, terms: int = 12) -> ScalarField:
    return ScalarField(grid, trig_values(grid, seed, max_mode, terms))


def trig_vector(grid: GridSpec, seed: int, max_mode: int = 3, terms: int = 12) -> VectorField:
    values = np.stack(
        [trig_values(grid, seed + 101 * c, max_mode, terms) for c in range(grid.dim)]
    )
    return VectorField(grid, values)


@pytest.fixture
def grid2() -> GridSpec:
    return GridSpec(2, np.pi, 32)


@pytest.fixture
def grid3() -> GridSpec:
    return GridSpec(3, np.pi, 16)
