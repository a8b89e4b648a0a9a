"""Shared fixtures for three-point energy tests.

Configurations come from the canonical generators (src/threepoint/construct.py),
so every test sees the same exact point sets.
"""

import math

import numpy as np
import pytest

from src.threepoint.construct import (
    gen_crosspolytope,
    gen_orthonormal_basis,
    gen_random,
    gen_simplex,
    gen_two_bases,
)
from src.threepoint.geometry import WeightedConfig


# =============================================================================
# Canonical configurations
# =============================================================================

@pytest.fixture
def onb3() -> WeightedConfig:
    """e_1, e_2, e_3 with weight 1/3 each."""
    return gen_orthonormal_basis(3)


@pytest.fixture
def cross3() -> WeightedConfig:
    """+-e_1, +-e_2, +-e_3 with weight 1/6 each."""
    return gen_crosspolytope(3)


@pytest.fixture
def simplex3() -> WeightedConfig:
    """Regular tetrahedron: 4 points on S^2, pairwise inner product -1/3."""
    return gen_simplex(3)


@pytest.fixture
def mercedes() -> WeightedConfig:
    """Three points at 120 degrees on S^1."""
    return gen_simplex(2)


@pytest.fixture
def two_bases() -> WeightedConfig:
    """Two planar bases 45 degrees apart, equal weight on each basis."""
    return gen_two_bases(math.pi / 4, 0.5)


@pytest.fixture
def random_config() -> WeightedConfig:
    """Ten uniform points on S^2 with Dirichlet weights."""
    return gen_random(3, 10, seed=11, random_weights=True)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)
