"""Canonical configurations and the isotropic lifting S^{d-1} -> S^d.

Generators build exact point sets (orthonormal basis, crosspolytope,
regular simplex, two rotated planar bases) plus random starts. The lift

    f(x) = sqrt(d/(d+1)) x + z / sqrt(d+1)

sends a balanced isotropic measure on S^{d-1} to an isotropic measure on S^d,
and isotropic-but-unbalanced measures to non-isotropic ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from src.threepoint.data import INNER_PRODUCT_SLACK
from src.threepoint.errors import ConfigError, DomainError
from src.threepoint.geometry import WeightedConfig


# =============================================================================
# LIFTING
# =============================================================================

@dataclass(frozen=True, eq=False)
class LiftSpec:
    """Source configuration on S^{d-1} and the pole z in S^d.

    The source occupies the first d coordinates of R^{d+1}. The pole defaults
    to the last coordinate axis and must be a unit vector orthogonal to every
    embedded source point.

    Raises:
        ConfigError: pole of the wrong length, not unit, or not orthogonal
    """

    source: WeightedConfig
    pole: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        d = self.source.dim
        if self.pole is None:
            pole = np.zeros(d + 1)
            pole[d] = 1.0
        else:
            pole = np.array(self.pole, dtype=np.float64, copy=True).reshape(-1)
        if pole.shape[0] != d + 1:
            raise ConfigError(f"pole must have {d + 1} coordinates, got {pole.shape[0]}")
        if abs(float(np.linalg.norm(pole)) - 1.0) > 1e-12:
            raise ConfigError("pole must be a unit vector")
        leakage = float(np.max(np.abs(self.source.points @ pole[:d])))
        if leakage > 1e-12:
            raise ConfigError(
                f"pole is not orthogonal to the embedded source (max |<x, z>| = {leakage:.3g})"
            )
        pole.flags.writeable = False
        object.__setattr__(self, "pole", pole)


def lift(spec: LiftSpec) -> WeightedConfig:
    """Map every source point through f; weights are unchanged.

    f(x) = sqrt(d/(d+1)) (x, 0) + z/sqrt(d+1), z the pole of `spec`.

    Args:
        spec: source configuration on S^{d-1} and a validated pole

    Returns:
        the lifted configuration on S^d

    Example:
        >>> lifted = lift(LiftSpec(gen_simplex(2)))   # 3 points at 120 degrees
        >>> np.round(lifted.points @ lifted.points.T, 12)   # orthonormal basis
    """
    src = spec.source
    d = src.dim
    assert spec.pole is not None
    embedded = np.hstack([src.points, np.zeros((src.n_points, 1))])
    points = math.sqrt(d / (d + 1)) * embedded + spec.pole[None, :] / math.sqrt(d + 1)
    return WeightedConfig(points, src.weights)


def inner_product_transport(d: int, s: float) -> float:
    """<f(x), f(y)> in terms of s = <x, y> for the lift from S^{d-1}.

    So <x, y> >= -1/d on S^{d-1} corresponds to <f(x), f(y)> >= 0.
    """
    return (d / (d + 1)) * s + 1.0 / (d + 1)


# =============================================================================
# GENERATORS
# =============================================================================

def _check_dim(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {d!r}")


def gen_orthonormal_basis(d: int) -> WeightedConfig:
    """e_1, ..., e_d with weight 1/d each."""
    _check_dim(d)
    return WeightedConfig(np.eye(d))


def gen_crosspolytope(d: int) -> WeightedConfig:
    """e_1, ..., e_d, -e_1, ..., -e_d with weight 1/(2d) each."""
    _check_dim(d)
    return WeightedConfig(np.vstack([np.eye(d), -np.eye(d)]))


def helmert_basis(d: int) -> np.ndarray:
    """d x (d+1) matrix whose rows are an orthonormal basis of the complement of (1, ..., 1).

    Row k (1-based) is (1, ..., 1, -k, 0, ..., 0) / sqrt(k(k+1)) with k ones.
    """
    rows = np.zeros((d, d + 1))
    for k in range(1, d + 1):
        rows[k - 1, :k] = 1.0
        rows[k - 1, k] = -float(k)
        rows[k - 1] /= math.sqrt(k * (k + 1))
    return rows


def gen_simplex(d: int) -> WeightedConfig:
    """Regular simplex: d+1 points in S^{d-1}, pairwise inner product -1/d.

    The centered standard simplex e_i - (1/(d+1)) 1 in R^{d+1}, written in
    the Helmert basis of the hyperplane it spans and scaled to unit length.

    Example:
        >>> gen_simplex(2).points.round(6)
        array([[ 0.866025,  0.5     ],
               [-0.866025,  0.5     ],
               [ 0.      , -1.      ]])
    """
    _check_dim(d)
    points = math.sqrt((d + 1) / d) * helmert_basis(d).T
    return WeightedConfig(points)


def gen_two_bases(theta: float, lam: float) -> WeightedConfig:
    """Two orthonormal bases of the plane, the second rotated by theta.

    Points (1, 0), (0, 1), (cos theta, sin theta), (-sin theta, cos theta)
    with weights (lam/2, lam/2, (1-lam)/2, (1-lam)/2).

    Raises:
        DomainError: theta outside [0, pi/2] or lam outside [0, 1]
    """
    if not 0.0 <= theta <= math.pi / 2 + INNER_PRODUCT_SLACK:
        raise DomainError(f"theta must lie in [0, pi/2], got {theta}")
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    c, s = math.cos(theta), math.sin(theta)
    points = np.array([[1.0, 0.0], [0.0, 1.0], [c, s], [-s, c]])
    weights = np.array([lam / 2, lam / 2, (1 - lam) / 2, (1 - lam) / 2])
    return WeightedConfig(points, weights)


def gen_random(d: int, n: int, seed: int, random_weights: bool = False) -> WeightedConfig:
    """n i.i.d. uniform points on S^{d-1}; Dirichlet(1, ..., 1) weights if requested."""
    _check_dim(d)
    if n < 1:
        raise DomainError(f"need at least one point, got {n}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, d))
    points = g / np.linalg.norm(g, axis=1, keepdims=True)
    weights = rng.dirichlet(np.ones(n)) if random_weights else None
    return WeightedConfig(points, weights)


# Shape names accepted by the `gen` subcommand; two-bases and random take
# extra parameters and are dispatched separately.
SHAPES: Dict[str, Callable[[int], WeightedConfig]] = {
    "onb": gen_orthonormal_basis,
    "cross": gen_crosspolytope,
    "simplex": gen_simplex,
}
