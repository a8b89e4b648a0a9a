"""Point configurations on the unit sphere S^{d-1}.

A configuration is a discrete probability measure: N unit vectors with
nonnegative weights summing to 1. Uniform weights 1/N encode a plain point
set. Configurations are immutable once built, so verifiers can share them.

Also houses the spherical metric diagnostics used around the non-obtuse
and diameter results: spherical diameter, the smallest enclosing cap and
the circumradius of a regular spherical simplex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.threepoint.data import (
    CAP_CENTER_MIN_NORM,
    DUPLICATE_TOL,
    INNER_PRODUCT_SLACK,
    NORMALIZATION_TOL,
    OFF_SPHERE_TOL,
    SUPPORT_WEIGHT_EPS,
    WEIGHT_SUM_TOL,
)
from src.threepoint.errors import ConfigError, DimensionMismatchError, DomainError, NoCapError

UnitVector = np.ndarray


# =============================================================================
# DATA TYPES
# =============================================================================

@dataclass(frozen=True)
class GramTriple:
    """Pairwise inner products of a point triple (x, y, z).

    Attributes:
        u: <y, z>
        v: <x, z>
        t: <x, y>
    """

    u: float
    v: float
    t: float

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.u, self.v, self.t)

    @property
    def product(self) -> float:
        """uvt = <x,y><x,z><y,z>."""
        return self.u * self.v * self.t


@dataclass(frozen=True, eq=False)
class WeightedConfig:
    """Discrete probability measure on S^{d-1}.

    Points are stored row-wise in an (N, d) read-only array. Construction
    renormalizes points whose norm is off by more than 1e-9 (but at most
    1e-6) and weights whose sum is off by more than 1e-12 (but at most 1e-6).
    Anything further off is rejected with ConfigError.

    Attributes:
        points: (N, d) array of unit vectors
        weights: (N,) array of nonnegative weights summing to 1

    Example:
        >>> cfg = WeightedConfig(np.eye(3))
        >>> cfg.dim, cfg.n_points, cfg.weights[0]
        (3, 3, 0.3333333333333333)
    """

    points: np.ndarray
    weights: Optional[np.ndarray] = None
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=np.float64, copy=True)
        if points.ndim != 2 or points.shape[0] < 1:
            raise ConfigError("points must be a non-empty list of coordinate lists")
        n, d = points.shape
        if d < 2:
            raise ConfigError(f"dimension must be at least 2, got {d}")
        if not np.all(np.isfinite(points)):
            raise ConfigError("points contain non-finite coordinates")

        norms = np.linalg.norm(points, axis=1)
        off = np.abs(norms - 1.0)
        worst = int(np.argmax(off))
        if off[worst] > OFF_SPHERE_TOL:
            raise ConfigError(
                f"point {worst} has norm {norms[worst]:.10g}, "
                f"off the unit sphere by more than {OFF_SPHERE_TOL:g}"
            )
        fix = off > NORMALIZATION_TOL
        points[fix] /= norms[fix][:, None]

        if self.weights is None:
            weights = np.full(n, 1.0 / n)
        else:
            weights = np.array(self.weights, dtype=np.float64, copy=True).reshape(-1)
            if weights.shape[0] != n:
                raise ConfigError(f"{weights.shape[0]} weights given for {n} points")
            if not np.all(np.isfinite(weights)):
                raise ConfigError("weights contain non-finite values")
            if np.any(weights < 0):
                raise ConfigError(f"negative weight at index {int(np.argmin(weights))}")
            total = math.fsum(weights)
            if abs(total - 1.0) > WEIGHT_SUM_TOL:
                raise ConfigError(f"weights sum to {total:.10g}, not 1")
            if abs(total - 1.0) > 1e-12:
                weights = weights / total

        points.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "dim", d)

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])

    @property
    def support_mask(self) -> np.ndarray:
        """Boolean mask of points with weight above 1e-15."""
        return self.weights > SUPPORT_WEIGHT_EPS

    @property
    def is_uniform(self) -> bool:
        return bool(np.allclose(self.weights, 1.0 / self.n_points, rtol=0.0, atol=1e-12))

    def to_dict(self) -> dict:
        """JSON-ready form: {"dim", "points", "weights"}."""
        return {
            "dim": self.dim,
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
        }


@dataclass(frozen=True)
class CapReport:
    """Smallest spherical cap containing the support.

    Attributes:
        center: unit vector at the cap's pole
        radius: geodesic radius in radians
        attained_at: indices of support points on the cap boundary
    """

    center: np.ndarray
    radius: float
    attained_at: List[int]


# =============================================================================
# CONSTRUCTION / VALIDATION
# =============================================================================

def as_unit_vector(coords: Sequence[float]) -> UnitVector:
    """Normalize a coordinate list onto the sphere.

    Raises:
        DomainError: fewer than 2 coordinates or a zero vector
    """
    x = np.asarray(coords, dtype=np.float64).reshape(-1)
    if x.shape[0] < 2:
        raise DomainError("unit vectors need at least 2 coordinates")
    norm = float(np.linalg.norm(x))
    if norm == 0.0 or not math.isfinite(norm):
        raise DomainError("cannot normalize a zero or non-finite vector")
    if abs(norm - 1.0) > NORMALIZATION_TOL:
        x = x / norm
    return x


def validate_config(raw: Mapping[str, Any]) -> WeightedConfig:
    """Build a WeightedConfig from parsed JSON content.

    Expected shape: {"dim": int, "points": [[...], ...], "weights": [...]?}.
    Missing weights default to uniform 1/N.

    Raises:
        ConfigError: wrong dimension, negative weight, bad weight sum,
            or a point off the sphere by more than 1e-6

    Example:
        >>> cfg = validate_config({"dim": 2, "points": [[1, 0], [0, 1]]})
        >>> cfg.weights.tolist()
        [0.5, 0.5]
    """
    if not isinstance(raw, Mapping):
        raise ConfigError("configuration must be a JSON object")
    if "points" not in raw:
        raise ConfigError("configuration has no 'points' field")
    try:
        points = np.array(raw["points"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"points are not a rectangular numeric array: {exc}") from exc
    if points.ndim != 2:
        raise ConfigError("points must be an array of coordinate arrays")

    dim = raw.get("dim")
    if dim is not None:
        if not isinstance(dim, int) or isinstance(dim, bool):
            raise ConfigError(f"dim must be an integer, got {dim!r}")
        if points.shape[1] != dim:
            raise ConfigError(f"points have {points.shape[1]} coordinates but dim is {dim}")

    weights = raw.get("weights")
    return WeightedConfig(points, None if weights is None else np.asarray(weights, dtype=float))


def support(cfg: WeightedConfig) -> WeightedConfig:
    """Drop points with weight at or below 1e-15 and renormalize."""
    mask = cfg.support_mask
    if np.all(mask):
        return cfg
    if not np.any(mask):
        raise ConfigError("configuration has empty support")
    weights = cfg.weights[mask]
    return WeightedConfig(cfg.points[mask], weights / math.fsum(weights))


def merge_duplicates(cfg: WeightedConfig, tol: float = DUPLICATE_TOL) -> WeightedConfig:
    """Merge support points closer than tol, adding their weights.

    The first occurrence of each cluster keeps its coordinates; order of
    first occurrence is preserved.
    """
    cfg = support(cfg)
    kept: List[int] = []
    merged_weights: List[float] = []
    for i, x in enumerate(cfg.points):
        for slot, j in enumerate(kept):
            if float(np.linalg.norm(x - cfg.points[j])) <= tol:
                merged_weights[slot] += float(cfg.weights[i])
                break
        else:
            kept.append(i)
            merged_weights.append(float(cfg.weights[i]))
    if len(kept) == cfg.n_points:
        return cfg
    return WeightedConfig(cfg.points[kept], np.array(merged_weights))


def check_same_dimension(*vectors: np.ndarray) -> int:
    dims = {int(np.shape(x)[-1]) for x in vectors}
    if len(dims) != 1:
        raise DimensionMismatchError(f"vectors of different dimensions: {sorted(dims)}")
    return dims.pop()


# =============================================================================
# INNER PRODUCTS
# =============================================================================

def clamp_cosine(value: np.ndarray | float) -> np.ndarray | float:
    """Clip inner products into [-1, 1]."""
    if isinstance(value, np.ndarray):
        return np.clip(value, -1.0, 1.0)
    return min(1.0, max(-1.0, float(value)))


def gram_triple(x: UnitVector, y: UnitVector, z: UnitVector) -> GramTriple:
    """Return (u, v, t) = (<y,z>, <x,z>, <x,y>), each clamped to [-1, 1].

    Raises:
        DimensionMismatchError: the three vectors differ in dimension

    Example:
        >>> gram_triple(np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([1.0, 0.0]))
        GramTriple(u=0.0, v=1.0, t=0.0)
    """
    check_same_dimension(x, y, z)
    return GramTriple(
        u=float(clamp_cosine(float(np.dot(y, z)))),
        v=float(clamp_cosine(float(np.dot(x, z)))),
        t=float(clamp_cosine(float(np.dot(x, y)))),
    )


def gram_matrix(cfg: WeightedConfig) -> np.ndarray:
    """N x N matrix of clamped pairwise inner products."""
    return np.clip(cfg.points @ cfg.points.T, -1.0, 1.0)


def distinct_triples(n: int) -> np.ndarray:
    """(C(n,3), 3) array of index triples i < j < k, lexicographic."""
    if n < 3:
        return np.empty((0, 3), dtype=np.intp)
    return np.array(list(itertools.combinations(range(n), 3)), dtype=np.intp)


def triple_products(gram: np.ndarray, triples: np.ndarray) -> np.ndarray:
    """<x_i,x_j><x_i,x_k><x_j,x_k> for each row (i, j, k) of `triples`."""
    i, j, k = triples[:, 0], triples[:, 1], triples[:, 2]
    return gram[i, j] * gram[i, k] * gram[j, k]


# =============================================================================
# SPHERICAL METRIC DIAGNOSTICS
# =============================================================================

def spherical_diameter(cfg: WeightedConfig) -> float:
    """Largest geodesic distance between two support points (radians).

    Raises:
        ConfigError: fewer than 2 support points
    """
    pts = cfg.points[cfg.support_mask]
    if pts.shape[0] < 2:
        raise ConfigError("spherical diameter needs at least 2 support points")
    gram = np.clip(pts @ pts.T, -1.0, 1.0)
    iu = np.triu_indices(pts.shape[0], k=1)
    return float(np.max(np.arccos(gram[iu])))


def min_enclosing_cap(cfg: WeightedConfig) -> CapReport:
    """Smallest spherical cap containing every support point.

    Computes the Euclidean smallest enclosing ball of the support points
    (Welzl's algorithm in R^d) and normalizes its center; this is the cap
    center whenever the support lies in an open hemisphere.

    Raises:
        NoCapError: the ball center is (numerically) the origin, or some
            support point is not strictly inside the hemisphere around it
    """
    pts = cfg.points[cfg.support_mask]
    center, _ = smallest_enclosing_ball(pts)
    norm = float(np.linalg.norm(center))
    if norm < CAP_CENTER_MIN_NORM:
        raise NoCapError("support points are not contained in an open hemisphere")
    pole = center / norm
    cosines = np.clip(pts @ pole, -1.0, 1.0)
    if float(np.min(cosines)) <= 0.0:
        raise NoCapError("support points are not contained in an open hemisphere")
    distances = np.arccos(cosines)
    radius = float(np.max(distances))
    support_index = np.flatnonzero(cfg.support_mask)
    attained = [int(support_index[k]) for k in np.flatnonzero(distances >= radius - 1e-9)]
    return CapReport(center=pole, radius=radius, attained_at=attained)


def dekster_radius(d: int, diameter: float) -> float:
    """Circumradius of a regular simplex of d vertices in S^{d-1} with edge `diameter`.

    The vertices have pairwise inner product c = cos(D); their centroid
    direction makes inner product sqrt((1 + (d-1)c) / d) with each vertex.

    Raises:
        DomainError: d < 2 or D outside [0, 2 asin(sqrt(d / (2d - 2)))]
    """
    if d < 2:
        raise DomainError(f"dimension must be at least 2, got {d}")
    c = math.cos(diameter)
    if diameter < 0 or (d > 2 and c < -1.0 / (d - 1) - INNER_PRODUCT_SLACK):
        raise DomainError(f"edge length {diameter} outside the admissible range for d={d}")
    if d == 2 and diameter > math.pi:
        raise DomainError(f"edge length {diameter} exceeds pi")
    return math.acos(min(1.0, math.sqrt(max(0.0, (1.0 + (d - 1) * c) / d))))


# =============================================================================
# SMALLEST ENCLOSING BALL (Welzl, move-to-front recursion in R^d)
# =============================================================================

def smallest_enclosing_ball(points: np.ndarray) -> Tuple[np.ndarray, float]:
    """Euclidean smallest enclosing ball of the rows of `points`.

    Points are visited in a fixed pseudo-random order so results are
    reproducible.
    """
    pts = np.asarray(points, dtype=np.float64)
    order = np.random.default_rng(0).permutation(pts.shape[0])
    shuffled = [pts[i] for i in order]
    center, radius_sq = _welzl(shuffled, [], pts.shape[1])
    return center, math.sqrt(max(radius_sq, 0.0))


def _welzl(
    points: List[np.ndarray], boundary: List[np.ndarray], dim: int
) -> Tuple[np.ndarray, float]:
    ball = _circumball(boundary, dim)
    if len(boundary) == dim + 1:
        return ball
    for i, p in enumerate(points):
        if not _in_ball(p, ball):
            ball = _welzl(points[:i], boundary + [p], dim)
    return ball


def _circumball(boundary: List[np.ndarray], dim: int) -> Tuple[np.ndarray, float]:
    """Smallest ball with every boundary point on its sphere (radius^2 = -1 if empty)."""
    if not boundary:
        return np.zeros(dim), -1.0
    p0 = boundary[0]
    if len(boundary) == 1:
        return p0.copy(), 0.0
    diffs = np.array([p - p0 for p in boundary[1:]])
    lhs = 2.0 * diffs @ diffs.T
    rhs = np.einsum("ij,ij->i", diffs, diffs)
    coeffs, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    center = p0 + coeffs @ diffs
    radius_sq = max(float(np.sum((p - center) ** 2)) for p in boundary)
    return center, radius_sq


def _in_ball(p: np.ndarray, ball: Tuple[np.ndarray, float]) -> bool:
    center, radius_sq = ball
    if radius_sq < 0:
        return False
    return float(np.sum((p - center) ** 2)) <= radius_sq * (1 + 1e-12) + 1e-14
