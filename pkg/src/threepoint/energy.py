"""Discrete three-point energies and the quantities around them.

The discrete K-energy of a weighted configuration is

    E_K = sum_{a,b,c} w_a w_b w_c K(x_a, x_b, x_c),

which is I_K(mu) for the discrete measure mu. For uniform weights this is
(1/N^3) times the plain triple sum.

Sums are compensated (math.fsum is exactly rounded), one partial sum per
outer index, combined in index order; the value is therefore the same for
any thread count.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from src.threepoint.data import MAX_S_MOMENT_SIZE, MC_CHUNK, MC_GENERATOR
from src.threepoint.errors import DimensionMismatchError, DomainError
from src.threepoint.geometry import WeightedConfig, gram_matrix
from src.threepoint.kernels import (
    KernelKind,
    KernelSpec,
    check_level,
    evaluate,
    packing_certificate_kernel,
    s_block,
)

logger = logging.getLogger(__name__)


# =============================================================================
# RESULT TYPES
# =============================================================================

@dataclass(frozen=True, eq=False)
class MomentMatrix:
    """Second-moment matrix A = sum_i w_i x_i x_i^T (trace 1, PSD)."""

    dim: int
    entries: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))

    @property
    def min_eigenvalue(self) -> float:
        return float(np.min(np.linalg.eigvalsh(self.entries)))

    def isotropy_residual(self) -> float:
        """Frobenius distance to I/d."""
        return float(np.linalg.norm(self.entries - np.eye(self.dim) / self.dim, ord="fro"))


@dataclass(frozen=True)
class EnergyReport:
    """Value of a discrete energy.

    Attributes:
        value: the energy E_K
        kernel: human description of the kernel
        n_points: N
        breakdown: optional sums over index classes
            ("all_equal": a=b=c, "two_equal": exactly two equal, "distinct")
        kernel_spec: JSON form of the kernel
    """

    value: float
    kernel: str
    n_points: int
    breakdown: Optional[Dict[str, float]] = None
    kernel_spec: Optional[dict] = None

    def to_dict(self) -> dict:
        out = {"value": self.value, "kernel": self.kernel, "n_points": self.n_points}
        if self.breakdown is not None:
            out["breakdown"] = dict(self.breakdown)
        if self.kernel_spec is not None:
            out["kernel_spec"] = self.kernel_spec
        return out


@dataclass(frozen=True)
class McEstimate:
    """Monte-Carlo estimate of I_K(sigma) for the uniform measure sigma."""

    mean: float
    std_error: float
    n_samples: int
    seed: int
    generator: str = MC_GENERATOR

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "generator": self.generator,
        }


# =============================================================================
# TRIPLE SUMS
# =============================================================================

def _outer_slices(
    cfg: WeightedConfig, term: Callable[[int, np.ndarray], np.ndarray], threads: int
) -> List[np.ndarray]:
    """Weighted term matrices W_a[b, c] for every outer index a, in index order."""
    gram = gram_matrix(cfg)
    indices = range(cfg.n_points)
    if threads <= 1 or cfg.n_points < 2:
        return [term(a, gram) for a in indices]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda a: term(a, gram), indices))


def _triple_values(kernel: KernelSpec, gram: np.ndarray, a: int) -> np.ndarray:
    """K(x_a, x_b, x_c) for all (b, c): u = <x_b,x_c>, v = <x_a,x_c>, t = <x_a,x_b>."""
    n = gram.shape[0]
    row = gram[a]
    v = np.broadcast_to(row[None, :], (n, n))
    t = np.broadcast_to(row[:, None], (n, n))
    return np.asarray(evaluate(kernel, gram, v, t), dtype=np.float64)


def three_point_energy(
    cfg: WeightedConfig,
    kernel: KernelSpec,
    breakdown: bool = False,
    threads: int = 1,
) -> EnergyReport:
    """sum_{a,b,c} w_a w_b w_c K(x_a, x_b, x_c).

    Args:
        cfg: points and weights on S^{d-1}
        kernel: kernel for the same d
        breakdown: also split the sum by index-coincidence class
        threads: outer index slices summed on this many threads

    Returns:
        EnergyReport with the compensated sum, plus the all_equal, two_equal
        and distinct parts when `breakdown` is set

    Raises:
        DimensionMismatchError: kernel and configuration dimensions differ

    Example:
        >>> three_point_energy(gen_orthonormal_basis(4), KernelSpec.pframe(1, 4)).value
        0.0625
    """
    if kernel.dim != cfg.dim:
        raise DimensionMismatchError(f"kernel is for d={kernel.dim}, configuration has d={cfg.dim}")
    w = cfg.weights
    pair_weights = np.outer(w, w)

    def term(a: int, gram: np.ndarray) -> np.ndarray:
        return w[a] * pair_weights * _triple_values(kernel, gram, a)

    slices = _outer_slices(cfg, term, threads)
    value = math.fsum(math.fsum(s.ravel()) for s in slices)
    classes = _class_breakdown(slices) if breakdown else None
    logger.debug("energy %s on N=%d: %.17g", kernel.describe(), cfg.n_points, value)
    return EnergyReport(
        value=value,
        kernel=kernel.describe(),
        n_points=cfg.n_points,
        breakdown=classes,
        kernel_spec=kernel.to_dict(),
    )


def _class_breakdown(slices: List[np.ndarray]) -> Dict[str, float]:
    """Split the triple sum by index coincidences."""
    all_equal: List[float] = []
    two_equal: List[float] = []
    distinct: List[float] = []
    n = len(slices)
    for a, s in enumerate(slices):
        mask_two = np.zeros((n, n), dtype=bool)
        mask_two[np.arange(n), np.arange(n)] = True  # b = c
        mask_two[a, :] = True  # b = a
        mask_two[:, a] = True  # c = a
        mask_two[a, a] = False
        mask_distinct = ~mask_two
        mask_distinct[a, a] = False
        all_equal.append(float(s[a, a]))
        two_equal.extend(s[mask_two].tolist())
        distinct.extend(s[mask_distinct].tolist())
    return {
        "all_equal": math.fsum(all_equal),
        "two_equal": math.fsum(two_equal),
        "distinct": math.fsum(distinct),
    }


def sdp_certificate_energy(cfg: WeightedConfig, threads: int = 1) -> float:
    """Energy of 6((d-1)^2/d^2 S_{0,2,2} + S_{1,1,1}); nonnegative for every measure."""
    return three_point_energy(cfg, packing_certificate_kernel(cfg.dim), threads=threads).value


# =============================================================================
# TWO-POINT QUANTITIES
# =============================================================================

def two_point_frame_energy(cfg: WeightedConfig, p: float) -> float:
    """sum_{i,j} w_i w_j |<x_i, x_j>|^p; at least 1/d for p = 2.

    Raises:
        DomainError: p <= 0
    """
    if not p > 0:
        raise DomainError(f"frame exponent must be positive, got {p}")
    gram = gram_matrix(cfg)
    terms = np.outer(cfg.weights, cfg.weights) * np.abs(gram) ** p
    return math.fsum(terms.ravel())


def moment_matrix(cfg: WeightedConfig) -> MomentMatrix:
    """A = sum_i w_i x_i x_i^T; equals I/d exactly when the measure is isotropic."""
    pts = cfg.points
    entries = (pts * cfg.weights[:, None]).T @ pts
    entries = (entries + entries.T) / 2.0
    entries.flags.writeable = False
    return MomentMatrix(dim=cfg.dim, entries=entries)


def trace_cubed(moments: MomentMatrix) -> float:
    """Tr(A^3) = sum_{k,l,m} a_kl a_lm a_mk, which equals the uvt-energy."""
    a = moments.entries
    return float(np.einsum("kl,lm,mk->", a, a, a))


def center_of_mass(cfg: WeightedConfig) -> np.ndarray:
    return cfg.weights @ cfg.points


# =============================================================================
# S-MOMENT MATRICES
# =============================================================================

def s_moment_matrix(cfg: WeightedConfig, m: int, size: int, threads: int = 1) -> np.ndarray:
    """size x size matrix with (i, j) entry sum w_a w_b w_c S_{m,i,j}^d(x_a, x_b, x_c).

    Positive semidefinite for every measure.

    Raises:
        DomainError: size outside 1..6
        KernelError: m >= 2 with d < 3
    """
    if not 1 <= size <= MAX_S_MOMENT_SIZE:
        raise DomainError(f"S-moment size must be in 1..{MAX_S_MOMENT_SIZE}, got {size}")
    check_level(m, cfg.dim)
    w = cfg.weights
    pair_weights = np.outer(w, w)
    n = cfg.n_points

    def term(a: int, gram: np.ndarray) -> np.ndarray:
        row = gram[a]
        v = np.broadcast_to(row[None, :], (n, n))
        t = np.broadcast_to(row[:, None], (n, n))
        return w[a] * pair_weights * s_block(m, size, cfg.dim, (gram, v, t))

    slices = _outer_slices(cfg, term, threads)
    out = np.empty((size, size))
    for i in range(size):
        for j in range(size):
            out[i, j] = math.fsum(math.fsum(s[i, j].ravel()) for s in slices)
    return (out + out.T) / 2.0


# =============================================================================
# UNIFORM MEASURE
# =============================================================================

def sample_sphere(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    """n i.i.d. uniform points on S^{d-1} (normalized standard Gaussians)."""
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def mc_energy(d: int, kernel: KernelSpec, n: int, seed: int) -> McEstimate:
    """Monte-Carlo estimate of I_K(sigma) from n independent uniform triples.

    Triples are drawn in fixed-size batches from a PCG64 stream seeded with
    `seed`, so the estimate is reproducible.

    Raises:
        DomainError: n < 1
        DimensionMismatchError: kernel dimension differs from d
    """
    if n < 1:
        raise DomainError(f"need at least one sample, got {n}")
    if kernel.dim != d:
        raise DimensionMismatchError(f"kernel is for d={kernel.dim}, asked for d={d}")
    rng = np.random.Generator(np.random.PCG64(seed))
    sums: List[float] = []
    squares: List[float] = []
    remaining = n
    while remaining > 0:
        batch = min(MC_CHUNK, remaining)
        x = sample_sphere(rng, batch, d)
        y = sample_sphere(rng, batch, d)
        z = sample_sphere(rng, batch, d)
        u = np.clip(np.einsum("ij,ij->i", y, z), -1.0, 1.0)
        v = np.clip(np.einsum("ij,ij->i", x, z), -1.0, 1.0)
        t = np.clip(np.einsum("ij,ij->i", x, y), -1.0, 1.0)
        values = np.asarray(evaluate(kernel, u, v, t), dtype=np.float64) * np.ones(batch)
        sums.append(math.fsum(values))
        squares.append(math.fsum(values * values))
        remaining -= batch
    mean = math.fsum(sums) / n
    if n > 1:
        variance = max(0.0, (math.fsum(squares) - n * mean * mean) / (n - 1))
    else:
        variance = 0.0
    estimate = McEstimate(mean=mean, std_error=math.sqrt(variance / n), n_samples=n, seed=seed)
    logger.info("mc %s: %.6g +/- %.2g (n=%d)", kernel.describe(), mean, estimate.std_error, n)
    return estimate


def uniform_energy_closed_form(kernel: KernelSpec) -> float:
    """I_K(sigma) where a closed form is known.

    uvt: sigma is isotropic, so the value is 1/d^2.
    |uvt|^2: (1/d + 6/(d(d+2))) / (d(d+2)) from the fourth moments of sigma.

    Raises:
        DomainError: no closed form for this kernel
    """
    d = kernel.dim
    if kernel.kind is KernelKind.TRIPLE_PRODUCT:
        return 1.0 / d**2
    if kernel.kind is KernelKind.PFRAME and kernel.p == 2.0:
        return (1.0 / d + 6.0 / (d * (d + 2))) / (d * (d + 2))
    raise DomainError(f"no closed form for {kernel.describe()}")
