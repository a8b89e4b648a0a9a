"""Verifiers for the checkable hypotheses and conclusions around three-point energies.

Each check returns a CertReport whose `passed` flag is exactly
`max_residual <= tolerance`. Checks whose hypothesis does not hold for the
given configuration pass vacuously with residual 0 and a "not applicable"
note.

Any result that contradicts a proven bound (a packing configuration larger
than its size bound) raises TheoremViolation instead of returning.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.threepoint.data import (
    BALANCE_TOL,
    DEFAULT_PACKING_EPS,
    DEFAULT_PSD_CHECK_SIZE,
    DIAMETER_TOL,
    IDENTITY_TOL,
    ISOTROPY_TOL,
    MC_SIGMA_BAND,
    ORTHOGONALITY_TOL,
    PACKING_TOL,
    PSD_EIGEN_TOL,
    RIGIDITY_TOL,
    STRUCTURE_TOL,
    TIGHT_FRAME_TOL,
)
from src.threepoint.energy import (
    center_of_mass,
    mc_energy,
    moment_matrix,
    s_moment_matrix,
    sdp_certificate_energy,
    three_point_energy,
    two_point_frame_energy,
)
from src.threepoint.errors import ConfigError, DomainError, NoCapError, TheoremViolation
from src.threepoint.geometry import (
    WeightedConfig,
    dekster_radius,
    distinct_triples,
    gram_matrix,
    merge_duplicates,
    min_enclosing_cap,
    spherical_diameter,
    support,
    triple_products,
)
from src.threepoint.kernels import KernelSpec, s_kernel_gram

logger = logging.getLogger(__name__)

NOT_APPLICABLE = "not applicable"


# =============================================================================
# REPORT TYPES
# =============================================================================

@dataclass(frozen=True)
class CertReport:
    """Outcome of one verifier.

    Attributes:
        name: check name (the CLI registry key)
        passed: max_residual <= tolerance
        max_residual: size of the worst violation (0 when none)
        tolerance: acceptance threshold
        witness: where the worst violation occurs (indices, sample point, level)
        note: optional human explanation
    """

    name: str
    passed: bool
    max_residual: float
    tolerance: float
    witness: Optional[Tuple] = None
    note: Optional[str] = None

    @property
    def applicable(self) -> bool:
        return self.note is None or not self.note.startswith(NOT_APPLICABLE)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "witness": None if self.witness is None else list(self.witness),
            "note": self.note,
        }


def _report(
    name: str,
    residual: float,
    tol: float,
    witness: Optional[Tuple] = None,
    note: Optional[str] = None,
) -> CertReport:
    residual = float(residual)
    return CertReport(
        name=name,
        passed=residual <= tol,
        max_residual=residual,
        tolerance=float(tol),
        witness=witness,
        note=note,
    )


def _not_applicable(name: str, tol: float, reason: str) -> CertReport:
    return _report(name, 0.0, tol, note=f"{NOT_APPLICABLE}: {reason}")


class PackingMode(Enum):
    """Hypothesis on distinct-triple products.

    NONPOSITIVE: every product <= 0, size bound 2d.
    STRICT: every product <= -eps < 0, size bound min(d + 1, 1 + 1/eps).
    """

    NONPOSITIVE = "nonpositive"
    STRICT = "strict"


@dataclass(frozen=True)
class PackingReport:
    """Distinct-triple scan of a configuration's merged support.

    Attributes:
        mode: hypothesis being checked
        n_points: number of distinct support points
        worst_triple: indices (into the merged support) of the largest product
        worst_product: that product
        passed: worst_product <= threshold + tolerance
        bound: size bound the hypothesis implies (None when N < 3)
        epsilon: margin in STRICT mode
        tolerance: numerical slack
    """

    mode: PackingMode
    n_points: int
    worst_triple: Optional[Tuple[int, int, int]]
    worst_product: Optional[float]
    passed: bool
    bound: Optional[int]
    epsilon: float = 0.0
    tolerance: float = PACKING_TOL

    @property
    def threshold(self) -> float:
        return -self.epsilon if self.mode is PackingMode.STRICT else 0.0

    def as_cert_report(self) -> CertReport:
        name = "packing" if self.mode is PackingMode.NONPOSITIVE else "packing-strict"
        if self.worst_product is None:
            return _report(name, 0.0, self.tolerance, note="vacuous: fewer than 3 points")
        residual = max(0.0, self.worst_product - self.threshold)
        note = f"N={self.n_points}, bound={self.bound}"
        return CertReport(
            name=name,
            passed=self.passed,
            max_residual=residual,
            tolerance=self.tolerance,
            witness=self.worst_triple,
            note=note,
        )

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "n_points": self.n_points,
            "worst_triple": None if self.worst_triple is None else list(self.worst_triple),
            "worst_product": self.worst_product,
            "passed": self.passed,
            "bound": self.bound,
            "epsilon": self.epsilon,
            "tolerance": self.tolerance,
        }


# =============================================================================
# POLYNOMIAL IDENTITIES
# =============================================================================

def _cube_samples(n_samples: int, seed: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if n_samples < 1:
        raise DomainError(f"need at least one sample, got {n_samples}")
    rng = np.random.Generator(np.random.PCG64(seed))
    u, v, t = rng.uniform(-1.0, 1.0, size=(3, n_samples))
    return u, v, t


def _sum_squares(u, v, t):
    return u * u + v * v + t * t


def _sum_square_pairs(u, v, t):
    return u * u * v * v + u * u * t * t + v * v * t * t


def rosen_identity_residuals(d: int, u, v, t) -> Tuple[np.ndarray, np.ndarray]:
    """Pointwise residuals of the two certificate-kernel identities.

        6 (d-1)^2/d^2 S_{0,2,2} = 2 sum u^2 v^2 - (4/d) sum u^2 + 6/d^2
        6 S_{1,1,1}             = 6 uvt - 2 sum u^2 v^2

    Kernels are evaluated through the general Gegenbauer machinery; the right
    sides directly as polynomials.
    """
    u, v, t = (np.asarray(x, dtype=np.float64) for x in (u, v, t))
    s022 = s_kernel_gram(0, 2, 2, d, (u, v, t))
    s111 = s_kernel_gram(1, 1, 1, d, (u, v, t))
    pairs = _sum_square_pairs(u, v, t)
    first = 6.0 * (d - 1) ** 2 / d**2 * s022 - (
        2.0 * pairs - 4.0 / d * _sum_squares(u, v, t) + 6.0 / d**2
    )
    second = 6.0 * s111 - (6.0 * u * v * t - 2.0 * pairs)
    return np.abs(first), np.abs(second)


def uvt_identity_residual(d: int, u, v, t) -> np.ndarray:
    """|uvt - ((d-1)^2/d^2 S_{0,2,2} + S_{1,1,1} + 2/(3d) sum u^2 - 1/d^2)|."""
    u, v, t = (np.asarray(x, dtype=np.float64) for x in (u, v, t))
    s022 = s_kernel_gram(0, 2, 2, d, (u, v, t))
    s111 = s_kernel_gram(1, 1, 1, d, (u, v, t))
    rhs = (d - 1) ** 2 / d**2 * s022 + s111 + 2.0 / (3 * d) * _sum_squares(u, v, t) - 1.0 / d**2
    return np.abs(u * v * t - rhs)


def _worst_sample(residual: np.ndarray, u, v, t) -> Tuple[float, Tuple[float, float, float]]:
    k = int(np.argmax(residual))
    return float(residual[k]), (float(u[k]), float(v[k]), float(t[k]))


def check_identity_rosen(
    d: int, n_samples: int, seed: int, tol: float = IDENTITY_TOL
) -> CertReport:
    """Both packing-certificate identities at random points of the cube [-1, 1]^3.

    Raises:
        DomainError: d < 2 or n_samples < 1
    """
    if d < 2:
        raise DomainError(f"dimension must be at least 2, got {d}")
    u, v, t = _cube_samples(n_samples, seed)
    first, second = rosen_identity_residuals(d, u, v, t)
    residual, witness = _worst_sample(np.maximum(first, second), u, v, t)
    return _report("identity-rosen", residual, tol, witness=witness)


def check_identity_uvt(d: int, n_samples: int, seed: int, tol: float = IDENTITY_TOL) -> CertReport:
    """uvt expansion in S_{0,2,2}, S_{1,1,1} and sum u^2 at random cube points."""
    if d < 2:
        raise DomainError(f"dimension must be at least 2, got {d}")
    u, v, t = _cube_samples(n_samples, seed)
    residual, witness = _worst_sample(uvt_identity_residual(d, u, v, t), u, v, t)
    return _report("identity-uvt", residual, tol, witness=witness)


# =============================================================================
# POSITIVE SEMIDEFINITENESS
# =============================================================================

def psd_check(
    cfg: WeightedConfig,
    m_max: int,
    size: int = DEFAULT_PSD_CHECK_SIZE,
    tol: float = -PSD_EIGEN_TOL,
    negate: bool = False,
) -> CertReport:
    """Smallest eigenvalue of S_m^d(mu) over m = 0..m_max must be >= -tol.

    `negate` flips every matrix before the eigenvalue test; it exists so the
    failing branch can be exercised.

    Raises:
        DomainError: size outside 1..6
        KernelError: m_max >= 2 with d < 3
    """
    worst = math.inf
    worst_level = 0
    for m in range(m_max + 1):
        mat = s_moment_matrix(cfg, m, size)
        if negate:
            mat = -mat
        smallest = float(np.min(np.linalg.eigvalsh(mat)))
        logger.debug("S_%d moment matrix: smallest eigenvalue %.3g", m, smallest)
        if smallest < worst:
            worst, worst_level = smallest, m
    return _report(
        "psd",
        max(0.0, -worst),
        tol,
        witness=(worst_level,),
        note=f"min eigenvalue {worst:.3g}",
    )


def check_sdp_certificate(cfg: WeightedConfig, tol: float = IDENTITY_TOL) -> CertReport:
    """Energy of 6((d-1)^2/d^2 S_{0,2,2} + S_{1,1,1}) is nonnegative."""
    value = sdp_certificate_energy(cfg)
    return _report("sdp-certificate", max(0.0, -value), tol, note=f"energy {value:.17g}")


# =============================================================================
# MOMENTS
# =============================================================================

def check_isotropic(cfg: WeightedConfig, tol: float = ISOTROPY_TOL) -> CertReport:
    """||sum w_i x_i x_i^T - I/d||_F <= tol."""
    return _report("isotropic", moment_matrix(cfg).isotropy_residual(), tol)


def check_balanced(cfg: WeightedConfig, tol: float = BALANCE_TOL) -> CertReport:
    """||sum w_i x_i|| <= tol."""
    return _report("balanced", float(np.linalg.norm(center_of_mass(cfg))), tol)


def check_tight_frame(cfg: WeightedConfig, tol: float = TIGHT_FRAME_TOL) -> CertReport:
    """Frame energy attains its lower bound.

    Uniform weights: |sum_{i,j} <x_i,x_j>^2 - N^2/d|. Otherwise the measure
    version |sum w_i w_j <x_i,x_j>^2 - 1/d|.
    """
    d = cfg.dim
    if cfg.is_uniform:
        n = cfg.n_points
        gram = gram_matrix(cfg)
        residual = abs(math.fsum((gram * gram).ravel()) - n * n / d)
        return _report("tight-frame", residual, tol)
    residual = abs(two_point_frame_energy(cfg, 2.0) - 1.0 / d)
    return _report("tight-frame", residual, tol, note="weighted: measure-level frame energy")


# =============================================================================
# TRIPLE STRUCTURE
# =============================================================================

def packing_bound(d: int, mode: PackingMode, eps: float = 0.0) -> int:
    """Largest N allowed by the hypothesis of `mode` on S^{d-1}."""
    if mode is PackingMode.NONPOSITIVE:
        return 2 * d
    return min(d + 1, int(math.floor(1.0 + 1.0 / eps + 1e-9)))


def check_packing(
    cfg: WeightedConfig,
    mode: PackingMode = PackingMode.NONPOSITIVE,
    eps: float = 0.0,
    tol: float = PACKING_TOL,
) -> PackingReport:
    """Largest product <x_i,x_j><x_i,x_k><x_j,x_k> over distinct support triples.

    Points closer than 1e-9 are merged first, so duplicates never form a
    "distinct" triple. Passes iff the largest product is <= tol
    (NONPOSITIVE) or <= -eps + tol (STRICT).

    Args:
        cfg: configuration; weights are ignored beyond the support
        mode: which hypothesis to test
        eps: STRICT margin, must be positive in that mode
        tol: numerical slack on the threshold

    Returns:
        PackingReport with the worst triple (indices into the merged
        support) and the size bound of `mode`

    Raises:
        DomainError: STRICT mode without a positive eps
        TheoremViolation: the configuration passes but exceeds the size bound

    Example:
        >>> check_packing(gen_crosspolytope(3)).bound
        6
    """
    if mode is PackingMode.STRICT and not eps > 0:
        raise DomainError(f"strict packing mode needs eps > 0, got {eps}")
    merged = merge_duplicates(cfg)
    n = merged.n_points
    if n < 3:
        return PackingReport(mode, n, None, None, True, None, eps, tol)

    triples = distinct_triples(n)
    products = triple_products(gram_matrix(merged), triples)
    k = int(np.argmax(products))
    worst = float(products[k])
    threshold = -eps if mode is PackingMode.STRICT else 0.0
    passed = worst <= threshold + tol
    bound = packing_bound(merged.dim, mode, eps)
    report = PackingReport(
        mode=mode,
        n_points=n,
        worst_triple=(int(triples[k, 0]), int(triples[k, 1]), int(triples[k, 2])),
        worst_product=worst,
        passed=passed,
        bound=bound,
        epsilon=eps,
        tolerance=tol,
    )
    if passed and n > bound:
        raise TheoremViolation(
            f"{n} points on S^{merged.dim - 1} pass the {mode.value} packing hypothesis "
            f"but the bound is {bound} (worst product {worst:.3g})"
        )
    return report


def check_nearly_orthogonal(cfg: WeightedConfig, tol: float = ORTHOGONALITY_TOL) -> CertReport:
    """Every three distinct support vectors contain an orthogonal pair."""
    merged = merge_duplicates(cfg)
    n = merged.n_points
    if n < 3:
        return _report("nearly-orthogonal", 0.0, tol, note="vacuous: fewer than 3 points")
    gram = np.abs(gram_matrix(merged))
    triples = distinct_triples(n)
    i, j, k = triples[:, 0], triples[:, 1], triples[:, 2]
    closest = np.minimum(np.minimum(gram[i, j], gram[i, k]), gram[j, k])
    worst = int(np.argmax(closest))
    return _report(
        "nearly-orthogonal",
        float(closest[worst]),
        tol,
        witness=tuple(int(x) for x in triples[worst]),
    )


def check_nonneg_triples(cfg: WeightedConfig, tol: float = ORTHOGONALITY_TOL) -> CertReport:
    """Every support triple, repeats allowed, has a nonnegative product."""
    sup = support(cfg)
    gram = gram_matrix(sup)
    worst = math.inf
    witness: Tuple[int, int, int] = (0, 0, 0)
    for a in range(sup.n_points):
        row = gram[a]
        products = row[:, None] * row[None, :] * gram
        b, c = np.unravel_index(int(np.argmin(products)), products.shape)
        if products[b, c] < worst:
            worst = float(products[b, c])
            witness = (a, int(b), int(c))
    return _report("nonneg-triples", max(0.0, -worst), tol, witness=witness)


def check_orthogonal_counterpart(cfg: WeightedConfig, tol: float = ORTHOGONALITY_TOL) -> CertReport:
    """Every support point has an orthogonal partner in the support."""
    merged = merge_duplicates(cfg)
    if merged.n_points < 2:
        return _report(
            "orthogonal-counterpart", 1.0, tol, witness=(0,), note="no other support point"
        )
    gram = np.abs(gram_matrix(merged))
    np.fill_diagonal(gram, np.inf)
    closest = gram.min(axis=1)
    worst = int(np.argmax(closest))
    return _report("orthogonal-counterpart", float(closest[worst]), tol, witness=(worst,))


# =============================================================================
# RIGIDITY AND STRUCTURE
# =============================================================================

def simplex_rigidity_parts(
    cfg: WeightedConfig, tol: float = RIGIDITY_TOL
) -> Tuple[CertReport, Optional[CertReport]]:
    """The two halves of the simplex rigidity statement.

    (a) sum w_i w_j P(<x_i,x_j>) = 0 with P(t) = (t - 1)(t + 1/d), forced for
        balanced isotropic measures.
    (b) when every pairwise inner product is >= -1/d - tol: the measure is
        uniform on a regular simplex (N = d + 1, inner products -1/d, weights
        1/(d+1)). None when the hypothesis fails.
    """
    sup = merge_duplicates(cfg)
    d = sup.dim
    gram = gram_matrix(sup)
    w = sup.weights
    poly = (gram - 1.0) * (gram + 1.0 / d)
    identity = abs(math.fsum((np.outer(w, w) * poly).ravel()))
    part_a = _report("simplex-identity", identity, tol)

    n = sup.n_points
    off = gram[~np.eye(n, dtype=bool)]
    if n > 1 and float(off.min()) < -1.0 / d - tol:
        return part_a, None
    residuals = [float(abs(n - (d + 1)))]
    if n > 1:
        residuals.append(float(np.max(np.abs(off + 1.0 / d))))
    residuals.append(float(np.max(np.abs(w - 1.0 / (d + 1)))))
    return part_a, _report("simplex-structure", max(residuals), tol)


def check_simplex_rigidity(cfg: WeightedConfig, tol: float = RIGIDITY_TOL) -> CertReport:
    """Balanced isotropic measures with no inner product below -1/d are the simplex.

    The residual also absorbs the isotropy and balance residuals, so a
    configuration violating the precondition fails.
    """
    iso = moment_matrix(cfg).isotropy_residual()
    bal = float(np.linalg.norm(center_of_mass(cfg)))
    part_a, part_b = simplex_rigidity_parts(cfg, tol)
    residual = max(iso, bal, part_a.max_residual)
    note = None
    if max(iso, bal) > tol:
        note = "precondition failed: not balanced and isotropic"
    if part_b is None:
        note = note or "structural conclusion not applicable: an inner product is below -1/d"
    else:
        residual = max(residual, part_b.max_residual)
    return _report("simplex-rigidity", residual, tol, note=note)


def _lines(cfg: WeightedConfig, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """Group support points into lines (x ~ -x); returns representatives and line weights."""
    sup = support(cfg)
    reps: List[np.ndarray] = []
    weights: List[float] = []
    for x, wx in zip(sup.points, sup.weights):
        for slot, r in enumerate(reps):
            if abs(float(np.dot(x, r))) >= 1.0 - tol:
                weights[slot] += float(wx)
                break
        else:
            reps.append(x)
            weights.append(float(wx))
    return np.array(reps), np.array(weights)


def classify_orthonormal_basis(cfg: WeightedConfig, tol: float = STRUCTURE_TOL) -> CertReport:
    """Uniform orthonormal basis up to signs: d lines, mutually orthogonal, weight 1/d each."""
    reps, weights = _lines(cfg, tol)
    d = cfg.dim
    residuals = [float(abs(len(reps) - d))]
    if len(reps) > 1:
        gram = np.abs(reps @ reps.T)
        np.fill_diagonal(gram, 0.0)
        residuals.append(float(gram.max()))
    residuals.append(float(np.max(np.abs(weights - 1.0 / d))))
    return _report("orthonormal-basis", max(residuals), tol, note=f"{len(reps)} lines")


def check_non_obtuse_structure(cfg: WeightedConfig, tol: float = STRUCTURE_TOL) -> CertReport:
    """Isotropic measures with all inner products >= 0 are uniform orthonormal bases."""
    name = "non-obtuse"
    if moment_matrix(cfg).isotropy_residual() > tol:
        return _not_applicable(name, tol, "not isotropic")
    sup = support(cfg)
    if float(gram_matrix(sup).min()) < -tol:
        return _not_applicable(name, tol, "an inner product is negative")
    structure = classify_orthonormal_basis(cfg, tol)
    return _report(name, structure.max_residual, tol)


def classify_two_bases(cfg: WeightedConfig, tol: float = STRUCTURE_TOL) -> CertReport:
    """Planar 1-frame minimizer structure.

    At most two orthogonal line pairs, with equal weight on the two lines of a pair.
    """
    name = "two-bases"
    if cfg.dim != 2:
        return _not_applicable(name, tol, f"planar structure only, got d={cfg.dim}")
    reps, weights = _lines(cfg, tol)
    residuals = [float(max(0, len(reps) - 4))]
    if len(reps) == 1:
        residuals.append(1.0)
    elif len(reps) > 1:
        gram = np.abs(reps @ reps.T)
        np.fill_diagonal(gram, np.inf)
        partner = gram.argmin(axis=1)
        residuals.append(float(gram[np.arange(len(reps)), partner].max()))
        residuals.append(float(np.max(np.abs(weights - weights[partner]))))
    return _report(name, max(residuals), tol, note=f"{len(reps)} lines")


# =============================================================================
# METRIC CONSEQUENCES
# =============================================================================

def check_dekster_cap(cfg: WeightedConfig, tol: float = DIAMETER_TOL) -> CertReport:
    """Non-obtuse support fits in a cap no wider than the regular simplex of the same diameter."""
    name = "dekster"
    if int(np.count_nonzero(cfg.support_mask)) < 2:
        return _not_applicable(name, tol, "fewer than 2 support points")
    diameter = spherical_diameter(cfg)
    if diameter > math.pi / 2 + tol:
        return _not_applicable(name, tol, f"diameter {diameter:.6g} exceeds pi/2")
    try:
        cap = min_enclosing_cap(cfg)
    except NoCapError as exc:
        return _report(name, math.inf, tol, note=str(exc))
    bound = dekster_radius(cfg.dim, min(diameter, math.pi / 2))
    return _report(
        name,
        max(0.0, cap.radius - bound),
        tol,
        witness=tuple(cap.attained_at),
        note=f"cap radius {cap.radius:.12g}, simplex radius {bound:.12g}",
    )


def check_diameter_bounds(
    cfg: WeightedConfig, tol: float = DIAMETER_TOL, structure_tol: float = ISOTROPY_TOL
) -> CertReport:
    """Isotropic: diameter >= pi/2. Also balanced: diameter >= arccos(-1/d)."""
    name = "diameter"
    if moment_matrix(cfg).isotropy_residual() > structure_tol:
        return _not_applicable(name, tol, "not isotropic")
    diameter = spherical_diameter(cfg)
    target = math.pi / 2
    balanced = float(np.linalg.norm(center_of_mass(cfg))) <= structure_tol
    if balanced:
        target = math.acos(-1.0 / cfg.dim)
    return _report(
        name,
        max(0.0, target - diameter),
        tol,
        note=f"diameter {diameter:.12g} vs {'balanced ' if balanced else ''}bound {target:.12g}",
    )


# =============================================================================
# SIZE INEQUALITY AND UNIFORM COMPARISON
# =============================================================================

def rosenfeld_terms(n: int, d: int, frame_sum: float) -> Tuple[float, float]:
    """(18 - 12N/d) F - 12N + 6N^3/d^2 and its value 6N(2 - N/d)(N/d - 1) at F = N^2/d."""
    lhs = (18.0 - 12.0 * n / d) * frame_sum - 12.0 * n + 6.0 * n**3 / d**2
    reduced = 6.0 * n * (2.0 - n / d) * (n / d - 1.0)
    return lhs, reduced


def check_rosenfeld_inequality(cfg: WeightedConfig, tol: float = 1e-9) -> CertReport:
    """The size inequality a nonpositive-triple set satisfies.

    F is the frame sum over the distinct support points.
    """
    name = "rosenfeld"
    packing = check_packing(cfg)
    if not packing.passed:
        return _not_applicable(name, tol, "a distinct-triple product is positive")
    merged = merge_duplicates(cfg)
    gram = gram_matrix(merged)
    frame_sum = math.fsum((gram * gram).ravel())
    lhs, reduced = rosenfeld_terms(merged.n_points, merged.dim, frame_sum)
    return _report(
        name, max(0.0, -lhs), tol, note=f"inequality {lhs:.12g}, at tight frame {reduced:.12g}"
    )


def compare_with_uniform(
    cfg: WeightedConfig, p: int, n: int, seed: int, band: float = MC_SIGMA_BAND
) -> CertReport:
    """The uniform measure's even-p frame energy is no larger than the configuration's.

    Passes iff the Monte-Carlo mean is at most the discrete energy plus
    `band` standard errors.

    Raises:
        DomainError: p is not a positive even integer
    """
    if p <= 0 or p % 2 != 0:
        raise DomainError(f"comparison with the uniform measure needs even p, got {p}")
    kernel = KernelSpec.pframe(p, cfg.dim)
    estimate = mc_energy(cfg.dim, kernel, n, seed)
    discrete = three_point_energy(cfg, kernel).value
    excess = estimate.mean - discrete - band * estimate.std_error
    return _report(
        "uniform-comparison",
        max(0.0, excess),
        0.0,
        note=(
            f"uniform {estimate.mean:.6g} +/- {estimate.std_error:.2g}, "
            f"configuration {discrete:.6g}"
        ),
    )


# =============================================================================
# REGISTRY
# =============================================================================

CheckFn = Callable[[WeightedConfig, Optional[float], float], CertReport]


def _with_tol(fn: Callable[..., CertReport]) -> CheckFn:
    def run(cfg: WeightedConfig, tol: Optional[float], eps: float) -> CertReport:
        return fn(cfg) if tol is None else fn(cfg, tol=tol)

    return run


def _packing_check(cfg: WeightedConfig, tol: Optional[float], eps: float) -> CertReport:
    return check_packing(cfg, tol=PACKING_TOL if tol is None else tol).as_cert_report()


def _strict_packing_check(cfg: WeightedConfig, tol: Optional[float], eps: float) -> CertReport:
    report = check_packing(
        cfg, PackingMode.STRICT, eps=eps, tol=PACKING_TOL if tol is None else tol
    )
    return report.as_cert_report()


def _psd_registry_check(cfg: WeightedConfig, tol: Optional[float], eps: float) -> CertReport:
    m_max = 2 if cfg.dim >= 3 else 1
    return psd_check(cfg, m_max, 3, tol=-PSD_EIGEN_TOL if tol is None else tol)


CHECKS: Dict[str, CheckFn] = {
    "isotropic": _with_tol(check_isotropic),
    "balanced": _with_tol(check_balanced),
    "tight-frame": _with_tol(check_tight_frame),
    "packing": _packing_check,
    "packing-strict": _strict_packing_check,
    "nearly-orthogonal": _with_tol(check_nearly_orthogonal),
    "nonneg-triples": _with_tol(check_nonneg_triples),
    "orthogonal-counterpart": _with_tol(check_orthogonal_counterpart),
    "simplex-rigidity": _with_tol(check_simplex_rigidity),
    "psd": _psd_registry_check,
    "sdp-certificate": _with_tol(check_sdp_certificate),
    "rosenfeld": _with_tol(check_rosenfeld_inequality),
    "orthonormal-basis": _with_tol(classify_orthonormal_basis),
    "non-obtuse": _with_tol(check_non_obtuse_structure),
    "two-bases": _with_tol(classify_two_bases),
    "dekster": _with_tol(check_dekster_cap),
    "diameter": _with_tol(check_diameter_bounds),
}


def resolve_check_names(names: Sequence[str]) -> List[str]:
    """Expand "all" and validate names, preserving request order.

    Raises:
        ConfigError: unknown check name
    """
    out: List[str] = []
    for name in names:
        name = name.strip()
        if not name:
            continue
        if name == "all":
            out.extend(CHECKS)
            continue
        if name not in CHECKS:
            known = ", ".join(CHECKS)
            raise ConfigError(f"unknown check {name!r}; known checks: {known}, all")
        out.append(name)
    return out


def run_checks(
    cfg: WeightedConfig,
    names: Sequence[str],
    tol: Optional[float] = None,
    eps: float = DEFAULT_PACKING_EPS,
) -> List[CertReport]:
    """Run the named checks in order.

    Args:
        cfg: configuration to check
        names: check names from CHECKS, or "all"
        tol: overrides every check's default tolerance when given
        eps: margin of the "packing-strict" check, whose products must be <= -eps

    Returns:
        one CertReport per resolved name, in request order

    Raises:
        ConfigError: unknown check name
        DomainError: "packing-strict" requested with eps <= 0

    Example:
        >>> [r.passed for r in run_checks(gen_simplex(3), ["packing", "packing-strict"])]
        [True, True]
    """
    reports = []
    for name in resolve_check_names(names):
        report = CHECKS[name](cfg, tol, eps)
        logger.info(
            "%s: %s (residual %.3g)",
            name,
            "pass" if report.passed else "FAIL",
            report.max_residual,
        )
        reports.append(report)
    return reports
