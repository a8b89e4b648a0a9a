"""Riemannian minimization of discrete three-point energies on (S^{d-1})^N.

The objective is the kernel energy with |uvt|^p replaced by the smooth
((uvt)^2 + eps^2)^{p/2}. Points live on pymanopt's Oblique manifold, whose
points are matrices with unit columns, so the N x d point matrix travels
transposed. When weights are optimized they are a softmax of free logits on a
Euclidean factor of a Product manifold.

Each smoothing level is one SteepestDescent run with Armijo backtracking,
warm-started from the previous level. We supply the Euclidean gradient
(Gamma + Gamma^T) X, where Gamma collects the kernel's partial derivatives
against each Gram entry; pymanopt projects it onto the tangent space and
retracts by renormalizing. The same machinery minimizes a soft-max of
distinct-triple products for the packing search.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pymanopt
from pymanopt.manifolds import Euclidean, Oblique, Product
from pymanopt.optimizers import SteepestDescent
from pymanopt.optimizers.line_search import BackTrackingLineSearcher
from scipy.special import logsumexp, softmax

from src.threepoint.certify import CertReport, PackingMode, packing_bound
from src.threepoint.data import (
    DEFAULT_ARMIJO_C,
    DEFAULT_BACKTRACK,
    DEFAULT_CONVERGENCE_TOL,
    DEFAULT_INITIAL_STEP,
    DEFAULT_MAX_ITERS,
    DEFAULT_PACKING_EPS,
    DEFAULT_RESTARTS,
    DEFAULT_SMOOTHING_SCHEDULE,
    ENERGY_BOUND_SLACK,
    MIN_STEP,
    PACKING_TOL,
)
from src.threepoint.energy import sample_sphere, three_point_energy
from src.threepoint.errors import (
    ConfigError,
    DimensionMismatchError,
    DomainError,
    KernelError,
    TheoremViolation,
)
from src.threepoint.geometry import WeightedConfig, distinct_triples, gram_matrix, triple_products
from src.threepoint.kernels import KernelKind, KernelSpec

logger = logging.getLogger(__name__)

# (value, point gradient, logit gradient or None)
Evaluation = Tuple[float, np.ndarray, Optional[np.ndarray]]

# pymanopt point: the transposed point matrix, or [transposed points, logits]
ManifoldPoint = Union[np.ndarray, Sequence[np.ndarray]]


# =============================================================================
# SETTINGS AND RESULTS
# =============================================================================

@dataclass(frozen=True)
class OptimizerSettings:
    """Everything that determines an optimizer run.

    Attributes:
        dim: ambient dimension d
        n_points: N
        kernel: objective (PFrame, TripleProduct or PolyUVT)
        optimize_weights: descend on softmax weights as well as positions
        restarts: independent random starts
        max_iters: iteration cap per smoothing level
        smoothing_schedule: strictly decreasing positive eps values
        armijo_c: sufficient-decrease constant
        backtrack: step shrink factor
        initial_step: length of the first step tried at each level
        seed: root of the per-restart seed sequence
        convergence_tol: stop a level once the gradient norm is below this
        threads: restarts run concurrently on this many threads

    Example:
        >>> settings = OptimizerSettings(3, 3, KernelSpec.pframe(0.5, 3), restarts=5)
        >>> dataclasses.replace(settings, seed=7).seed
        7
    """

    dim: int
    n_points: int
    kernel: KernelSpec
    optimize_weights: bool = False
    restarts: int = DEFAULT_RESTARTS
    max_iters: int = DEFAULT_MAX_ITERS
    smoothing_schedule: Tuple[float, ...] = DEFAULT_SMOOTHING_SCHEDULE
    armijo_c: float = DEFAULT_ARMIJO_C
    backtrack: float = DEFAULT_BACKTRACK
    initial_step: float = DEFAULT_INITIAL_STEP
    seed: int = 0
    convergence_tol: float = DEFAULT_CONVERGENCE_TOL
    threads: int = 1

    def __post_init__(self) -> None:
        schedule = tuple(float(e) for e in self.smoothing_schedule)
        object.__setattr__(self, "smoothing_schedule", schedule)
        if self.dim < 2:
            raise ConfigError(f"dimension must be at least 2, got {self.dim}")
        if self.n_points < 1:
            raise ConfigError(f"need at least one point, got {self.n_points}")
        if self.restarts < 1:
            raise ConfigError(f"need at least one restart, got {self.restarts}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be positive, got {self.max_iters}")
        if self.threads < 1:
            raise ConfigError(f"threads must be positive, got {self.threads}")
        if self.kernel.dim != self.dim:
            raise DimensionMismatchError(
                f"kernel is for d={self.kernel.dim}, settings say d={self.dim}"
            )
        _check_schedule(self.smoothing_schedule)
        if not 0.0 < self.backtrack < 1.0 or not 0.0 < self.armijo_c < 1.0:
            raise ConfigError("backtrack and armijo_c must lie in (0, 1)")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["kernel"] = self.kernel.to_dict()
        out["smoothing_schedule"] = list(self.smoothing_schedule)
        return out


def _check_schedule(schedule: Sequence[float]) -> None:
    if not schedule:
        raise ConfigError("smoothing schedule is empty")
    if any(e <= 0 for e in schedule):
        raise ConfigError("smoothing values must be positive")
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise ConfigError("smoothing values must be strictly decreasing")


@dataclass(frozen=True)
class TraceEntry:
    """One accepted step: global iteration, smoothing level, smoothed objective."""

    iteration: int
    epsilon: float
    energy: float


@dataclass(frozen=True)
class RestartSummary:
    index: int
    spawn_key: Tuple[int, ...]
    final_energy: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class OptimizerResult:
    """Best configuration over all restarts.

    Attributes:
        best_config: final configuration of the best restart
        best_energy: its unsmoothed energy
        energy_trace: accepted steps of the best restart
        restarts_summary: one entry per restart, in restart order
        converged: the best restart's last level stopped on the gradient norm
            or on a vanishing step, not on max_iters
        settings: the settings that produced this result
    """

    best_config: WeightedConfig
    best_energy: float
    energy_trace: List[TraceEntry]
    restarts_summary: List[RestartSummary]
    converged: bool
    settings: OptimizerSettings

    def to_dict(self) -> dict:
        return {
            "best_config": self.best_config.to_dict(),
            "best_energy": self.best_energy,
            "converged": self.converged,
            "energy_trace": [asdict(entry) for entry in self.energy_trace],
            "restarts_summary": [
                {**asdict(s), "spawn_key": list(s.spawn_key)} for s in self.restarts_summary
            ],
            "settings": self.settings.to_dict(),
        }


@dataclass(frozen=True)
class PackingSearchResult:
    """Best packing found.

    Attributes:
        config: final points of the best restart (uniform weights)
        minimax: its exact largest distinct-triple product
        worst_triple: indices attaining `minimax`
        bound: size bound of the requested hypothesis
        strict: products were required to be <= -epsilon instead of <= 0
        epsilon: strict margin (0 in the nonpositive mode)
        passed: `minimax` meets the requested hypothesis
        restarts_summary: one entry per restart; final_energy is its minimax
    """

    config: WeightedConfig
    minimax: float
    worst_triple: Tuple[int, int, int]
    bound: int
    strict: bool
    epsilon: float
    passed: bool
    restarts_summary: List[RestartSummary] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "minimax": self.minimax,
            "worst_triple": list(self.worst_triple),
            "bound": self.bound,
            "strict": self.strict,
            "epsilon": self.epsilon,
            "passed": self.passed,
            "restarts_summary": [
                {**asdict(s), "spawn_key": list(s.spawn_key)} for s in self.restarts_summary
            ],
        }


# =============================================================================
# SMOOTHED KERNELS
# =============================================================================

def _kernel_parts(
    kernel: KernelSpec, eps: float, u: np.ndarray, v: np.ndarray, t: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Smoothed kernel value and its partials in (u, v, t)."""
    if kernel.kind is KernelKind.PFRAME:
        assert kernel.p is not None
        p = kernel.p
        s = u * v * t
        r = s * s + eps * eps
        phi = r ** (p / 2.0)
        ds = p * s * r ** (p / 2.0 - 1.0)
        return phi, ds * v * t, ds * u * t, ds * u * v
    if kernel.kind is KernelKind.TRIPLE_PRODUCT:
        return u * v * t, v * t, u * t, u * v
    if kernel.kind is KernelKind.POLY:
        phi = np.zeros(np.broadcast(u, v, t).shape)
        du, dv, dt = np.zeros_like(phi), np.zeros_like(phi), np.zeros_like(phi)
        for (a, b, c), coef in kernel.monomials:
            phi = phi + coef * u**a * v**b * t**c
            if a:
                du = du + coef * a * u ** (a - 1) * v**b * t**c
            if b:
                dv = dv + coef * b * u**a * v ** (b - 1) * t**c
            if c:
                dt = dt + coef * c * u**a * v**b * t ** (c - 1)
        return phi, du, dv, dt
    raise KernelError(f"{kernel.describe()} cannot be smoothed for optimization")


def project_tangent(points: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Row-wise g - <g, x> x."""
    return grad - np.sum(grad * points, axis=1, keepdims=True) * points


def _triple_tensors(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """u[a,b,c] = G[b,c], v[a,b,c] = G[a,c], t[a,b,c] = G[a,b]."""
    gram = points @ points.T
    return gram[None, :, :], gram[:, None, :], gram[:, :, None]


def smoothed_energy(
    points: np.ndarray, weights: np.ndarray, kernel: KernelSpec, eps: float
) -> float:
    u, v, t = _triple_tensors(points)
    phi = _kernel_parts(kernel, eps, u, v, t)[0]
    w3 = weights[:, None, None] * weights[None, :, None] * weights[None, None, :]
    return float(np.sum(w3 * phi))


def _energy_parts(
    points: np.ndarray,
    logits: np.ndarray,
    kernel: KernelSpec,
    eps: float,
    with_weights: bool,
) -> Evaluation:
    """Smoothed energy with its Euclidean gradients in the points and, optionally, the logits."""
    w = softmax(logits)
    u, v, t = _triple_tensors(points)
    phi, du, dv, dt = _kernel_parts(kernel, eps, u, v, t)
    w3 = w[:, None, None] * w[None, :, None] * w[None, None, :]
    value = float(np.sum(w3 * phi))

    # coefficient of dG[b,c], dG[a,c], dG[a,b] respectively
    gamma = (w3 * du).sum(axis=0) + (w3 * dv).sum(axis=1) + (w3 * dt).sum(axis=2)
    grad_points = (gamma + gamma.T) @ points

    grad_logits = None
    if with_weights:
        phi = np.broadcast_to(phi, w3.shape)
        gw = (
            np.einsum("abc,b,c->a", phi, w, w)
            + np.einsum("abc,a,c->b", phi, w, w)
            + np.einsum("abc,a,b->c", phi, w, w)
        )
        grad_logits = w * (gw - float(w @ gw))
    return value, grad_points, grad_logits


def smoothed_energy_grad(
    points: np.ndarray,
    logits: np.ndarray,
    kernel: KernelSpec,
    eps: float,
    with_weights: bool,
) -> Evaluation:
    """Smoothed energy with its Riemannian point gradient and (optionally) logit gradient."""
    value, grad_points, grad_logits = _energy_parts(points, logits, kernel, eps, with_weights)
    return value, project_tangent(points, grad_points), grad_logits


# =============================================================================
# DESCENT
# =============================================================================

@dataclass(frozen=True)
class _Level:
    """Objective at one smoothing level, in (points, logits) coordinates."""

    epsilon: float
    value: Callable[[np.ndarray, np.ndarray], float]
    gradient: Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, Optional[np.ndarray]]]


def _manifold(d: int, n: int, with_weights: bool) -> Any:
    points = Oblique(d, n)
    return Product([points, Euclidean(n)]) if with_weights else points


def _weighted_problem(manifold: Any, level: _Level) -> pymanopt.Problem:
    @pymanopt.function.numpy(manifold)
    def cost(xt: np.ndarray, z: np.ndarray) -> float:
        return level.value(xt.T, z)

    @pymanopt.function.numpy(manifold)
    def euclidean_gradient(xt: np.ndarray, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        grad_points, grad_logits = level.gradient(xt.T, z)
        assert grad_logits is not None
        return grad_points.T, grad_logits

    return pymanopt.Problem(manifold, cost, euclidean_gradient=euclidean_gradient)


def _positions_problem(manifold: Any, level: _Level, logits: np.ndarray) -> pymanopt.Problem:
    @pymanopt.function.numpy(manifold)
    def cost(xt: np.ndarray) -> float:
        return level.value(xt.T, logits)

    @pymanopt.function.numpy(manifold)
    def euclidean_gradient(xt: np.ndarray) -> np.ndarray:
        return level.gradient(xt.T, logits)[0].T

    return pymanopt.Problem(manifold, cost, euclidean_gradient=euclidean_gradient)


def _problem(
    manifold: Any, level: _Level, logits: np.ndarray, with_weights: bool
) -> pymanopt.Problem:
    """Logits are optimized with_weights; otherwise they stay fixed at `logits`."""
    if with_weights:
        return _weighted_problem(manifold, level)
    return _positions_problem(manifold, level, logits)


def _to_point(points: np.ndarray, logits: np.ndarray, with_weights: bool) -> ManifoldPoint:
    xt = np.ascontiguousarray(points.T)
    return [xt, np.array(logits)] if with_weights else xt


def _from_point(
    point: ManifoldPoint, logits: np.ndarray, with_weights: bool
) -> Tuple[np.ndarray, np.ndarray]:
    if with_weights:
        xt, z = point
        return np.array(xt).T.copy(), np.array(z)
    return np.array(point).T.copy(), logits


def _optimizer(settings: OptimizerSettings) -> SteepestDescent:
    line_searcher = BackTrackingLineSearcher(
        contraction_factor=settings.backtrack,
        sufficient_decrease=settings.armijo_c,
        initial_step_size=settings.initial_step,
    )
    return SteepestDescent(
        line_searcher=line_searcher,
        max_iterations=settings.max_iters,
        min_gradient_norm=settings.convergence_tol,
        min_step_size=MIN_STEP,
        max_time=math.inf,
        verbosity=0,
        log_verbosity=2,
    )


def _descend(
    problem: pymanopt.Problem,
    point: ManifoldPoint,
    epsilon: float,
    settings: OptimizerSettings,
    trace: List[TraceEntry],
    start_iteration: int,
) -> Tuple[ManifoldPoint, int, bool]:
    """One SteepestDescent run; returns (point, accepted steps, converged).

    The optimizer logs the cost at the start of every iteration, so every
    logged cost after the first belongs to an accepted step. Backtracking
    never accepts an increase, so the trace is non-increasing.
    """
    result = _optimizer(settings).run(problem, initial_point=point)
    costs = result.log["iterations"]["cost"]
    for k, value in enumerate(costs[1:], start=1):
        trace.append(TraceEntry(start_iteration + k, epsilon, float(value)))
    converged = result.gradient_norm < settings.convergence_tol or result.step_size < MIN_STEP
    return result.point, len(costs) - 1, bool(converged)


@dataclass(frozen=True)
class _Outcome:
    index: int
    spawn_key: Tuple[int, ...]
    points: np.ndarray
    weights: np.ndarray
    trace: List[TraceEntry]
    iterations: int
    converged: bool


def _anneal(
    points: np.ndarray,
    logits: np.ndarray,
    levels: Sequence[_Level],
    settings: OptimizerSettings,
) -> Tuple[np.ndarray, np.ndarray, List[TraceEntry], int, bool]:
    with_weights = settings.optimize_weights
    manifold = _manifold(settings.dim, settings.n_points, with_weights)
    point = _to_point(points, logits, with_weights)
    trace: List[TraceEntry] = []
    total = 0
    converged = False
    for level in levels:
        problem = _problem(manifold, level, logits, with_weights)
        point, steps, converged = _descend(problem, point, level.epsilon, settings, trace, total)
        total += steps
        logger.debug("eps=%.1e: %d steps, converged=%s", level.epsilon, steps, converged)
    points, logits = _from_point(point, logits, with_weights)
    return points, logits, trace, total, converged


def _energy_level(kernel: KernelSpec, eps: float, with_weights: bool) -> _Level:
    def gradient(x: np.ndarray, z: np.ndarray) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        _, grad_points, grad_logits = _energy_parts(x, z, kernel, eps, with_weights)
        return grad_points, grad_logits

    return _Level(
        epsilon=eps,
        value=lambda x, z: smoothed_energy(x, softmax(z), kernel, eps),
        gradient=gradient,
    )


def _energy_levels(settings: OptimizerSettings) -> List[_Level]:
    schedule = settings.smoothing_schedule
    if settings.kernel.kind is not KernelKind.PFRAME:
        schedule = schedule[-1:]  # already smooth; eps is ignored
    return [_energy_level(settings.kernel, eps, settings.optimize_weights) for eps in schedule]


def _check_smoothable(kernel: KernelSpec) -> None:
    if not kernel.is_smoothable:
        raise KernelError(
            f"{kernel.describe()} is not supported by the optimizer; "
            "use a p-frame, triple-product or polynomial kernel"
        )


def guard_energy_bound(kernel: KernelSpec, energy: float) -> None:
    """Raise if an energy contradicts the 1/d^2 lower bound (uvt, or |uvt|^p with p <= 1)."""
    bounded = kernel.kind is KernelKind.TRIPLE_PRODUCT or (
        kernel.kind is KernelKind.PFRAME and kernel.p is not None and kernel.p <= 1.0
    )
    floor = 1.0 / kernel.dim**2
    if not bounded or energy >= floor - 1e-12:
        return
    if energy < floor - ENERGY_BOUND_SLACK:
        raise TheoremViolation(
            f"{kernel.describe()} energy {energy:.17g} is below 1/d^2 = {floor:.17g}"
        )
    logger.warning(
        "%s energy %.17g is below 1/d^2 by %.3g", kernel.describe(), energy, floor - energy
    )


def _restart_seeds(seed: int, restarts: int) -> List[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(restarts)


def _map_restarts(run: Callable, seeds: Sequence[np.random.SeedSequence], threads: int) -> List:
    jobs = list(enumerate(seeds))
    if threads <= 1 or len(jobs) < 2:
        return [run(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, jobs))


def minimize_energy(settings: OptimizerSettings) -> OptimizerResult:
    """Best configuration over `settings.restarts` annealed descents.

    Restart i starts from uniform points drawn with the i-th child of
    SeedSequence(settings.seed), so results do not depend on the thread count.

    Args:
        settings: kernel, sizes, schedule, line-search constants and seed

    Returns:
        OptimizerResult whose energy is the unsmoothed kernel energy of the
        best final configuration; ties go to the lower restart index

    Raises:
        KernelError: S-entry or cone kernel
        TheoremViolation: a restart ends below the 1/d^2 bound

    Example:
        >>> result = minimize_energy(OptimizerSettings(2, 2, KernelSpec.triple_product(2)))
        >>> round(result.best_energy, 9)
        0.25
    """
    kernel = settings.kernel
    _check_smoothable(kernel)
    levels = _energy_levels(settings)
    n, d = settings.n_points, settings.dim

    def run(job: Tuple[int, np.random.SeedSequence]) -> Tuple[_Outcome, float]:
        index, seq = job
        rng = np.random.default_rng(seq)
        points = sample_sphere(rng, n, d)
        logits = np.zeros(n)
        points, logits, trace, iters, converged = _anneal(points, logits, levels, settings)
        weights = softmax(logits)
        energy = three_point_energy(WeightedConfig(points, weights), kernel).value
        guard_energy_bound(kernel, energy)
        logger.info("restart %d: energy %.12g after %d iterations", index, energy, iters)
        outcome = _Outcome(index, tuple(seq.spawn_key), points, weights, trace, iters, converged)
        return outcome, energy

    results = _map_restarts(run, _restart_seeds(settings.seed, settings.restarts), settings.threads)
    best, best_energy = min(results, key=lambda item: (item[1], item[0].index))
    summary = [
        RestartSummary(o.index, o.spawn_key, e, o.iterations, o.converged) for o, e in results
    ]
    best_config = WeightedConfig(best.points, best.weights)
    return OptimizerResult(
        best_config=best_config,
        best_energy=three_point_energy(best_config, kernel).value,
        energy_trace=best.trace,
        restarts_summary=summary,
        converged=best.converged,
        settings=settings,
    )


# =============================================================================
# PACKING SEARCH
# =============================================================================

def _soft_max_parts(
    points: np.ndarray, triples: np.ndarray, tau: float, with_grad: bool
) -> Tuple[float, Optional[np.ndarray]]:
    gram = points @ points.T
    i, j, k = triples[:, 0], triples[:, 1], triples[:, 2]
    gij, gik, gjk = gram[i, j], gram[i, k], gram[j, k]
    scaled = gij * gik * gjk / tau
    value = tau * float(logsumexp(scaled))
    if not with_grad:
        return value, None
    pi = softmax(scaled)
    gamma = np.zeros_like(gram)
    np.add.at(gamma, (i, j), pi * gik * gjk)
    np.add.at(gamma, (i, k), pi * gij * gjk)
    np.add.at(gamma, (j, k), pi * gij * gik)
    return value, (gamma + gamma.T) @ points


def soft_max_products(
    points: np.ndarray, triples: np.ndarray, tau: float, with_grad: bool = True
) -> Tuple[float, Optional[np.ndarray]]:
    """tau * log sum_t exp(s_t / tau) over distinct-triple products s_t.

    With with_grad, also returns the Riemannian gradient with respect to the points.
    """
    value, grad = _soft_max_parts(points, triples, tau, with_grad)
    if grad is None:
        return value, None
    return value, project_tangent(points, grad)


def _packing_level(triples: np.ndarray, tau: float) -> _Level:
    def gradient(x: np.ndarray, z: np.ndarray) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        grad = _soft_max_parts(x, triples, tau, with_grad=True)[1]
        assert grad is not None
        return grad, None

    return _Level(
        epsilon=tau,
        value=lambda x, z: _soft_max_parts(x, triples, tau, with_grad=False)[0],
        gradient=gradient,
    )


def guard_packing(d: int, n: int, minimax: float, eps: float = PACKING_TOL) -> None:
    """Raise if a search result contradicts a packing size bound.

    Largest product <= 0 allows at most 2d points; <= -eps allows at most
    min(d + 1, floor(1 + 1/eps)). With the default eps, products within
    1e-12 of zero do not count as strictly negative.
    """
    if minimax <= 0.0 and n > 2 * d:
        raise TheoremViolation(
            f"{n} points on S^{d - 1} with all triple products <= 0 (bound {2 * d})"
        )
    bound = packing_bound(d, PackingMode.STRICT, eps)
    if minimax < -eps and n > bound:
        raise TheoremViolation(
            f"{n} points on S^{d - 1} with all triple products < {-eps:.3g} (bound {bound})"
        )


def search_packing(
    d: int,
    n: int,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    strict: bool = False,
    max_iters: int = DEFAULT_MAX_ITERS,
    temperatures: Sequence[float] = DEFAULT_SMOOTHING_SCHEDULE,
    threads: int = 1,
    eps: float = DEFAULT_PACKING_EPS,
) -> PackingSearchResult:
    """Minimize the largest distinct-triple product over n points on S^{d-1}.

    Each restart anneals a soft-max of the products through `temperatures`;
    the best restart is chosen by the exact largest product. The nonpositive
    mode accepts a result whose largest product is <= 0; the strict mode
    needs <= -eps and reports the bound min(d + 1, floor(1 + 1/eps)).

    Args:
        d: ambient dimension
        n: number of points, at least 3
        restarts: independent random starts
        seed: root of the per-restart seed sequence
        strict: require products <= -eps instead of <= 0
        max_iters: iteration cap per temperature
        temperatures: strictly decreasing soft-max temperatures
        threads: restarts run concurrently on this many threads
        eps: strict margin, ignored unless `strict`

    Returns:
        PackingSearchResult of the restart with the smallest largest product

    Raises:
        DomainError: n < 3, or strict with eps <= 0
        TheoremViolation: the result beats a proven size bound

    Example:
        >>> result = search_packing(3, 4, restarts=10, seed=4, strict=True, eps=1e-3)
        >>> result.passed, result.bound
        (True, 4)
    """
    if n < 3:
        raise DomainError(f"packing search needs at least 3 points, got {n}")
    if strict and not eps > 0:
        raise DomainError(f"strict packing search needs eps > 0, got {eps}")
    _check_schedule(temperatures)
    settings = OptimizerSettings(
        dim=d,
        n_points=n,
        kernel=KernelSpec.triple_product(d),
        restarts=restarts,
        max_iters=max_iters,
        smoothing_schedule=tuple(temperatures),
        seed=seed,
        threads=threads,
    )
    triples = distinct_triples(n)
    levels = [_packing_level(triples, tau) for tau in settings.smoothing_schedule]

    def run(job: Tuple[int, np.random.SeedSequence]) -> Tuple[_Outcome, float]:
        index, seq = job
        rng = np.random.default_rng(seq)
        points = sample_sphere(rng, n, d)
        logits = np.zeros(n)
        points, logits, trace, iters, converged = _anneal(points, logits, levels, settings)
        products = triple_products(gram_matrix(WeightedConfig(points)), triples)
        minimax = float(products.max())
        guard_packing(d, n, minimax)
        if strict:
            guard_packing(d, n, minimax, eps)
        logger.info("packing restart %d: max product %.6g", index, minimax)
        weights = softmax(logits)
        outcome = _Outcome(index, tuple(seq.spawn_key), points, weights, trace, iters, converged)
        return outcome, minimax

    results = _map_restarts(run, _restart_seeds(seed, restarts), threads)
    best, _ = min(results, key=lambda item: (item[1], item[0].index))
    config = WeightedConfig(best.points)
    products = triple_products(gram_matrix(config), triples)
    k = int(np.argmax(products))
    minimax = float(products[k])
    mode = PackingMode.STRICT if strict else PackingMode.NONPOSITIVE
    margin = eps if strict else 0.0
    return PackingSearchResult(
        config=config,
        minimax=minimax,
        worst_triple=(int(triples[k, 0]), int(triples[k, 1]), int(triples[k, 2])),
        bound=packing_bound(d, mode, margin),
        strict=strict,
        epsilon=margin,
        passed=minimax <= -margin + PACKING_TOL,
        restarts_summary=[
            RestartSummary(o.index, o.spawn_key, v, o.iterations, o.converged) for o, v in results
        ],
    )


# =============================================================================
# GRADIENT CHECK
# =============================================================================

def _random_ambient(
    rng: np.random.Generator, d: int, n: int, with_weights: bool
) -> ManifoldPoint:
    xt = rng.standard_normal((d, n))
    return [xt, rng.standard_normal(n)] if with_weights else xt


def gradient_check(
    settings: OptimizerSettings,
    cfg: WeightedConfig,
    epsilon_fd: float = 1e-6,
    smoothing: Optional[float] = None,
    n_directions: int = 8,
    seed: int = 0,
    tol: float = 1e-5,
) -> CertReport:
    """Riemannian gradient of the optimizer's pymanopt problem against central differences.

    Along random unit tangent directions xi, compares <grad, xi> with
    (f(R(x, h xi)) - f(R(x, -h xi))) / 2h, R the manifold's retraction. The
    error is relative to the gradient norm. Smoothing defaults to the last
    level of the schedule. Without optimize_weights the energy is taken at
    the configuration's own weights.

    Raises:
        KernelError: kernel not smoothable
        DimensionMismatchError: configuration dimension differs from the settings
    """
    kernel = settings.kernel
    _check_smoothable(kernel)
    if cfg.dim != settings.dim:
        raise DimensionMismatchError(
            f"configuration has d={cfg.dim}, settings say d={settings.dim}"
        )
    eps = settings.smoothing_schedule[-1] if smoothing is None else smoothing
    with_weights = settings.optimize_weights
    d, n = cfg.dim, cfg.n_points
    logits = np.log(np.maximum(cfg.weights, 1e-300))
    manifold = _manifold(d, n, with_weights)
    problem = _problem(manifold, _energy_level(kernel, eps, with_weights), logits, with_weights)
    point = _to_point(np.array(cfg.points), logits, with_weights)

    grad = problem.riemannian_gradient(point)
    scale = float(manifold.norm(point, grad))
    rng = np.random.default_rng(seed)
    h = epsilon_fd
    worst = 0.0
    for _ in range(n_directions):
        xi = manifold.projection(point, _random_ambient(rng, d, n, with_weights))
        xi = xi * (1.0 / float(manifold.norm(point, xi)))
        plus = problem.cost(manifold.retraction(point, xi * h))
        minus = problem.cost(manifold.retraction(point, xi * -h))
        fd = (plus - minus) / (2 * h)
        error = abs(fd - float(manifold.inner_product(point, grad, xi)))
        worst = max(worst, error / scale if scale > 0 else error)
    return CertReport(
        name="gradient",
        passed=worst <= tol,
        max_residual=worst,
        tolerance=tol,
        note=f"{kernel.describe()}, eps={eps:g}, h={epsilon_fd:g}",
    )
