"""Shared tolerances and defaults - Single Source of Truth.

Every numeric threshold used across the package lives here so that the
verifiers, the optimizer and the command line agree on what "equal",
"orthogonal" and "on the sphere" mean.
"""

from __future__ import annotations

import os

# =============================================================================
# GEOMETRY
# =============================================================================

NORMALIZATION_TOL = 1e-9  # re-normalize vectors whose norm is off by less than this
OFF_SPHERE_TOL = 1e-6  # reject input points whose norm is off by more than this
WEIGHT_SUM_TOL = 1e-6  # reject input weights whose sum is off by more than this
SUPPORT_WEIGHT_EPS = 1e-15  # weights at or below this are outside the support
DUPLICATE_TOL = 1e-9  # Euclidean distance below which two points are "the same"
CAP_CENTER_MIN_NORM = 1e-9  # Euclidean ball center shorter than this -> no cap
INNER_PRODUCT_SLACK = 1e-12  # allowed overshoot of |<x, y>| beyond 1

# =============================================================================
# KERNELS / SEMIDEFINITE BLOCKS
# =============================================================================

BLOCK_EIGEN_TOL = -1e-10  # PSD block acceptance (smallest eigenvalue)
PSD_EIGEN_TOL = -1e-8  # S-moment matrices acceptance (smallest eigenvalue)
MAX_S_MOMENT_SIZE = 6  # cost control for s_moment_matrix
DEFAULT_PSD_CHECK_SIZE = 4  # leading submatrix size checked by default

# =============================================================================
# CERTIFICATES
# =============================================================================

ISOTROPY_TOL = 1e-9
BALANCE_TOL = 1e-9
TIGHT_FRAME_TOL = 1e-8
ORTHOGONALITY_TOL = 1e-6
IDENTITY_TOL = 1e-10
STRUCTURE_TOL = 1e-4  # Gram-matrix classification of optimizer output
DIAMETER_TOL = 1e-6
ENERGY_BOUND_SLACK = 1e-9  # how far below 1/d^2 an energy may fall before aborting
PACKING_TOL = 1e-12  # distinct-triple products up to this count as nonpositive
DEFAULT_PACKING_EPS = 1e-6  # strict mode: products must stay at or below -eps
RIGIDITY_TOL = 1e-9
MC_SIGMA_BAND = 4.0  # standard errors allowed in Monte-Carlo comparisons

# =============================================================================
# OPTIMIZER
# =============================================================================

DEFAULT_SMOOTHING_SCHEDULE = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)
DEFAULT_RESTARTS = 20
DEFAULT_MAX_ITERS = 2_000  # per smoothing level
DEFAULT_CONVERGENCE_TOL = 1e-10  # on the Riemannian gradient norm
DEFAULT_ARMIJO_C = 1e-4
DEFAULT_BACKTRACK = 0.5
DEFAULT_INITIAL_STEP = 1.0
MIN_STEP = 1e-16

# =============================================================================
# MONTE CARLO
# =============================================================================

MC_CHUNK = 100_000  # triples drawn per batch
MC_GENERATOR = "numpy.random.PCG64"  # recorded in estimates and manifests

# =============================================================================
# RUNTIME
# =============================================================================

THREADS_ENV_VAR = "THREEPOINT_THREADS"


def default_threads() -> int:
    """Thread count from the environment, 1 when unset or malformed."""
    raw = os.environ.get(THREADS_ENV_VAR, "")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)
