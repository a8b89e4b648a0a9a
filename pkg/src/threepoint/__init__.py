"""Three-point energies on the unit sphere S^{d-1}.

Evaluates discrete energies sum w_a w_b w_c K(x_a, x_b, x_c) for potentials
that depend on the Gram triple of the points, verifies the hypotheses and
conclusions of the minimization and packing results around them, and
searches numerically for minimizers.
"""

__version__ = "0.1.0"

from src.threepoint.geometry import WeightedConfig, GramTriple, gram_triple, validate_config
from src.threepoint.gegenbauer import gegenbauer_all, gegenbauer_eval
from src.threepoint.kernels import (
    KernelKind,
    KernelSpec,
    PsdBlock,
    evaluate,
    q_kernel,
    s_kernel,
    y_kernel,
)
from src.threepoint.energy import (
    EnergyReport,
    McEstimate,
    mc_energy,
    moment_matrix,
    s_moment_matrix,
    three_point_energy,
    trace_cubed,
)
from src.threepoint.construct import (
    LiftSpec,
    gen_crosspolytope,
    gen_orthonormal_basis,
    gen_random,
    gen_simplex,
    gen_two_bases,
    lift,
)
from src.threepoint.certify import CertReport, PackingMode, check_packing, run_checks
from src.threepoint.optimize import (
    OptimizerResult,
    OptimizerSettings,
    minimize_energy,
    search_packing,
)

__all__ = [
    # Geometry
    "WeightedConfig",
    "GramTriple",
    "gram_triple",
    "validate_config",
    # Gegenbauer
    "gegenbauer_all",
    "gegenbauer_eval",
    # Kernels
    "KernelKind",
    "KernelSpec",
    "PsdBlock",
    "evaluate",
    "q_kernel",
    "s_kernel",
    "y_kernel",
    # Energies
    "EnergyReport",
    "McEstimate",
    "mc_energy",
    "moment_matrix",
    "s_moment_matrix",
    "three_point_energy",
    "trace_cubed",
    # Constructions
    "LiftSpec",
    "lift",
    "gen_orthonormal_basis",
    "gen_crosspolytope",
    "gen_simplex",
    "gen_two_bases",
    "gen_random",
    # Certificates
    "CertReport",
    "PackingMode",
    "check_packing",
    "run_checks",
    # Optimizer
    "OptimizerSettings",
    "OptimizerResult",
    "minimize_energy",
    "search_packing",
]
