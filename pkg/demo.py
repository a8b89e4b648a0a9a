#!/usr/bin/env python3
"""Demo: three-point energies of the classical configurations on the sphere.

The triple-product energy sum w_a w_b w_c <x_b,x_c><x_a,x_c><x_a,x_b> equals
Tr(A^3) for the second-moment matrix A, so it is at least 1/d^2 with equality
exactly for isotropic measures. The |uvt|^p energies share that floor for
p <= 1 and the orthonormal basis attains it.
"""

import math

from src.threepoint import (
    KernelSpec,
    LiftSpec,
    OptimizerSettings,
    check_packing,
    gen_crosspolytope,
    gen_orthonormal_basis,
    gen_simplex,
    gen_two_bases,
    lift,
    mc_energy,
    minimize_energy,
    moment_matrix,
    run_checks,
    three_point_energy,
)
from src.threepoint.energy import uniform_energy_closed_form
from src.threepoint.io import format_report_table

D = 3  # sphere S^2

CONFIGS = {
    "orthonormal basis": gen_orthonormal_basis(D),
    "crosspolytope": gen_crosspolytope(D),
    "regular simplex": gen_simplex(D),
}

# =============================================================================
# DEMO: ENERGIES OF THE CANONICAL CONFIGURATIONS
# =============================================================================

print("\n" + "=" * 70)
print(f"THREE-POINT ENERGIES ON S^{D - 1}   (floor 1/d^2 = {1 / D**2:.6f})")
print("=" * 70)

kernels = {
    "uvt": KernelSpec.triple_product(D),
    "|uvt|^0.5": KernelSpec.pframe(0.5, D),
    "|uvt|^1": KernelSpec.pframe(1, D),
    "|uvt|^2": KernelSpec.pframe(2, D),
}

print(f"\n  {'configuration':20s}" + "".join(f"{name:>12s}" for name in kernels))
for label, cfg in CONFIGS.items():
    values = [three_point_energy(cfg, kernel).value for kernel in kernels.values()]
    print(f"  {label:20s}" + "".join(f"{v:12.6f}" for v in values))

uniform = uniform_energy_closed_form(KernelSpec.pframe(2, D))
estimate = mc_energy(D, KernelSpec.pframe(2, D), 200_000, seed=1)
print(f"\n  uniform measure |uvt|^2: {uniform:.6f} exact")
print(f"  sampled: {estimate.mean:.6f} +/- {estimate.std_error:.1e}")

# =============================================================================
# DEMO: CERTIFICATES
# =============================================================================

print("\n" + "=" * 70)
print("CERTIFICATES")
print("=" * 70)

for label, cfg in CONFIGS.items():
    print(f"\n--- {label} ---")
    reports = run_checks(cfg, ["isotropic", "balanced", "packing", "simplex-rigidity", "psd"])
    print(format_report_table(reports))

packing = check_packing(gen_crosspolytope(D))
print(f"\n  crosspolytope: {packing.n_points} points, all distinct triple products <= 0")
print(f"  bound 2d = {packing.bound}")

# =============================================================================
# DEMO: LIFTING AND THE PLANAR TWO-BASES FAMILY
# =============================================================================

print("\n" + "=" * 70)
print("LIFTING S^{d-1} -> S^d")
print("=" * 70)

lifted = lift(LiftSpec(gen_simplex(D)))
residual = moment_matrix(lifted).isotropy_residual()
print(f"\n  simplex on S^{D - 1} lifts to {lifted.n_points} points on S^{lifted.dim - 1}")
print(f"  isotropy residual after lifting: {residual:.2e}")

print("\n  Two planar bases, |uvt| energy (always 1/4):")
for theta in (0.2, math.pi / 8, math.pi / 4):
    for lam in (0.25, 0.5):
        value = three_point_energy(gen_two_bases(theta, lam), KernelSpec.pframe(1, 2)).value
        print(f"    theta={theta:.3f}  lambda={lam:.2f}: {value:.15f}")

# =============================================================================
# DEMO: OPTIMIZER
# =============================================================================

print("\n" + "=" * 70)
print("OPTIMIZER: |uvt|^0.5 with N = d points")
print("=" * 70)

settings = OptimizerSettings(D, D, KernelSpec.pframe(0.5, D), restarts=4, seed=0)
result = minimize_energy(settings)
print(f"\n  best energy: {result.best_energy:.10f}   target 1/d^2 = {1 / D**2:.10f}")
print(f"  converged: {result.converged}, {len(result.energy_trace)} accepted steps")
print(format_report_table(run_checks(result.best_config, ["orthonormal-basis"])))
