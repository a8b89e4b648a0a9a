"""Tests for the verifiers: identities, semidefiniteness, packing and structure."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.threepoint.certify import (
    CHECKS,
    PackingMode,
    check_balanced,
    check_dekster_cap,
    check_diameter_bounds,
    check_identity_rosen,
    check_identity_uvt,
    check_isotropic,
    check_nearly_orthogonal,
    check_non_obtuse_structure,
    check_nonneg_triples,
    check_orthogonal_counterpart,
    check_packing,
    check_rosenfeld_inequality,
    check_sdp_certificate,
    check_simplex_rigidity,
    check_tight_frame,
    classify_orthonormal_basis,
    classify_two_bases,
    compare_with_uniform,
    packing_bound,
    psd_check,
    resolve_check_names,
    rosen_identity_residuals,
    rosenfeld_terms,
    run_checks,
    uvt_identity_residual,
)
from src.threepoint.construct import (
    SHAPES,
    LiftSpec,
    gen_crosspolytope,
    gen_simplex,
    gen_two_bases,
    lift,
)
from src.threepoint.errors import ConfigError, DomainError, TheoremViolation
from src.threepoint.geometry import WeightedConfig

cube = st.floats(min_value=-1.0, max_value=1.0)


def cross_plus(d: int) -> WeightedConfig:
    """Crosspolytope with (1, ..., 1)/sqrt(d) appended."""
    extra = np.ones((1, d)) / math.sqrt(d)
    return WeightedConfig(np.vstack([gen_crosspolytope(d).points, extra]))


# =============================================================================
# Polynomial identities
# =============================================================================

class TestIdentities:
    @pytest.mark.parametrize("d", range(2, 11))
    def test_rosen_identities_on_cube(self, d):
        report = check_identity_rosen(d, n_samples=1000, seed=d)
        assert report.passed
        assert report.max_residual <= 1e-10

    @pytest.mark.parametrize("d", range(2, 11))
    def test_uvt_identity_on_cube(self, d):
        report = check_identity_uvt(d, n_samples=1000, seed=d)
        assert report.passed
        assert len(report.witness) == 3

    @pytest.mark.parametrize("point", [(0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (-1.0, 0.5, 0.25)])
    def test_fixed_points(self, point):
        u, v, t = (np.array([x]) for x in point)
        first, second = rosen_identity_residuals(4, u, v, t)
        assert first[0] <= 1e-12
        assert second[0] <= 1e-12
        assert uvt_identity_residual(4, u, v, t)[0] <= 1e-12

    @settings(max_examples=200, deadline=None)
    @given(d=st.integers(min_value=2, max_value=12), u=cube, v=cube, t=cube)
    def test_uvt_identity_anywhere(self, d, u, v, t):
        assert uvt_identity_residual(d, np.array([u]), np.array([v]), np.array([t]))[0] <= 1e-10

    def test_bad_arguments(self):
        with pytest.raises(DomainError):
            check_identity_rosen(1, 10, seed=0)
        with pytest.raises(DomainError):
            check_identity_uvt(3, 0, seed=0)

    def test_reproducible(self):
        a = check_identity_uvt(5, 1000, seed=7)
        b = check_identity_uvt(5, 1000, seed=7)
        assert a == b


# =============================================================================
# Positive semidefiniteness
# =============================================================================

class TestPsdCheck:
    @pytest.mark.parametrize("fixture", ["onb3", "cross3", "simplex3", "random_config"])
    def test_moment_matrices_are_psd(self, fixture, request):
        report = psd_check(request.getfixturevalue(fixture), m_max=2, size=4)
        assert report.passed
        assert report.name == "psd"

    def test_negated_matrices_fail(self, onb3):
        """S_0[0,0] is the constant-kernel energy 1, so the negated block has eigenvalue <= -1."""
        report = psd_check(onb3, m_max=0, size=2, negate=True)
        assert not report.passed
        assert report.max_residual >= 1.0 - 1e-12
        assert report.witness == (0,)

    def test_planar_level_two_rejected(self, mercedes):
        with pytest.raises(DomainError):
            psd_check(mercedes, m_max=2)

    def test_size_limit(self, onb3):
        with pytest.raises(DomainError):
            psd_check(onb3, m_max=0, size=7)

    def test_sdp_certificate_nonnegative(self, random_config, simplex3):
        assert check_sdp_certificate(random_config).passed
        assert check_sdp_certificate(simplex3).passed


# =============================================================================
# Moments
# =============================================================================

class TestMoments:
    def test_isotropic(self, onb3, cross3, random_config):
        assert check_isotropic(onb3).passed
        assert check_isotropic(cross3).passed
        assert not check_isotropic(random_config).passed

    def test_balanced(self, onb3, simplex3):
        """The basis has mean (1,1,1)/3 of length 1/sqrt(3)."""
        report = check_balanced(onb3)
        assert not report.passed
        assert report.max_residual == pytest.approx(1 / math.sqrt(3), abs=1e-15)
        assert check_balanced(simplex3).passed

    def test_tight_frame_uniform(self, simplex3):
        """Frame sum 4 + 12/9 = 16/3 = N^2/d."""
        report = check_tight_frame(simplex3)
        assert report.passed
        assert report.note is None

    def test_tight_frame_weighted(self, random_config):
        """Unequal weights on two rotated bases still give sum w w t^2 = 1/2."""
        report = check_tight_frame(gen_two_bases(math.pi / 4, 0.3))
        assert report.passed
        assert report.note.startswith("weighted")
        report = check_tight_frame(random_config)
        assert not report.passed
        assert report.note.startswith("weighted")


# =============================================================================
# Packing
# =============================================================================

class TestPacking:
    @pytest.mark.parametrize("d", range(2, 7))
    def test_crosspolytope_attains_bound(self, d):
        report = check_packing(gen_crosspolytope(d))
        assert report.passed
        assert report.n_points == 2 * d
        assert report.bound == 2 * d

    @pytest.mark.parametrize("d", range(2, 7))
    def test_simplex_strict(self, d):
        """Every distinct product is (-1/d)^3, so eps = 1/d^3 is attained exactly."""
        report = check_packing(gen_simplex(d), PackingMode.STRICT, eps=1.0 / d**3)
        assert report.passed
        assert report.bound == d + 1
        assert report.worst_product == pytest.approx(-1.0 / d**3, abs=1e-14)

    @pytest.mark.parametrize("d", range(2, 6))
    def test_extra_point_fails(self, d):
        """<e1,-e1><e1,x><-e1,x> = (-1)(1/sqrt d)(-1/sqrt d) = 1/d."""
        report = check_packing(cross_plus(d))
        assert not report.passed
        assert report.worst_product == pytest.approx(1.0 / d, abs=1e-12)

    def test_passing_oversized_set_is_a_violation(self):
        with pytest.raises(TheoremViolation):
            check_packing(cross_plus(3), tol=10.0)

    def test_strict_needs_margin(self, simplex3):
        with pytest.raises(DomainError):
            check_packing(simplex3, PackingMode.STRICT, eps=0.0)

    def test_fewer_than_three_points_vacuous(self):
        report = check_packing(WeightedConfig(np.eye(2)))
        assert report.passed
        assert report.bound is None
        assert report.as_cert_report().note.startswith("vacuous")

    def test_duplicates_merged(self):
        points = np.vstack([np.eye(3), [[1.0, 0.0, 0.0]]])
        report = check_packing(WeightedConfig(points))
        assert report.n_points == 3
        assert report.passed

    def test_bounds(self):
        """min(d + 1, floor(1 + 1/eps)): eps = 1/2 allows 3 points even for d = 5."""
        assert packing_bound(4, PackingMode.NONPOSITIVE) == 8
        assert packing_bound(5, PackingMode.STRICT, 0.5) == 3
        assert packing_bound(3, PackingMode.STRICT, 1.0 / 27) == 4

    def test_cert_report_names(self, simplex3):
        assert check_packing(simplex3).as_cert_report().name == "packing"
        strict = check_packing(simplex3, PackingMode.STRICT, eps=1e-3).as_cert_report()
        assert strict.name == "packing-strict"
        assert strict.passed


# =============================================================================
# Triple structure
# =============================================================================

class TestTripleStructure:
    def test_nearly_orthogonal(self, cross3, simplex3):
        assert check_nearly_orthogonal(cross3).passed
        report = check_nearly_orthogonal(simplex3)
        assert not report.passed
        assert report.max_residual == pytest.approx(1 / 3, abs=1e-15)

    def test_nonneg_triples(self, onb3, mercedes):
        """(x0, x1, x2) on the Mercedes star gives (-1/2)^3 = -1/8."""
        assert check_nonneg_triples(onb3).passed
        report = check_nonneg_triples(mercedes)
        assert not report.passed
        assert report.max_residual == pytest.approx(0.125, abs=1e-15)

    def test_orthogonal_counterpart(self, cross3, mercedes):
        assert check_orthogonal_counterpart(cross3).passed
        report = check_orthogonal_counterpart(mercedes)
        assert report.max_residual == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("d", range(2, 7))
    @pytest.mark.parametrize("seed", range(3))
    def test_nearly_orthogonal_two_d_points_are_tight(self, d, seed):
        """Any two orthonormal bases: every triple repeats a basis, so it has an orthogonal pair."""
        rng = np.random.default_rng(seed)
        first = np.linalg.qr(rng.standard_normal((d, d)))[0]
        second = np.linalg.qr(rng.standard_normal((d, d)))[0]
        cfg = WeightedConfig(np.vstack([first.T, second.T]))
        assert cfg.n_points == 2 * d
        assert check_nearly_orthogonal(cfg, tol=1e-9).passed
        assert check_tight_frame(cfg).passed

    @pytest.mark.parametrize("d", range(2, 7))
    def test_nearly_orthogonal_crosspolytope_is_tight(self, d):
        cfg = gen_crosspolytope(d)
        assert check_nearly_orthogonal(cfg).passed
        assert check_tight_frame(cfg).passed

    def test_single_point_has_no_counterpart(self):
        report = check_orthogonal_counterpart(WeightedConfig(np.array([[1.0, 0.0]])))
        assert not report.passed


# =============================================================================
# Rigidity and structure
# =============================================================================

class TestRigidity:
    @pytest.mark.parametrize("d", range(2, 7))
    def test_simplex_is_rigid(self, d):
        report = check_simplex_rigidity(gen_simplex(d))
        assert report.passed
        assert report.note is None

    def test_perturbed_weight_fails_precondition(self):
        cfg = WeightedConfig(gen_simplex(3).points, np.array([0.3, 0.2, 0.25, 0.25]))
        report = check_simplex_rigidity(cfg)
        assert not report.passed
        assert report.note.startswith("precondition failed")

    def test_crosspolytope_identity_only(self, cross3):
        """sum w w (t - 1)(t + 1/d) = 1/d - 1/d = 0, but <e1, -e1> = -1 < -1/3."""
        report = check_simplex_rigidity(cross3)
        assert report.passed
        assert report.note.startswith("structural conclusion not applicable")
        assert report.applicable

    def test_orthonormal_basis_classification(self, onb3, cross3, mercedes):
        assert classify_orthonormal_basis(onb3).passed
        assert classify_orthonormal_basis(cross3).passed
        assert not classify_orthonormal_basis(mercedes).passed

    def test_non_obtuse(self, onb3, two_bases, random_config):
        report = check_non_obtuse_structure(onb3)
        assert report.applicable and report.passed
        assert not check_non_obtuse_structure(two_bases).applicable
        assert not check_non_obtuse_structure(random_config).applicable

    @pytest.mark.parametrize("d", range(2, 7))
    @pytest.mark.parametrize("shape", list(SHAPES))
    def test_non_obtuse_over_generators(self, shape, d):
        """Only the basis is isotropic with no obtuse pair; the rest are not applicable."""
        cfg = SHAPES[shape](d)
        report = check_non_obtuse_structure(cfg)
        assert report.passed
        assert report.applicable is (shape == "onb")
        if report.applicable:
            assert classify_orthonormal_basis(cfg).passed

    @pytest.mark.parametrize("d", range(2, 7))
    def test_non_obtuse_lifted_simplex(self, d):
        """Lifting sends -1/d to 0, so the simplex becomes a basis of R^{d+1}."""
        cfg = lift(LiftSpec(gen_simplex(d)))
        report = check_non_obtuse_structure(cfg)
        assert report.applicable and report.passed
        assert classify_orthonormal_basis(cfg).passed

    def test_two_bases(self, two_bases, onb3, mercedes):
        assert classify_two_bases(two_bases).passed
        assert not classify_two_bases(onb3).applicable
        assert not classify_two_bases(mercedes).passed


# =============================================================================
# Metric consequences
# =============================================================================

class TestMetric:
    def test_dekster_orthonormal_basis(self, onb3):
        """Cap radius arccos(1/sqrt3) equals the simplex radius at diameter pi/2."""
        report = check_dekster_cap(onb3)
        assert report.applicable and report.passed

    def test_dekster_wide_sets_not_applicable(self, cross3, mercedes):
        assert not check_dekster_cap(cross3).applicable
        assert not check_dekster_cap(mercedes).applicable

    @pytest.mark.parametrize("fixture", ["onb3", "cross3", "simplex3"])
    def test_diameter_bounds(self, fixture, request):
        report = check_diameter_bounds(request.getfixturevalue(fixture))
        assert report.applicable and report.passed

    def test_diameter_needs_isotropy(self, random_config):
        assert not check_diameter_bounds(random_config).applicable


class TestRosenfeld:
    def test_terms_at_tight_frame(self):
        """N=4, d=3, F=16/3: 2F - 48 + 384/9 = 16/3 = 6*4*(2/3)*(1/3)."""
        lhs, reduced = rosenfeld_terms(4, 3, 16 / 3)
        assert lhs == pytest.approx(16 / 3, abs=1e-12)
        assert reduced == pytest.approx(16 / 3, abs=1e-12)

    def test_crosspolytope_is_extremal(self, cross3):
        """N = 2d: (18 - 24) 12 - 72 + 144 = 0."""
        report = check_rosenfeld_inequality(cross3)
        assert report.passed
        assert report.max_residual == 0.0

    def test_not_applicable_with_positive_triple(self):
        assert not check_rosenfeld_inequality(cross_plus(3)).applicable


class TestUniformComparison:
    def test_basis_energy_above_uniform(self, onb3):
        """Discrete 1/9 against 11/225 for the uniform measure."""
        report = compare_with_uniform(onb3, p=2, n=20_000, seed=3)
        assert report.passed

    @pytest.mark.parametrize("p", [1, 3, 0])
    def test_needs_even_exponent(self, onb3, p):
        with pytest.raises(DomainError):
            compare_with_uniform(onb3, p=p, n=100, seed=0)


# =============================================================================
# Registry
# =============================================================================

class TestRegistry:
    def test_order_preserved(self, cross3):
        reports = run_checks(cross3, ["tight-frame", "packing", "nearly-orthogonal"])
        assert [r.name for r in reports] == ["tight-frame", "packing", "nearly-orthogonal"]
        assert all(r.passed for r in reports)

    def test_all_expands(self):
        assert resolve_check_names(["all"]) == list(CHECKS)
        assert resolve_check_names([" isotropic", ""]) == ["isotropic"]

    def test_unknown_name(self, onb3):
        with pytest.raises(ConfigError, match="unknown check"):
            run_checks(onb3, ["isotropic", "bogus"])

    def test_tolerance_override(self, random_config):
        assert not run_checks(random_config, ["isotropic"])[0].passed
        assert run_checks(random_config, ["isotropic"], tol=10.0)[0].passed

    @pytest.mark.parametrize("d", [3, 10, 40])
    def test_strict_packing_registered(self, d):
        # simplex products are -1/d^3
        (report,) = run_checks(gen_simplex(d), ["packing-strict"], eps=0.5 / d**3)
        assert report.name == "packing-strict"
        assert report.passed
        assert report.note.endswith(f"bound={d + 1}")

    def test_strict_packing_margin_too_wide(self, simplex3):
        (report,) = run_checks(simplex3, ["packing-strict"], eps=0.1)
        assert not report.passed
        assert report.max_residual == pytest.approx(0.1 - 1.0 / 27)

    def test_strict_packing_rejects_crosspolytope(self, cross3):
        names = ["packing", "packing-strict"]
        assert [r.passed for r in run_checks(cross3, names)] == [True, False]

    def test_strict_packing_needs_positive_eps(self, simplex3):
        with pytest.raises(DomainError):
            run_checks(simplex3, ["packing-strict"], eps=0.0)

    def test_everything_runs_on_the_simplex(self, simplex3):
        reports = run_checks(simplex3, ["all"])
        assert len(reports) == len(CHECKS)
        keys = {"name", "passed", "max_residual", "tolerance", "witness", "note"}
        assert all(set(r.to_dict()) == keys for r in reports)
