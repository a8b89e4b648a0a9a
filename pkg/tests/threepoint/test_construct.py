"""Tests for canonical generators and the lift S^{d-1} -> S^d."""

import math

import numpy as np
import pytest

from src.threepoint.certify import check_isotropic, check_nonneg_triples
from src.threepoint.construct import (
    LiftSpec,
    gen_crosspolytope,
    gen_orthonormal_basis,
    gen_random,
    gen_simplex,
    gen_two_bases,
    helmert_basis,
    inner_product_transport,
    lift,
)
from src.threepoint.energy import moment_matrix, three_point_energy
from src.threepoint.errors import ConfigError, DomainError
from src.threepoint.geometry import WeightedConfig, gram_matrix, validate_config
from src.threepoint.kernels import KernelSpec


class TestGenerators:
    @pytest.mark.parametrize("d", range(2, 9))
    def test_simplex_inner_products(self, d):
        cfg = gen_simplex(d)
        gram = gram_matrix(cfg)
        off = gram[~np.eye(d + 1, dtype=bool)]
        assert cfg.n_points == d + 1
        assert np.max(np.abs(off + 1.0 / d)) <= 1e-15
        assert np.max(np.abs(np.diag(gram) - 1.0)) <= 1e-15

    def test_mercedes_angles(self):
        gram = gram_matrix(gen_simplex(2))
        assert gram[0, 1] == pytest.approx(-0.5, abs=1e-15)

    def test_helmert_rows_orthonormal(self):
        h = helmert_basis(5)
        assert np.allclose(h @ h.T, np.eye(5), atol=1e-15)
        assert np.allclose(h.sum(axis=1), 0.0, atol=1e-15)

    def test_crosspolytope(self):
        cfg = gen_crosspolytope(3)
        assert cfg.n_points == 6
        assert np.all(cfg.weights == 1 / 6)
        assert cfg.points[3].tolist() == [-1.0, 0.0, 0.0]

    def test_two_bases_layout(self):
        """theta = pi/2 rotates e1 onto e2: the second basis is (0,1), (-1,0)."""
        cfg = gen_two_bases(math.pi / 2, 0.25)
        assert cfg.weights.tolist() == [0.125, 0.125, 0.375, 0.375]
        assert np.allclose(cfg.points[2], [0.0, 1.0], atol=1e-16)
        assert np.allclose(cfg.points[3], [-1.0, 0.0], atol=1e-16)

    def test_two_bases_equality_case(self, two_bases):
        assert check_nonneg_triples(two_bases).passed
        value = three_point_energy(two_bases, KernelSpec.pframe(1, 2)).value
        assert value == pytest.approx(0.25, abs=1e-15)

    @pytest.mark.parametrize("theta, lam", [(-0.1, 0.5), (2.0, 0.5), (0.3, 1.5), (0.3, -0.1)])
    def test_two_bases_ranges(self, theta, lam):
        with pytest.raises(DomainError):
            gen_two_bases(theta, lam)

    def test_dimension_checked(self):
        with pytest.raises(DomainError):
            gen_simplex(1)
        with pytest.raises(DomainError):
            gen_random(3, 0, seed=1)

    @pytest.mark.parametrize(
        "cfg",
        [gen_orthonormal_basis(4), gen_crosspolytope(3), gen_simplex(6), gen_two_bases(0.7, 0.3)],
        ids=["onb", "cross", "simplex", "two-bases"],
    )
    def test_generators_survive_validation(self, cfg):
        again = validate_config(cfg.to_dict())
        assert np.array_equal(again.points, cfg.points)
        assert np.array_equal(again.weights, cfg.weights)

    def test_random_reproducible(self):
        a = gen_random(4, 7, seed=3, random_weights=True)
        b = gen_random(4, 7, seed=3, random_weights=True)
        assert np.array_equal(a.points, b.points)
        assert np.array_equal(a.weights, b.weights)
        assert not a.is_uniform


class TestLift:
    @pytest.mark.parametrize("d", range(3, 9))
    def test_simplex_lifts_to_orthonormal_basis(self, d):
        """<f(x), f(y)> = ((d-1)/d)(-1/(d-1)) + 1/d = 0 for the d-point simplex on S^{d-2}."""
        lifted = lift(LiftSpec(gen_simplex(d - 1)))
        assert lifted.dim == d
        assert np.max(np.abs(gram_matrix(lifted) - np.eye(d))) <= 1e-12
        assert np.max(np.abs(moment_matrix(lifted).entries - np.eye(d) / d)) <= 1e-12
        assert np.allclose(lifted.points[:, -1], 1 / math.sqrt(d), atol=1e-15)

    def test_single_point(self):
        lifted = lift(LiftSpec(WeightedConfig(np.array([[0.6, 0.8]]))))
        assert np.linalg.norm(lifted.points[0]) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize(
        "source", [gen_crosspolytope(3), gen_simplex(4)], ids=["cross", "simplex"]
    )
    def test_balanced_isotropic_lifts_isotropic(self, source):
        report = check_isotropic(lift(LiftSpec(source)), tol=1e-12)
        assert report.passed

    def test_unbalanced_lift_not_isotropic(self):
        """The basis is isotropic but its mean (1/d, ..., 1/d) is not zero."""
        report = check_isotropic(lift(LiftSpec(gen_orthonormal_basis(3))))
        assert not report.passed
        assert report.max_residual >= 1e-3

    def test_inner_product_transport(self, rng):
        source = gen_random(4, 6, seed=8)
        lifted = lift(LiftSpec(source))
        expected = inner_product_transport(4, gram_matrix(source))
        assert np.max(np.abs(gram_matrix(lifted) - expected)) <= 1e-14

    def test_transport_thresholds(self):
        """-1/d on S^{d-1} maps to 0 on S^d."""
        assert inner_product_transport(5, -0.2) == pytest.approx(0.0, abs=1e-16)

    def test_weights_unchanged(self, random_config):
        assert np.array_equal(lift(LiftSpec(random_config)).weights, random_config.weights)

    def test_custom_pole(self):
        pole = np.array([0.0, 0.0, -1.0])
        lifted = lift(LiftSpec(gen_orthonormal_basis(2), pole=pole))
        assert np.all(lifted.points[:, 2] < 0)

    @pytest.mark.parametrize(
        "pole",
        [np.array([0.0, 1.0]), np.array([0.0, 0.0, 2.0]), np.array([0.6, 0.0, 0.8])],
        ids=["wrong-length", "not-unit", "not-orthogonal"],
    )
    def test_invalid_pole(self, pole):
        with pytest.raises(ConfigError):
            LiftSpec(gen_orthonormal_basis(2), pole=pole)
