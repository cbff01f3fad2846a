import numpy as np
import pytest

from hhgbox.basis import basis_matrix, build_basis, eval_basis
from hhgbox.specialfn import gauss_legendre, spherical_bessel_j


def gram_matrix(basis, order=256):
    """Orthonormality oracle: pairwise overlaps by high-order quadrature."""
    rule = gauss_legendre(order)
    phi = basis_matrix(basis, rule.nodes)
    return (phi * rule.weights) @ phi.T


class TestBuildBasis:
    def test_l0_is_sine_basis(self):
        b = build_basis(0, 3)
        assert np.allclose(b.zeros, np.array([1, 2, 3]) * np.pi, atol=1e-12)
        assert np.allclose(b.energies, np.array([1, 4, 9]) * np.pi**2 / 2, atol=1e-10)
        ys = np.linspace(0, 1, 41)
        for n in (1, 2, 3):
            expected = np.sqrt(2) * np.sin(n * np.pi * ys)
            got = np.array([eval_basis(b, n, y) for y in ys])
            assert np.max(np.abs(got - expected)) < 1e-12

    def test_l0_ground_energy(self):
        b = build_basis(0, 1)
        assert b.energies[0] == pytest.approx(4.9348022005446793, abs=1e-12)

    def test_l1_normalization_against_quadrature(self):
        b = build_basis(1, 1)
        rule = gauss_legendre(128)
        integral = rule.integrate(lambda y: basis_matrix(b, y)[0] ** 2)
        assert integral == pytest.approx(1.0, abs=1e-10)

    def test_energies_strictly_increasing(self):
        for l in (0, 1, 3):
            b = build_basis(l, 30)
            assert np.all(np.diff(b.energies) > 0)

    def test_orthonormality_max_norm(self):
        for l in (0, 1, 2, 5):
            b = build_basis(l, 25)
            g = gram_matrix(b)
            assert np.max(np.abs(g - np.eye(b.size))) <= 1e-10

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            build_basis(0, 0)
        with pytest.raises(ValueError):
            build_basis(-1, 5)


class TestEvalBasis:
    def test_l0_midpoint_value(self):
        b = build_basis(0, 2)
        assert eval_basis(b, 1, 0.5) == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_dirichlet_at_wall(self):
        for l in (0, 1, 4):
            b = build_basis(l, 6)
            for n in range(1, 7):
                assert abs(eval_basis(b, n, 1.0)) < 1e-10

    def test_zero_at_origin(self):
        for l in (0, 1, 3):
            b = build_basis(l, 4)
            for n in range(1, 5):
                assert eval_basis(b, n, 0.0) == 0.0

    def test_l1_value_matches_definition(self):
        b = build_basis(1, 1)
        lam = b.zeros[0]
        expected = b.norms[0] * 0.5 * spherical_bessel_j(1, lam * 0.5)
        assert eval_basis(b, 1, 0.5) == pytest.approx(expected, rel=1e-14)

    def test_domain_errors(self):
        b = build_basis(0, 3)
        with pytest.raises(ValueError):
            eval_basis(b, 0, 0.5)
        with pytest.raises(ValueError):
            eval_basis(b, 4, 0.5)
        with pytest.raises(ValueError):
            eval_basis(b, 1, 1.5)
        with pytest.raises(ValueError):
            eval_basis(b, 1, -0.1)


class TestEigenproblemResidual:
    def test_reduced_radial_equation(self):
        """-1/2 phi'' + l(l+1)/(2 y^2) phi = eps phi via 5-point differences."""
        h = 1e-3
        for l in (0, 1, 2):
            b = build_basis(l, 3)
            for n in (1, 2, 3):
                for y in (0.31, 0.57, 0.83):
                    stencil = np.array([y - 2 * h, y - h, y, y + h, y + 2 * h])
                    vals = np.array([eval_basis(b, n, yy) for yy in stencil])
                    second = (
                        -vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]
                    ) / (12 * h**2)
                    residual = (
                        -0.5 * second
                        + l * (l + 1) / (2 * y**2) * vals[2]
                        - b.energies[n - 1] * vals[2]
                    )
                    assert abs(residual) <= 1e-6


class TestBasisMatrix:
    def test_matches_pointwise_eval(self):
        b = build_basis(2, 5)
        ys = np.linspace(0.0, 1.0, 17)
        m = basis_matrix(b, ys)
        for n in range(1, 6):
            expected = np.array([eval_basis(b, n, y) for y in ys])
            assert np.allclose(m[n - 1], expected, atol=1e-14)

    def test_rejects_out_of_range_grid(self):
        b = build_basis(0, 2)
        with pytest.raises(ValueError):
            basis_matrix(b, np.array([0.2, 1.2]))
