import numpy as np
import pytest

from mzres.complexfn import SigmaCurve, build_sigma, rho, rho_prime, sigma_radius

# zero-curve radii frozen from 30-digit bisection on Re rho along fixed rays
R0_HALF_PI = 0.66274341934918158
R0_QUARTER_PI = 0.72953552232047569
R0_THETA_01 = 0.94635176505833570


def test_rho_branch_grid_derivative_consistency():
    # analyticity probe: rho_prime must match a central difference of rho
    # everywhere on a grid covering both sides of every branch point
    xs = np.linspace(-3.0, 3.0, 25)
    ys = np.linspace(0.05, 3.0, 12)
    z = (xs[None, :] + 1j * ys[:, None]).ravel()
    h = 1e-6
    fd = (rho(z + h) - rho(z - h)) / (2 * h)
    assert np.max(np.abs(fd - rho_prime(z))) < 1e-8


def test_rho_real_on_unit_interval():
    x = np.linspace(0.05, 0.95, 19)
    assert np.max(np.abs(np.imag(rho(x)))) == 0.0


def test_re_rho_vanishes_beyond_one_on_real_axis():
    x = np.concatenate([np.linspace(1.001, 8.0, 40), -np.linspace(1.001, 8.0, 40)])
    assert np.max(np.abs(np.real(rho(x)))) < 1e-13


def test_re_rho_sign_along_rays():
    # positive below the zero curve, negative above it
    for theta in (0.3, 1.0, np.pi / 2, 2.5):
        r = sigma_radius(theta)
        ray = np.exp(1j * theta)
        assert np.real(rho(0.8 * r * ray)) > 0.0
        assert np.real(rho(1.2 * r * ray)) < 0.0


def test_rho_domain_errors():
    with pytest.raises(ValueError):
        rho(0.0)
    with pytest.raises(ValueError):
        rho(0.5 - 0.1j)
    with pytest.raises(ValueError):
        rho_prime(np.array([1.0 + 1j, -2j]))


def test_sigma_radius_frozen_values():
    assert abs(sigma_radius(np.pi / 2) - R0_HALF_PI) < 1e-12
    assert abs(sigma_radius(np.pi / 4) - R0_QUARTER_PI) < 1e-12
    assert abs(sigma_radius(0.1) - R0_THETA_01) < 1e-12


def test_sigma_radius_symmetry_and_range():
    for theta in (0.2, 0.7, 1.3):
        assert abs(sigma_radius(theta) - sigma_radius(np.pi - theta)) < 1e-12
    assert 0.5 < sigma_radius(np.pi / 2) < sigma_radius(0.05) < 1.0


def test_sigma_radius_argument_errors():
    for theta in (0.0, np.pi, -0.1, 4.0):
        with pytest.raises(ValueError):
            sigma_radius(theta)
    with pytest.raises(ValueError):
        sigma_radius(1.0, tol=0.0)


def test_build_sigma_interpolant_accuracy():
    curve = build_sigma()
    thetas = np.linspace(0.01, np.pi - 0.01, 37)
    for t in thetas:
        assert abs(curve.radius(t) - sigma_radius(t)) < 1e-10
    assert len(curve.nodes) == 64


def test_build_sigma_validation():
    with pytest.raises(ValueError):
        build_sigma(nnodes=8)
    with pytest.raises(ValueError):
        SigmaCurve(thetas=np.array([0.5, 1.0]), radii=np.array([0.3, 0.8]),
                   coeffs=np.array([0.5]))
