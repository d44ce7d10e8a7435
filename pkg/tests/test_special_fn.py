import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from fraclap.errors import AccuracyError, DomainError
from fraclap.special_fn import (bessel_asymptotic_ratio, bessel_coefficient_identity, bessel_k, c_sigma, gamma,
                                kv, subordination_integral, weight_fourier_coefficient,
                                weight_fourier_coefficients)


def test_gamma_known_values():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-14)
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-14)


def test_gamma_against_mpmath():
    for x in np.linspace(0.05, 30.0, 97):
        want = float(mpmath.gamma(x))
        assert abs(gamma(x) / want - 1) <= 1e-12, x


def test_gamma_reflection_for_negative_arguments():
    for x in (-0.5, -0.25, -1.5, -2.7):
        assert gamma(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-12)


@given(st.floats(min_value=0.05, max_value=29.0))
def test_gamma_recurrence(x):
    assert gamma(x + 1) == pytest.approx(x * gamma(x), rel=1e-12)


def test_gamma_poles():
    for x in (0.0, -1.0, -3.0):
        with pytest.raises(DomainError):
            gamma(x)


def test_c_sigma_values():
    assert c_sigma(0.5) == 1.0
    want = float(mpmath.gamma(0.75) / (mpmath.mpf(4) ** -0.25 * mpmath.gamma(0.25)))
    assert c_sigma(0.25) == pytest.approx(want, rel=1e-12)
    assert c_sigma(0.25) == pytest.approx(0.47799, abs=1e-5)


def test_bessel_half_order_closed_form():
    b = bessel_k(0.5, 1.0)
    assert b.value == pytest.approx(math.sqrt(math.pi / 2) * math.exp(-1), rel=1e-12)
    assert b.value == pytest.approx(0.461068, abs=1e-6)
    c = bessel_k(0.5, 1.0, method="closed_form_half")
    assert c.value == pytest.approx(b.value, rel=1e-10)


def test_bessel_against_mpmath_on_range():
    for nu in (0.1, 0.25, 0.5, 0.75, 0.9):
        for z in np.geomspace(1e-3, 30.0, 25):
            want = float(mpmath.besselk(nu, z))
            got = bessel_k(nu, float(z))
            assert abs(got.value / want - 1) <= 1e-9, (nu, z)
            assert got.error_estimate <= 1e-9 * got.value


def test_kv_large_arguments_match_scipy():
    z = np.array([50.0, 200.0, 800.0, 3000.0])
    for nu in (0.2, 0.8):
        got = kv(nu, z[:2])
        assert np.allclose(got, special.kv(nu, z[:2]), rtol=1e-12, atol=0)
        from fraclap.special_fn import kv_scaled
        assert np.allclose(kv_scaled(nu, z), special.kve(nu, z), rtol=1e-11)


def test_bessel_positive_and_decreasing():
    z = np.linspace(0.01, 20, 200)
    vals = kv(0.3, z)
    assert np.all(vals > 0)
    assert np.all(np.diff(vals) < 0)


def test_bessel_domain_errors():
    with pytest.raises(DomainError):
        bessel_k(0.5, 0.0)
    with pytest.raises(DomainError):
        bessel_k(1.2, 1.0)
    with pytest.raises(DomainError):
        bessel_k(0.3, 1.0, method="closed_form_half")


def test_bessel_accuracy_error_carries_estimate(monkeypatch):
    import fraclap.special_fn as sf

    monkeypatch.setattr(sf, "_kv_scaled_pair", lambda nu, z: (np.array([1.0]), np.array([2.0])))
    with pytest.raises(AccuracyError) as info:
        sf.bessel_k(0.3, 1.0)
    assert info.value.estimate > 0


def test_bessel_asymptotic_ratio_tends_to_one():
    for nu in (0.25, 0.5, 0.75):
        for z in (9.0, 16.0):
            r = bessel_asymptotic_ratio(nu, z)
            # next asymptotic term (4 nu^2 - 1) / (8 z)
            assert r == pytest.approx(1 + (4 * nu**2 - 1) / (8 * z), abs=0.01)
            assert 0.95 <= r <= 1.05


def test_subordination_integral_direct_quadrature():
    from scipy import integrate

    for sig, k in ((0.3, 1.0), (0.7, 2.5)):
        direct, _ = integrate.quad(lambda r: math.exp(-k * k / (4 * r) - r) * r ** (-1 - sig), 0, np.inf,
                                   epsabs=1e-14, epsrel=1e-12, limit=200)
        assert subordination_integral(sig, k) == pytest.approx(direct, rel=1e-9)


def test_weight_coefficient_zero_mode_is_mass():
    for n, sig in ((1, 0.5), (2, 0.25), (3, 0.75)):
        mass = math.pi ** (n / 2) * float(mpmath.gamma(sig) / mpmath.gamma(n / 2 + sig))
        assert weight_fourier_coefficient(n, sig, np.zeros(n)) == pytest.approx(mass / (2 * math.pi) ** n)


def test_weight_coefficient_half_order_closed_form():
    # (1 + x^2)^(-1) has transform exp(-|k|) / 2 under this normalization
    for k in (0.5, 1.0, 3.0):
        assert weight_fourier_coefficient(1, 0.5, [k]) == pytest.approx(math.exp(-k) / 2, rel=1e-12)


def test_weight_coefficients_vectorised_matches_scalar():
    k = np.array([0.0, 0.5, 1.0, 2.0, 7.0])
    vec = weight_fourier_coefficients(2, 0.3, k)
    for kk, v in zip(k, vec):
        assert v == pytest.approx(weight_fourier_coefficient(2, 0.3, [kk, 0.0]), rel=1e-12)


def test_bessel_identity_examples():
    assert bessel_coefficient_identity(1, 0.5, [1.0]).residual <= 1e-6
    assert bessel_coefficient_identity(2, 0.25, [1.0, 1.0]).residual <= 1e-6


def test_bessel_identity_radial_symmetry():
    a = bessel_coefficient_identity(1, 0.75, [2.0])
    b = bessel_coefficient_identity(1, 0.75, [-2.0])
    assert a.rhs == b.rhs
    assert a.lhs == pytest.approx(b.lhs, abs=1e-14)


def test_bessel_identity_rejects_zero_vector():
    with pytest.raises(DomainError):
        bessel_coefficient_identity(1, 0.5, [0.0])


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=0.05, max_value=0.95), st.floats(min_value=0.01, max_value=25.0))
def test_bessel_matches_scipy(nu, z):
    assert bessel_k(nu, z).value == pytest.approx(float(special.kv(nu, z)), rel=1e-9)
