import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from fraclap.errors import AccuracyError, DomainError
from fraclap.extension import (ExtensionField, conormal_limit, extend, extension_multiplier,
                               extension_multiplier_derivative, extrapolate, poisson_convolution, poisson_kernel)
from fraclap.regularity import random_band_limited
from fraclap.special_fn import c_sigma
from fraclap.spectral_core import FracOrder, SpectralFunction, TorusGrid, frac_laplacian_spectral, synthesize


def m_mp(sig, s):
    sig, s = mpmath.mpf(sig), mpmath.mpf(s)
    return 2 ** (1 - sig) / mpmath.gamma(sig) * s**sig * mpmath.besselk(sig, s)


def test_multiplier_half_order():
    assert extension_multiplier(FracOrder(0.5), 1.0) == pytest.approx(math.exp(-1), rel=1e-13)
    s = np.array([0.0, 0.3, 4.0])
    assert np.allclose(extension_multiplier(FracOrder(0.5), s), np.exp(-s), rtol=1e-13)


@pytest.mark.parametrize("sig", [0.1, 0.3, 0.7, 0.95])
def test_multiplier_against_mpmath(sig):
    for s in (1e-3, 0.05, 0.8, 3.0, 20.0):
        assert extension_multiplier(FracOrder(sig), s) == pytest.approx(float(m_mp(sig, s)), rel=1e-10)


@pytest.mark.parametrize("sig", [0.2, 0.5, 0.8])
def test_multiplier_solves_ode(sig):
    # m'' + (1 - 2 sigma)/s m' - m = 0, five-point second difference
    order = FracOrder(sig)
    h = 1e-3
    for s in (0.2, 0.7, 2.0, 5.0):
        f = [extension_multiplier(order, s + j * h) for j in (-2, -1, 0, 1, 2)]
        d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
        d1 = float(extension_multiplier_derivative(order, s))
        scale = abs(d2) + abs(d1) / s + abs(f[2])
        assert abs(d2 + (1 - 2 * sig) / s * d1 - f[2]) <= 1e-6 * scale


def test_derivative_matches_finite_difference():
    order = FracOrder(0.35)
    for s in (0.1, 1.0, 4.0):
        h = 1e-5
        fd = (extension_multiplier(order, s + h) - extension_multiplier(order, s - h)) / (2 * h)
        assert float(extension_multiplier_derivative(order, s)) == pytest.approx(fd, rel=1e-7)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.0, 30.0), st.floats(0.01, 5.0))
def test_multiplier_bounded_and_decreasing(sig, s, ds):
    order = FracOrder(sig)
    a = extension_multiplier(order, s)
    b = extension_multiplier(order, s + ds)
    assert 0.0 <= b <= a <= 1.0


@pytest.mark.parametrize("sig", [0.2, 0.5, 0.75])
def test_small_argument_behaviour(sig):
    # 1 - m(s) ~ (c_sigma / (2 sigma)) s^(2 sigma)
    order = FracOrder(sig)
    s = np.array([1e-6, 2e-6])
    gap = 1 - extension_multiplier(order, s)
    slope = math.log(gap[1] / gap[0]) / math.log(2)
    assert slope == pytest.approx(2 * sig, abs=1e-3)
    assert gap[0] / s[0] ** (2 * sig) == pytest.approx(c_sigma(sig) / (2 * sig), rel=1e-3)


@pytest.mark.parametrize("sig", [0.1, 0.25, 0.5, 0.75, 0.9])
def test_log_log_slope_on_moderate_arguments(sig):
    # the s^2 term biases the fit by about (2 - 2 sigma) s^(2 - 2 sigma) near sigma = 1
    s = np.geomspace(1e-3, 1e-2, 20)
    gap = 1 - extension_multiplier(FracOrder(sig), s)
    slope = np.polyfit(np.log(s), np.log(gap), 1)[0]
    assert slope == pytest.approx(2 * sig, abs=0.1)


@pytest.mark.parametrize("sig", [0.15, 0.4, 0.85])
def test_c_sigma_is_conormal_limit_of_multiplier(sig):
    s = mpmath.mpf("1e-200")
    sg = mpmath.mpf(sig)
    dm = -2 ** (1 - sg) / mpmath.gamma(sg) * s**sg * mpmath.besselk(1 - sg, s)
    assert c_sigma(sig) == pytest.approx(float(-s ** (1 - 2 * sg) * dm), rel=1e-12)


def test_multiplier_rejects_negative():
    with pytest.raises(DomainError):
        extension_multiplier(FracOrder(0.5), -1.0)
    with pytest.raises(DomainError):
        extension_multiplier_derivative(FracOrder(0.5), 0.0)


def test_field_boundary_values_and_decay():
    s = SpectralFunction.from_dict(2, {(0, 0): 0.7, (1, 2): 0.5, (-1, -2): 0.5})
    field = ExtensionField(s, FracOrder(0.3))
    z = np.array([[0.1, -0.4], [2.0, 1.0]])
    assert np.allclose(field(z, 0.0), s.evaluate(z))
    assert np.allclose(field(z, 40.0), 0.7, atol=1e-12)
    with pytest.raises(DomainError):
        field.coefficients(-1.0)
    with pytest.raises(DomainError):
        field.conormal(0.0)


def test_extend_half_order_is_harmonic_extension():
    s = SpectralFunction.from_dict(1, {3: 0.5, -3: 0.5})
    grid = TorusGrid(1, 16)
    got = extend(s, FracOrder(0.5), 0.2, grid).values
    assert np.allclose(got, math.exp(-0.6) * np.cos(3 * grid.axis), atol=1e-14)


def test_poisson_kernel_unit_mass():
    for sig in (0.25, 0.75):
        mass = 2 * integrate.quad(lambda r: poisson_kernel(1, FracOrder(sig), 0.3, r), 0, np.inf,
                                  epsabs=1e-13, limit=400)[0]
        assert mass == pytest.approx(1.0, rel=1e-8)
    # radial mass in two dimensions
    mass2 = 2 * math.pi * integrate.quad(lambda r: r * poisson_kernel(2, FracOrder(0.5), 0.4, r), 0, np.inf,
                                         epsabs=1e-13, limit=400)[0]
    assert mass2 == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("sig", [0.25, 0.5, 0.75])
def test_poisson_convolution_matches_bessel_extension(sig):
    rng = np.random.default_rng(3)
    s = random_band_limited(rng, 1, 3)
    grid = TorusGrid(1, 32)
    for y in (0.05, 0.5):
        a = poisson_convolution(s, FracOrder(sig), y, grid).values
        b = extend(s, FracOrder(sig), y, grid).values
        assert np.max(np.abs(a - b)) <= 1e-9


def test_poisson_convolution_rejects_higher_dimensions():
    with pytest.raises(DomainError):
        poisson_convolution(SpectralFunction.from_dict(2, {(0, 0): 1.0}), FracOrder(0.5), 0.1, TorusGrid(2, 8))


def test_extrapolate_recovers_polynomial_limit():
    ys = 0.1 * 2.0 ** -np.arange(6)
    vals = 3.0 + 2.0 * ys**0.6 - ys**2
    L, err = extrapolate(ys, vals, [0.6, 2.0, 2.6, 4.0, 4.6])
    assert float(L[0]) == pytest.approx(3.0, abs=1e-12)
    assert err <= 1e-10


@pytest.mark.parametrize("sig", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_conormal_limit_matches_spectral(sig):
    rng = np.random.default_rng(8)
    s = random_band_limited(rng, 2, 3)
    grid = TorusGrid(2, 16)
    order = FracOrder(sig)
    res = conormal_limit(s, order, grid)
    ref = c_sigma(sig) * synthesize(frac_laplacian_spectral(s, order), grid).values
    assert np.max(np.abs(res.limit_field.values - ref)) <= 1e-8 * np.max(np.abs(ref))
    assert res.richardson_error <= 1e-6


def test_conormal_limit_validation():
    s = SpectralFunction.from_dict(1, {1: 0.5, -1: 0.5})
    grid = TorusGrid(1, 8)
    with pytest.raises(DomainError):
        conormal_limit(s, FracOrder(0.5), grid, y_sequence=(0.1, 0.05, 0.02))
    with pytest.raises(DomainError):
        conormal_limit(s, FracOrder(0.5), grid, y_sequence=(0.1, 0.2, 0.05, 0.01))


def test_conormal_limit_rejects_unsettled_extrapolation():
    s = SpectralFunction.from_dict(1, {40: 0.5, -40: 0.5})
    with pytest.raises(AccuracyError):
        conormal_limit(s, FracOrder(0.3), TorusGrid(1, 128), y_sequence=(4.0, 3.0, 2.0, 1.0))
