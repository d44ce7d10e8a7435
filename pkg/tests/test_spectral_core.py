import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraclap.errors import AliasingError, DomainError, SymmetryError
from fraclap.periodize import LatticeSumConfig, SchwartzProfile, periodize
from fraclap.spectral_core import (FracOrder, SpectralFunction, TorusFunction, TorusGrid, analyze,
                                   check_transference_condition, frac_laplacian_spectral,
                                   spectral_function_from_csv, spectral_function_to_csv, synthesize,
                                   torus_function_from_csv, torus_function_to_csv)


def random_spectral(rng, n, M):
    shape = (2 * M + 1,) * n
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    c = 0.5 * (c + np.conj(c[(slice(None, None, -1),) * n]))
    return SpectralFunction(n, M, c)


def test_grid_nodes():
    g = TorusGrid(1, 8)
    assert g.h == pytest.approx(math.pi / 4)
    assert g.axis[-1] == pytest.approx(math.pi)
    assert np.all(g.axis > -math.pi)
    g2 = TorusGrid(2, 4)
    assert g2.points().shape == (16, 2)
    # row major: second coordinate varies fastest
    assert np.allclose(g2.points()[1] - g2.points()[0], [0.0, g2.h])


def test_grid_validation():
    for n, N in ((4, 8), (1, 6 - 3), (1, 2)):
        with pytest.raises(DomainError):
            TorusGrid(n, N)


def test_torus_function_rejects_bad_values():
    g = TorusGrid(1, 4)
    with pytest.raises(DomainError):
        TorusFunction(g, [1.0, 2.0])
    with pytest.raises(DomainError):
        TorusFunction(g, [1.0, np.nan, 0.0, 0.0])


def test_analyze_cosine():
    g = TorusGrid(1, 16)
    s = analyze(TorusFunction.from_callable(g, np.cos), 4)
    assert s.coeff(1) == pytest.approx(0.5, abs=1e-15)
    assert s.coeff(-1) == pytest.approx(0.5, abs=1e-15)
    others = [abs(s.coeff(k)) for k in range(-4, 5) if abs(k) != 1]
    assert max(others) < 1e-15


def test_analyze_constant():
    g = TorusGrid(2, 8)
    s = analyze(TorusFunction(g, np.full(64, 3.0)), 3)
    assert s.coeff((0, 0)) == pytest.approx(3.0)
    assert np.sum(np.abs(s.coefficients)) == pytest.approx(3.0)


def test_analyze_periodized_gaussian():
    phi = SchwartzProfile(1, 0.5)
    g = TorusGrid(1, 64)
    vals = periodize(phi, g.axis, LatticeSumConfig(tol=1e-15)).value
    s = analyze(TorusFunction(g, vals), 6)
    for k in range(-6, 7):
        assert s.coeff(k).real == pytest.approx((2 * math.pi) ** -0.5 * math.exp(-k * k / 2), abs=1e-14)


def test_analyze_aliasing_error():
    g = TorusGrid(1, 8)
    with pytest.raises(AliasingError):
        analyze(TorusFunction(g, np.ones(8)), 4)


def test_synthesize_examples():
    g = TorusGrid(1, 8)
    assert np.allclose(synthesize(SpectralFunction.from_dict(1, {0: 1.0}), g).values, 1.0)
    cosv = synthesize(SpectralFunction.from_dict(1, {1: 0.5, -1: 0.5}), g).values
    assert np.allclose(cosv, np.cos(g.axis), atol=1e-15)


def test_round_trip_random():
    rng = np.random.default_rng(4)
    s = random_spectral(rng, 1, 5)
    g = TorusGrid(1, 32)
    back = analyze(synthesize(s, g), 5)
    assert np.max(np.abs(back.coefficients - s.coefficients)) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(0, 3), st.integers(0, 2**31 - 1))
def test_round_trip_property(n, M, seed):
    s = random_spectral(np.random.default_rng(seed), n, M)
    g = TorusGrid(n, 8)
    back = analyze(synthesize(s, g), M)
    assert np.max(np.abs(back.coefficients - s.coefficients)) <= 1e-12
    v = synthesize(s, g)
    again = synthesize(analyze(v, M), g)
    assert np.max(np.abs(again.values - v.values)) <= 1e-12


def test_synthesize_symmetry_checks():
    g = TorusGrid(1, 8)
    with pytest.raises(SymmetryError):
        synthesize(SpectralFunction.from_dict(1, {1: 1.0}), g)
    tiny = SpectralFunction.from_dict(1, {1: 0.5, -1: 0.5 + 1e-12})
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        synthesize(tiny, g)
    assert any("imaginary residue" in str(w.message) for w in rec)


def test_multiplier_examples():
    s = SpectralFunction.from_dict(2, {(1, 0): 0.5, (-1, 0): 0.5})
    out = frac_laplacian_spectral(s, FracOrder(0.5))
    assert np.allclose(out.coefficients, s.coefficients)
    const = frac_laplacian_spectral(SpectralFunction.from_dict(1, {0: 2.0}), FracOrder(0.3))
    assert np.all(const.coefficients == 0)
    c2 = frac_laplacian_spectral(SpectralFunction.from_dict(1, {2: 0.5, -2: 0.5}), FracOrder(0.75))
    assert c2.coeff(2).real == pytest.approx(0.5 * 2**1.5)
    assert 2**1.5 == pytest.approx(2.828427, abs=1e-6)


def test_multiplier_preserves_hermitian_symmetry():
    rng = np.random.default_rng(0)
    s = random_spectral(rng, 2, 3)
    assert frac_laplacian_spectral(s, FracOrder(0.37)).hermitian_defect() <= 1e-15


def test_multiplier_continuity_near_one():
    s = SpectralFunction.from_dict(1, {3: 0.5, -3: 0.5})
    got = frac_laplacian_spectral(s, FracOrder(0.99)).coeff(3).real / 0.5
    assert got == pytest.approx(3**1.98, rel=1e-14)
    near = frac_laplacian_spectral(s, FracOrder(0.9999)).coeff(3).real / 0.5
    assert near == pytest.approx(9.0, rel=1e-3)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 0.45), st.floats(0.05, 0.45), st.integers(0, 1000))
def test_multiplier_composition(s1, s2, seed):
    s = random_spectral(np.random.default_rng(seed), 2, 3)
    twice = frac_laplacian_spectral(frac_laplacian_spectral(s, FracOrder(s1)), FracOrder(s2))
    once = frac_laplacian_spectral(s, FracOrder(s1 + s2))
    assert np.max(np.abs(twice.coefficients - once.coefficients)) <= 1e-12 * max(1, np.max(np.abs(once.coefficients)))


def test_frac_order_constants():
    assert FracOrder(0.5).c_sigma == 1.0
    with pytest.raises(DomainError):
        FracOrder(1.0)
    with pytest.raises(DomainError):
        FracOrder(0.0)
    # standard constant at n=1, sigma=1/2 is 1/pi
    assert FracOrder(0.5).kernel_const(1) == pytest.approx(1 / math.pi)
    assert FracOrder(0.5).printed_kernel_const(1) != pytest.approx(FracOrder(0.5).kernel_const(1))


def test_condition_check_constant_coefficients():
    res = check_transference_condition(lambda k: np.ones(k.shape[0]), n=1, radius=20, growth=(1.0, 0.0))
    assert res.holds
    assert res.partial_sum == pytest.approx(0.754157, abs=1e-5)
    direct = 2 * sum(math.exp(-k * k) / k for k in range(1, 21))
    assert res.partial_sum == pytest.approx(direct, rel=1e-14)
    assert res.tail_bound < 1e-150


def test_condition_check_finite_support():
    s = SpectralFunction.from_dict(1, {2: 1.0, -2: 1.0})
    res = check_transference_condition(s)
    assert res.holds and res.tail_bound == 0.0
    assert res.partial_sum == pytest.approx(math.exp(-4))


def test_condition_check_sobolev_growth():
    # c_k = |k|^sigma a_k with square-summable a_k: |c_k| <= |k|^sigma
    sig = 0.4
    res = check_transference_condition(lambda k: np.linalg.norm(k, axis=-1) ** sig / (1 + np.linalg.norm(k, axis=-1)),
                                       n=2, radius=6, growth=(1.0, sig))
    assert res.holds and math.isfinite(res.tail_bound)


def test_condition_check_refuses_without_growth():
    with pytest.raises(DomainError):
        check_transference_condition(lambda k: np.ones(k.shape[0]), n=1)


def test_csv_round_trips():
    rng = np.random.default_rng(2)
    s = random_spectral(rng, 2, 2)
    v = synthesize(s, TorusGrid(2, 8))
    text = torus_function_to_csv(v)
    assert text.startswith("# n=2 N=8\n")
    assert np.array_equal(torus_function_from_csv(text).values, v.values)
    back = spectral_function_from_csv(spectral_function_to_csv(s))
    assert np.array_equal(back.coefficients, s.coefficients)


def test_evaluate_matches_synthesis():
    rng = np.random.default_rng(5)
    s = random_spectral(rng, 3, 2)
    g = TorusGrid(3, 6)
    assert np.allclose(s.evaluate(g.points()), synthesize(s, g).values, atol=1e-13)


def test_derivative_of_sine():
    s = SpectralFunction.from_dict(1, {2: -0.5j, -2: 0.5j})
    g = TorusGrid(1, 16)
    d = synthesize(s.derivative((1,)), g).values
    assert np.allclose(d, 2 * np.cos(2 * g.axis), atol=1e-14)
