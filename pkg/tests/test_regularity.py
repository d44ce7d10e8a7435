import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraclap.errors import ExponentError, UnsupportedError
from fraclap.regularity import (case_exponents, geodesic_distance, hoelder_norm, hoelder_ratio, mode_seminorm,
                                random_band_limited, regularity_ratio_suite, single_mode_ratio)
from fraclap.spectral_core import FracOrder, SpectralFunction, TorusFunction, TorusGrid, synthesize


def brute_seminorm(values, grid, alpha):
    pts = grid.points()
    best = 0.0
    for i, j in itertools.combinations(range(grid.size), 2):
        d = float(geodesic_distance(pts[i], pts[j]))
        best = max(best, abs(values[i] - values[j]) / d**alpha)
    return best


def test_geodesic_distance():
    assert float(geodesic_distance([math.pi - 0.1], [-math.pi + 0.1])) == pytest.approx(0.2)
    d = geodesic_distance(np.array([[0.0, 3.0]]), np.array([[0.5, -3.0]]))
    assert d[0] == pytest.approx(math.hypot(0.5, 2 * math.pi - 6.0))


@pytest.mark.parametrize("n,N", [(1, 16), (2, 6)])
def test_seminorm_against_all_pairs(n, N):
    rng = np.random.default_rng(n)
    grid = TorusGrid(n, N)
    s = random_band_limited(rng, n, 2)
    vals = synthesize(s, grid).values
    for alpha in (0.3, 1.0):
        got = hoelder_norm(TorusFunction(grid, vals), 0, alpha).seminorm
        assert got == pytest.approx(brute_seminorm(vals, grid, alpha), rel=1e-13)


def test_seminorm_of_single_mode():
    m, beta = 3, 0.6
    grid = TorusGrid(1, 512)
    s = SpectralFunction.from_dict(1, {m: 0.5, -m: 0.5})
    got = hoelder_norm(s, 0, beta, grid).seminorm
    assert got == pytest.approx(mode_seminorm(m, beta), rel=1e-4)


def test_lipschitz_seminorm_of_cosine():
    grid = TorusGrid(1, 1024)
    s = SpectralFunction.from_dict(1, {2: 0.5, -2: 0.5})
    assert hoelder_norm(s, 0, 1.0, grid).seminorm == pytest.approx(2.0, rel=1e-4)


def test_full_norm_includes_derivatives():
    grid = TorusGrid(1, 256)
    s = SpectralFunction.from_dict(1, {3: 0.5, -3: 0.5})
    h = hoelder_norm(s, 2, 0.5, grid)
    assert h.sup_norm == pytest.approx(1.0)
    assert h.full_norm == pytest.approx(9.0 + h.seminorm, rel=1e-12)
    assert h.seminorm == pytest.approx(9 * mode_seminorm(3, 0.5), rel=1e-3)


def test_constant_has_zero_seminorm():
    grid = TorusGrid(2, 8)
    h = hoelder_norm(TorusFunction(grid, np.full(64, 2.5)), 1, 0.5)
    assert h.seminorm <= 1e-13
    assert h.full_norm == pytest.approx(2.5)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.floats(-5.0, 5.0), st.floats(0.05, 1.0))
def test_norm_is_homogeneous(seed, c, alpha):
    grid = TorusGrid(1, 32)
    s = random_band_limited(np.random.default_rng(seed), 1, 3)
    a = hoelder_norm(s, 1, alpha, grid).full_norm
    b = hoelder_norm(s.with_coefficients(c * s.coefficients), 1, alpha, grid).full_norm
    assert b == pytest.approx(abs(c) * a, rel=1e-12, abs=1e-12)


def test_three_dimensional_offsets_subsampled():
    grid = TorusGrid(3, 24)
    s = random_band_limited(np.random.default_rng(0), 3, 1)
    a = hoelder_norm(s, 0, 0.5, grid, seed=1)
    b = hoelder_norm(s, 0, 0.5, grid, seed=1)
    assert a == b
    assert a.seminorm > 0


def test_norm_validation():
    grid = TorusGrid(1, 8)
    s = SpectralFunction.from_dict(1, {0: 1.0})
    with pytest.raises(UnsupportedError):
        hoelder_norm(s, 3, 0.5, grid)
    for alpha in (0.0, 1.5):
        with pytest.raises(ExponentError):
            hoelder_norm(s, 0, alpha, grid)
    with pytest.raises(ValueError):
        hoelder_norm(s, 0, 0.5)


def test_case_exponents_values():
    assert case_exponents(1, 0.9, 0.2) == case_exponents(1, 0.9, 0.2)
    e1 = case_exponents(1, 0.9, 0.2)
    assert (e1.k, e1.l) == (0, 0) and e1.beta == pytest.approx(0.5)
    e2 = case_exponents(2, 0.9, 0.2)
    assert (e2.k, e2.l) == (1, 1) and e2.beta == pytest.approx(0.5)
    e3 = case_exponents(3, 0.5, 0.4)
    assert (e3.k, e3.l) == (1, 0) and e3.beta == pytest.approx(0.7)
    e4 = case_exponents(4, 0.5, 0.3, 2)
    assert (e4.k, e4.l) == (2, 1) and e4.beta == pytest.approx(0.9)


def test_case_exponent_rejections():
    with pytest.raises(ExponentError, match="2 sigma < alpha"):
        case_exponents(1, 0.3, 0.2)
    with pytest.raises(ExponentError, match="excluded"):
        case_exponents(3, 0.2, 0.6)
    with pytest.raises(ExponentError, match="negative"):
        case_exponents(3, 0.1, 0.8)
    with pytest.raises(ExponentError, match="integer"):
        case_exponents(4, 0.6, 0.3, 1)
    with pytest.raises(ExponentError):
        case_exponents(4, 0.5, 0.3)
    with pytest.raises(UnsupportedError):
        case_exponents(4, 0.5, 0.3, 3)
    with pytest.raises(ExponentError):
        case_exponents(5, 0.5, 0.3)


def test_ratio_of_zero_function():
    s = SpectralFunction.from_dict(1, {0: 0.0})
    assert hoelder_ratio(s, FracOrder(0.2), case_exponents(1, 0.9, 0.2), TorusGrid(1, 16)) == 0.0


@pytest.mark.parametrize("case,alpha,sig,k", [(1, 0.9, 0.2, None), (3, 0.5, 0.4, None), (4, 0.5, 0.3, 2)])
def test_single_mode_ratio_matches_grid(case, alpha, sig, k):
    ex = case_exponents(case, alpha, sig, k)
    for m in (1, 2):
        s = SpectralFunction.from_dict(1, {m: 0.5, -m: 0.5})
        got = hoelder_ratio(s, FracOrder(sig), ex, TorusGrid(1, 512))
        assert got == pytest.approx(single_mode_ratio(m, FracOrder(sig), ex), rel=0.01)


def test_suite_is_seeded_and_stable():
    a = regularity_ratio_suite(1, 0.9, 0.2, N=32, samples=6, seed=4)
    b = regularity_ratio_suite(1, 0.9, 0.2, N=32, samples=6, seed=4)
    assert np.array_equal(a.ratios, b.ratios)
    fine = regularity_ratio_suite(1, 0.9, 0.2, N=64, samples=6, seed=4)
    assert abs(fine.max_ratio - a.max_ratio) <= 0.2 * a.max_ratio
