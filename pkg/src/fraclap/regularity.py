"""Discrete Hölder norms on the torus and the ratio suite for the Hölder
estimates of the fractional Laplacian.

The norm of ``C^{k,alpha}`` is ``max_{|b| <= k} sup|D^b v| + max_{|g| = k} [D^g v]_alpha``
with the seminorm taken over node pairs and the geodesic distance.  All
derivatives are spectral.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ExponentError, UnsupportedError
from .lattice import wrap
from .periodize import trig_interpolant
from .spectral_core import (FracOrder, SpectralFunction, TorusFunction, TorusGrid, frac_laplacian_spectral,
                            synthesize)

# offsets beyond this count are subsampled (three-dimensional grids)
MAX_OFFSETS = 4096
_INT_TOL = 1e-12


def geodesic_distance(x, y) -> np.ndarray:
    """Euclidean norm of the coordinate-wise wrapped difference."""
    d = wrap(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    d = np.atleast_1d(d)
    return np.sqrt(np.sum(d * d, axis=-1))


@dataclass(frozen=True)
class HoelderNorm:
    k: int
    alpha: float
    seminorm: float
    full_norm: float
    sup_norm: float
    argmax: tuple


def _multi_indices(n, order):
    return [g for g in itertools.product(range(order + 1), repeat=n) if sum(g) == order]


def _offsets(grid: TorusGrid, seed: int):
    N, n = grid.N, grid.n
    all_off = np.array(list(itertools.product(range(N), repeat=n)))[1:]
    if all_off.shape[0] <= MAX_OFFSETS:
        return all_off
    signed = (all_off + N // 2) % N - N // 2
    near = np.max(np.abs(signed), axis=1) <= 2
    rest = np.flatnonzero(~near)
    pick = np.random.default_rng(seed).choice(rest, MAX_OFFSETS - int(near.sum()), replace=False)
    return all_off[np.sort(np.concatenate([np.flatnonzero(near), pick]))]


def _seminorm(f: np.ndarray, grid: TorusGrid, alpha: float, offsets):
    """``sup |f(x) - f(y)| / d(x, y)^alpha`` over node pairs, via cyclic shifts."""
    best, arg = 0.0, ((0,) * grid.n, (0,) * grid.n)
    h = grid.h
    for off in offsets:
        signed = (off + grid.N // 2) % grid.N - grid.N // 2
        d = h * math.sqrt(float(np.sum(signed * signed)))
        diff = np.abs(f - np.roll(f, tuple(-off), axis=tuple(range(grid.n))))
        i = int(np.argmax(diff))
        val = float(diff.flat[i]) / d**alpha
        if val > best:
            x = np.unravel_index(i, grid.shape)
            y = tuple((np.array(x) + off) % grid.N)
            best, arg = val, (tuple(int(t) for t in x), tuple(int(t) for t in y))
    return best, arg


def hoelder_norm(v, k: int, alpha: float, grid: TorusGrid = None, seed: int = 0) -> HoelderNorm:
    """Discrete ``C^{k,alpha}`` norm of a grid or spectral function.

    ``argmax`` holds the grid indices of the maximising pair.
    """
    if k not in (0, 1, 2):
        raise UnsupportedError("derivative order k > 2 is not supported")
    if not 0.0 < alpha <= 1.0:
        raise ExponentError(f"alpha must lie in (0, 1], got {alpha}")
    if isinstance(v, TorusFunction):
        grid = v.grid if grid is None else grid
        s = trig_interpolant(v)
    else:
        s = v
    if grid is None:
        raise ValueError("a grid is required for spectral input")
    offsets = _offsets(grid, seed)
    sup = 0.0
    for j in range(k + 1):
        for g in _multi_indices(grid.n, j):
            sup = max(sup, float(np.max(np.abs(synthesize(s.derivative(g), grid).values))))
    semi, arg = 0.0, ((0,) * grid.n, (0,) * grid.n)
    for g in _multi_indices(grid.n, k):
        f = synthesize(s.derivative(g), grid).array()
        val, a = _seminorm(f, grid, alpha, offsets)
        if val > semi:
            semi, arg = val, a
    return HoelderNorm(k, alpha, semi, sup + semi, float(np.max(np.abs(synthesize(s, grid).values))), arg)


# ------------------------------------------------------------------ suite

@dataclass(frozen=True)
class CaseExponents:
    case: int
    k: int
    alpha: float
    l: int
    beta: float


def case_exponents(case: int, alpha: float, sigma: float, k: int = None) -> CaseExponents:
    """Source ``C^{k,alpha}`` and target ``C^{l,beta}`` spaces of each case.

    Raises :class:`ExponentError` naming the violated constraint.
    """
    if not 0.0 < alpha <= 1.0:
        raise ExponentError(f"alpha must lie in (0, 1], got {alpha}")
    if not 0.0 < sigma < 1.0:
        raise ExponentError(f"sigma must lie in (0, 1), got {sigma}")
    two_s = 2.0 * sigma
    if case in (1, 2):
        if not two_s < alpha:
            raise ExponentError(f"case ({case}) requires 0 < 2 sigma < alpha; got 2 sigma = {two_s}, alpha = {alpha}")
        kk = case - 1
        return CaseExponents(case, kk, alpha, kk, alpha - two_s)
    if case == 3:
        if not two_s >= alpha:
            raise ExponentError(f"case (3) requires 2 sigma >= alpha; got 2 sigma = {two_s}, alpha = {alpha}")
        beta = alpha - two_s + 1.0
        if abs(beta) < _INT_TOL:
            raise ExponentError("case (3) requires alpha - 2 sigma + 1 != 0 (excluded case)")
        if beta < 0:
            raise ExponentError(f"case (3) target exponent alpha - 2 sigma + 1 = {beta} is negative")
        return CaseExponents(3, 1, alpha, 0, beta)
    if case == 4:
        if k is None:
            raise ExponentError("case (4) needs the derivative order k")
        if k not in (0, 1, 2):
            raise UnsupportedError("case (4) is restricted to k <= 2")
        t = k + alpha - two_s
        if abs(t - round(t)) < _INT_TOL:
            raise ExponentError(f"case (4) requires k + alpha - 2 sigma not an integer; got {t}")
        if t < 0:
            raise ExponentError(f"case (4) requires k + alpha - 2 sigma > 0; got {t}")
        l = int(math.floor(t))
        return CaseExponents(4, k, alpha, l, t - l)
    raise ExponentError(f"unknown case {case}")


def random_band_limited(rng: np.random.Generator, n: int, M: int) -> SpectralFunction:
    """Real trigonometric polynomial with normal coefficients, ``|k|_inf <= M``."""
    shape = (2 * M + 1,) * n
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    c = 0.5 * (c + np.conj(c[(slice(None, None, -1),) * n]))
    return SpectralFunction(n, M, c)


def hoelder_ratio(v: SpectralFunction, order: FracOrder, ex: CaseExponents, grid: TorusGrid) -> float:
    """``||(-Delta)^sigma v||_{C^{l,beta}} / ||v||_{C^{k,alpha}}`` (0 when ``v = 0``)."""
    src = hoelder_norm(v, ex.k, ex.alpha, grid).full_norm
    if src == 0.0:
        return 0.0
    dst = hoelder_norm(frac_laplacian_spectral(v, order), ex.l, ex.beta, grid).full_norm
    return dst / src


@dataclass(frozen=True)
class SuiteResult:
    exponents: CaseExponents
    max_ratio: float
    ratios: np.ndarray
    N: int
    samples: int
    seed: int


def regularity_ratio_suite(case: int, alpha: float, sigma: float, n: int = 1, N: int = 64, M: int = 4,
                           samples: int = 50, seed: int = 0, k: int = None) -> SuiteResult:
    """Maximum Hölder ratio over seeded random band-limited samples."""
    ex = case_exponents(case, alpha, sigma, k)
    grid = TorusGrid(n, N)
    order = FracOrder(sigma)
    rng = np.random.default_rng(seed)
    ratios = np.array([hoelder_ratio(random_band_limited(rng, n, M), order, ex, grid) for _ in range(samples)])
    return SuiteResult(ex, float(np.max(ratios, initial=0.0)), ratios, N, samples, seed)


def mode_seminorm(m: float, beta: float, samples: int = 200001) -> float:
    """``sup_{0 < d <= pi} 2 |sin(m d / 2)| / d^beta`` on a dense grid, refined locally."""
    d = np.linspace(math.pi / samples, math.pi, samples)
    f = 2.0 * np.abs(np.sin(0.5 * m * d)) / d**beta
    i = int(np.argmax(f))
    lo, hi = d[max(i - 1, 0)], d[min(i + 1, samples - 1)]
    fine = np.linspace(lo, hi, 2001)
    return float(np.max(2.0 * np.abs(np.sin(0.5 * m * fine)) / fine**beta))


def single_mode_ratio(m: int, order: FracOrder, ex: CaseExponents) -> float:
    """Closed-form ratio for ``v = cos(m z)`` on the one-dimensional torus."""

    def norm(amp, kk, a):
        return amp * max(m**j for j in range(kk + 1)) + amp * m**kk * mode_seminorm(m, a)

    return norm(m ** (2 * order.sigma), ex.l, ex.beta) / norm(1.0, ex.k, ex.alpha)
