"""Lattice sums of inverse powers over the period lattice ``2 pi Z^n``.

``S_q(y) = sum_k |y + 2 pi k|^(-q)`` with ``q > n`` is evaluated with Hurwitz
zeta functions for ``n = 1`` and Ewald splitting otherwise.  Tail sums outside
a box and rigorous shell bounds for truncated direct sums are also provided.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache

import mpmath
import numpy as np
from scipy import special

from .errors import DomainError

TWO_PI = 2.0 * math.pi
# Ewald splitting parameter: real and reciprocal sums both decay like exp(-pi |k|^2)
_ETA = 1.0 / (4.0 * math.pi)
_EWALD_REAL = 6
_EWALD_RECIP = 6


def wrap(x):
    """Map coordinates into ``(-pi, pi]``."""
    x = np.asarray(x, dtype=float)
    w = np.mod(x + math.pi, TWO_PI) - math.pi
    return np.where(w == -math.pi, math.pi, w)


def _int_box(n, lo, hi):
    r = np.arange(lo, hi + 1)
    return np.array(list(itertools.product(r, repeat=n)), dtype=float).reshape(-1, n)


@lru_cache(maxsize=None)
def _reciprocal_table(n, q):
    """Ewald reciprocal-space coefficients keyed by lattice vector ``m != 0``."""
    m = _int_box(n, -_EWALD_RECIP, _EWALD_RECIP)
    m2 = np.sum(m**2, axis=1)
    m = m[m2 > 0]
    m2 = m2[m2 > 0]
    a = 0.5 * (n - q)
    pref = math.pi ** (0.5 * n) / (TWO_PI**n * math.gamma(0.5 * q))
    coef = {}
    for val in np.unique(m2):
        g = float(mpmath.gammainc(a, val / (4.0 * _ETA)))
        coef[val] = pref * (val / 4.0) ** (-a) * g
    zero = pref * _ETA ** (-a) / (-a)
    return m, np.array([coef[v] for v in m2]), zero


def _ewald(y, q):
    n = y.shape[1]
    k = _int_box(n, -_EWALD_REAL, _EWALD_REAL)
    out = np.zeros(y.shape[0])
    for kk in k:
        r2 = np.sum((y + TWO_PI * kk) ** 2, axis=1)
        hit = r2 < 1e-28
        r2s = np.where(hit, 1.0, r2)
        term = special.gammaincc(0.5 * q, _ETA * r2s) * r2s ** (-0.5 * q)
        out += np.where(hit, 0.0, term)
        if np.any(hit):
            # the omitted term's smooth part is still present in reciprocal space
            out -= np.where(hit, _ETA ** (0.5 * q) / (0.5 * q * math.gamma(0.5 * q)), 0.0)
    m, coef, zero = _reciprocal_table(n, float(q))
    out += zero + np.cos(y @ m.T) @ coef
    return out


def _as_points(y, n):
    y = np.asarray(y, dtype=float)
    if n == 1 and (y.ndim == 0 or y.shape[-1] != 1):
        y = y[..., None]
    return y.reshape(-1, n), y.shape[:-1]


def riesz_sum(y, q: float, n: int) -> np.ndarray:
    """``sum_k |y + 2 pi k|^(-q)`` over all ``k``, omitting a vanishing term."""
    if q <= n:
        raise DomainError(f"lattice sum diverges for q={q} <= n={n}")
    pts, lead = _as_points(y, n)
    pts = wrap(pts)
    if n == 1:
        x = pts[:, 0]
        ax = np.abs(x)
        with np.errstate(over="ignore", divide="ignore"):
            near = np.where(ax > 0, ax ** (-q), 0.0)
        out = near + TWO_PI ** (-q) * (special.zeta(q, 1.0 + x / TWO_PI)
                                       + special.zeta(q, 1.0 - x / TWO_PI))
    else:
        out = _ewald(pts, q)
    return out.reshape(lead)


def _ewald_smooth(r2, q):
    """Long-range Ewald part ``P(q/2, eta r^2) r^(-q)``, finite at ``r = 0``."""
    r2s = np.where(r2 > 0, r2, 1.0)
    val = special.gammainc(0.5 * q, _ETA * r2s) * r2s ** (-0.5 * q)
    return np.where(r2 > 0, val, _ETA ** (0.5 * q) / math.gamma(0.5 * q + 1.0))


def riesz_tail(y, q: float, n: int, L: int, center=None) -> np.ndarray:
    """``sum |y + 2 pi k|^(-q)`` over ``|k - center|_inf > L``.

    ``y`` is used as given (not wrapped); every point must satisfy
    ``|y + 2 pi k| > 0`` outside the box.  For ``n >= 2`` the box terms are
    removed from the Ewald decomposition term by term: short-range parts
    are summed only outside the box and only the bounded long-range parts
    are subtracted, so there is no cancellation against near terms.
    """
    if q <= n:
        raise DomainError(f"lattice sum diverges for q={q} <= n={n}")
    pts, lead = _as_points(y, n)
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float).reshape(n)
    if n == 1:
        x = pts[:, 0] + TWO_PI * c[0]
        up = TWO_PI ** (-q) * special.zeta(q, L + 1 + x / TWO_PI)
        down = TWO_PI ** (-q) * special.zeta(q, L + 1 - x / TWO_PI)
        return (up + down).reshape(lead)
    base = pts + TWO_PI * c
    m, coef, zero = _reciprocal_table(n, float(q))
    out = zero + np.cos(base @ m.T) @ coef
    box = _int_box(n, -(L + _EWALD_REAL), L + _EWALD_REAL)
    outside = np.max(np.abs(box), axis=1) > L
    step = max(1, 200_000 // base.shape[0])
    for i in range(0, box.shape[0], step):
        kk, far = box[i:i + step], outside[i:i + step]
        r2 = np.sum((base[:, None, :] + TWO_PI * kk[None, :, :]) ** 2, axis=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            short = special.gammaincc(0.5 * q, _ETA * r2) * r2 ** (-0.5 * q)
        out += np.where(far, short, -_ewald_smooth(r2, q)).sum(axis=1)
    return out.reshape(lead)


def riesz_tail_bound(q: float, n: int, R: int) -> float:
    """Rigorous bound of ``sum_{|k|_inf > R} |x + 2 pi k|^(-q)`` uniform in ``x`` in ``Q_n``.

    On the shell ``|k|_inf = m`` every term obeys ``|x + 2 pi k| >= pi (2m - 1)``
    and the shell holds ``(2m+1)^n - (2m-1)^n`` points; the resulting series over
    odd integers ``u = 2m - 1`` is summed with Hurwitz zeta functions.
    """
    if q <= n:
        raise DomainError(f"lattice sum diverges for q={q} <= n={n}")

    def odd(s):
        # sum over odd u > 2R - 1 of u^(-s)
        return 2.0 ** (-s) * float(special.zeta(s, R + 0.5))

    if n == 1:
        total = 2.0 * odd(q)
    elif n == 2:
        total = 4.0 * odd(q - 1.0) + 4.0 * odd(q)
    elif n == 3:
        total = 6.0 * odd(q - 2.0) + 12.0 * odd(q - 1.0) + 8.0 * odd(q)
    else:
        raise DomainError("dimension must be 1, 2 or 3")
    return math.pi ** (-q) * total


def epstein_zeta_continued(n: int, s: float) -> float:
    """Analytic continuation of ``Z_n(s) = sum_{k != 0} |k|^(-s)`` for ``n`` in {1, 2}.

    ``Z_1(s) = 2 zeta(s)``; ``Z_2(s) = 4 zeta(s/2) beta(s/2)`` with the Dirichlet
    beta function.  Valid away from the pole at ``s = n``.
    """
    if n == 1:
        return float(2 * mpmath.zeta(s))
    if n == 2:
        h = mpmath.mpf(s) / 2
        beta = mpmath.mpf(4) ** (-h) * (mpmath.zeta(h, 0.25) - mpmath.zeta(h, 0.75))
        return float(4 * mpmath.zeta(h) * beta)
    raise DomainError("continued Epstein zeta available for n in {1, 2}")
