"""The extension problem on the torus times a half line.

Mode by mode, ``V_yy + (1 - 2 sigma)/y V_y = |k|^2 V`` with ``V(0) = c_k`` and
decay at infinity is solved by ``c_k m(|k| y)`` where

    m(s) = 2^(1 - sigma) / Gamma(sigma) * s^sigma K_sigma(s),   m(0) = 1.

With ``d/ds [s^nu K_nu(s)] = -s^nu K_(nu-1)(s)`` the weighted conormal
derivative of a single mode is

    -y^(1-2 sigma) d/dy m(|k| y) = 2^(1-sigma)/Gamma(sigma) |k|^(2 sigma) t^(1-sigma) K_(1-sigma)(t),

``t = |k| y``, which tends to ``c_sigma |k|^(2 sigma)`` as ``y -> 0``.  Its
small-``t`` expansion contains the powers ``t^(2 - 2 sigma + 2i)`` and
``t^(2 + 2i)``, which fixes the exponents used for extrapolation.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import AccuracyError, DomainError
from .special_fn import gamma, kv
from .spectral_core import FracOrder, SpectralFunction, TorusFunction, TorusGrid, synthesize

DEFAULT_Y = tuple(0.1 * 2.0 ** (-j) for j in range(9))


def extension_multiplier(order: FracOrder, s) -> np.ndarray:
    """``m(s)`` for ``s >= 0`` (vectorised); decreasing from 1 to 0."""
    sig = order.sigma
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise DomainError("multiplier argument must be non-negative")
    out = np.ones_like(s)
    pos = s > 0
    if np.any(pos):
        sp = s[pos]
        # clip rounding above the exact bound m <= 1
        out[pos] = np.minimum(2.0 ** (1.0 - sig) / gamma(sig) * sp**sig * kv(sig, sp), 1.0)
    return out if out.ndim else float(out)


def extension_multiplier_derivative(order: FracOrder, s) -> np.ndarray:
    """``m'(s) = -2^(1-sigma)/Gamma(sigma) s^sigma K_(1-sigma)(s)`` for ``s > 0``."""
    sig = order.sigma
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise DomainError("derivative is evaluated for s > 0")
    return -(2.0 ** (1.0 - sig) / gamma(sig)) * s**sig * kv(1.0 - sig, s)


def _conormal_factor(order: FracOrder, kabs: np.ndarray, y: float) -> np.ndarray:
    """``-y^(1-2 sigma) d/dy m(|k| y)`` per mode (zero for ``k = 0``)."""
    out = np.zeros_like(kabs)
    pos = kabs > 0
    out[pos] = -y ** (1.0 - 2.0 * order.sigma) * kabs[pos] * extension_multiplier_derivative(order, kabs[pos] * y)
    return out


@dataclass(frozen=True, eq=False)
class ExtensionField:
    """``V(z, y) = sum_k c_k m(|k| y) exp(i k.z)``."""

    data: SpectralFunction
    order: FracOrder

    def coefficients(self, y: float) -> SpectralFunction:
        if y < 0:
            raise DomainError("y must be non-negative")
        m = extension_multiplier(self.order, self.data.kabs() * y)
        return self.data.with_coefficients(self.data.coefficients * m)

    def __call__(self, z, y: float) -> np.ndarray:
        return self.coefficients(y).evaluate(z)

    def conormal(self, y: float) -> SpectralFunction:
        """Coefficients of ``-y^(1-2 sigma) V_y(., y)``."""
        if not y > 0:
            raise DomainError("y must be positive")
        f = _conormal_factor(self.order, self.data.kabs(), y)
        return self.data.with_coefficients(self.data.coefficients * f)


def extend(v: SpectralFunction, order: FracOrder, y: float, grid: TorusGrid) -> TorusFunction:
    """``V(., y)`` on the grid nodes."""
    if not y > 0:
        raise DomainError("y must be positive")
    return synthesize(ExtensionField(v, order).coefficients(y), grid)


def poisson_kernel(n: int, order: FracOrder, y: float, r) -> np.ndarray:
    """``P_y(x) = C y^(2 sigma) / (|x|^2 + y^2)^((n + 2 sigma)/2)``, unit mass."""
    sig = order.sigma
    C = gamma(0.5 * n + sig) / (math.pi ** (0.5 * n) * gamma(sig))
    r = np.asarray(r, dtype=float)
    return C * y ** (2 * sig) / (r * r + y * y) ** (0.5 * n + sig)


def poisson_convolution(v: SpectralFunction, order: FracOrder, y: float, grid: TorusGrid) -> TorusFunction:
    """``(P_y * Rv)`` on the grid for ``n = 1`` by oscillatory quadrature.

    ``int P_y(x) Rv(z - x) dx = sum_k c_k exp(i k z) * 2 int_0^inf P_y(x) cos(k x) dx``
    and each cosine integral is done with QAWF, independently of Bessel functions.
    """
    if v.n != 1:
        raise DomainError("direct Poisson convolution implemented for n = 1")
    if not y > 0:
        raise DomainError("y must be positive")
    coef = np.zeros(2 * v.M + 1, dtype=complex)
    cache = {}
    for (k,), c in v.items():
        ka = abs(k)
        if ka not in cache:
            if ka == 0:
                cache[ka] = 1.0
            else:
                # peak of width y near the origin, oscillatory tail beyond
                cut = max(1.0, 50.0 * y)
                with warnings.catch_warnings():
                    # QAWF flags the slow algebraic decay; the comparison tests judge accuracy
                    warnings.simplefilter("ignore", integrate.IntegrationWarning)
                    head, _ = integrate.quad(lambda x: poisson_kernel(1, order, y, x) * math.cos(ka * x),
                                             0.0, cut, points=[y], limit=400, epsabs=1e-14, epsrel=1e-12)
                    tail, _ = integrate.quad(lambda x: poisson_kernel(1, order, y, x), cut, np.inf,
                                             weight="cos", wvar=ka, limlst=200, limit=400, epsabs=1e-14)
                cache[ka] = 2.0 * (head + tail)
        coef[k + v.M] = c * cache[ka]
    return synthesize(v.with_coefficients(coef), grid)


def _exponents(sigma: float, count: int) -> list[float]:
    ex = [2.0 - 2.0 * sigma + 2 * i for i in range(count)] + [2.0 + 2 * i for i in range(count)]
    return sorted(ex)[:count]


def extrapolate(ys, values, exponents) -> tuple[np.ndarray, float]:
    """Fit ``F(y) = L + sum_p a_p y^p`` and return ``(L, error estimate)``.

    ``values`` has one row per ``y``.  Every point is used with the
    ``len(ys) - 1`` smallest exponents; the estimate is the change in ``L``
    when the largest ``y`` and the last exponent are dropped.
    """
    ys = np.asarray(ys, dtype=float)
    F = np.asarray(values, dtype=float).reshape(len(ys), -1)
    scale = ys[0]

    def fit(y, f, p):
        A = np.column_stack([np.ones_like(y)] + [(y / scale) ** e for e in p])
        return np.linalg.solve(A, f)[0]

    m = len(ys) - 1
    full = fit(ys, F, exponents[:m])
    less = fit(ys[1:], F[1:], exponents[: m - 1])
    return full, float(np.max(np.abs(full - less)))


@dataclass(frozen=True)
class ConormalResult:
    limit_field: TorusFunction
    limit_coefficients: SpectralFunction
    richardson_error: float


def conormal_limit(v: SpectralFunction, order: FracOrder, grid: TorusGrid, y_sequence=DEFAULT_Y) -> ConormalResult:
    """``-lim_{y -> 0} y^(1-2 sigma) V_y`` by extrapolation along ``y_sequence``.

    The limit is extrapolated coefficient-wise and then synthesised; the
    error estimate is reported in the sup norm of the field.
    """
    ys = np.asarray(y_sequence, dtype=float)
    if ys.size < 4:
        raise DomainError("need at least 4 values of y")
    if np.any(ys <= 0) or np.any(np.diff(ys) >= 0):
        raise DomainError("y_sequence must be positive and strictly decreasing")
    kabs = v.kabs()
    rows = np.array([_conormal_factor(order, kabs, y).ravel() for y in ys])
    factor, err = extrapolate(ys, rows, _exponents(order.sigma, ys.size - 1))
    scale = float(np.max(np.abs(factor), initial=0.0))
    if not np.all(np.isfinite(factor)) or err > 1e-3 * max(scale, 1.0):
        raise AccuracyError("extrapolation did not settle", estimate=err)
    coeffs = v.with_coefficients(v.coefficients * factor.reshape(kabs.shape))
    mass = float(np.sum(np.abs(v.coefficients)))
    return ConormalResult(synthesize(coeffs, grid), coeffs, err * mass)
