"""Repetition and periodization operators, the Gaussian test family and the
bump partition of unity.

Test functions are ``phi(x) = prod_i (x_i - c_i)^{m_i} exp(-a |x - c|^2)`` with
closed-form transform

    phi_hat(xi) = exp(-i c.xi) (2 pi)^(-n) (pi/a)^(n/2)
                  prod_i (-i sqrt(b))^{m_i} H_{m_i}(sqrt(b) xi_i) exp(-b |xi|^2),

``b = 1/(4a)``, ``H_m`` the physicists' Hermite polynomials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import hermite as H

from .errors import AccuracyError, ConfigurationError, DomainError
from .lattice import TWO_PI, _int_box, wrap
from .spectral_core import SpectralFunction, TorusFunction, TorusGrid

MAX_RADIUS = 60


@dataclass(frozen=True)
class LatticeSumConfig:
    radius: int = 2
    tol: float = 1e-12

    def __post_init__(self):
        if self.radius < 1:
            raise ConfigurationError("lattice radius must be >= 1")
        if not self.tol > 0:
            raise ConfigurationError("tolerance must be positive")


@dataclass(frozen=True)
class SchwartzProfile:
    n: int
    a: float
    center: tuple = None
    monomial: tuple = None
    kind: str = "gaussian"

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError("width parameter a must be positive")
        center = tuple(float(c) for c in (self.center or (0.0,) * self.n))
        mono = tuple(int(m) for m in (self.monomial or (0,) * self.n))
        if len(center) != self.n or len(mono) != self.n:
            raise DomainError("center and monomial need n components")
        if any(m < 0 for m in mono):
            raise DomainError("monomial exponents must be non-negative")
        kind = "gaussian_times_monomial" if any(mono) else self.kind
        if kind not in ("gaussian", "gaussian_times_monomial"):
            raise DomainError(f"unknown profile kind {kind!r}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "monomial", mono)
        object.__setattr__(self, "kind", kind)

    @property
    def degree(self) -> int:
        return sum(self.monomial)

    def shifted(self, offset) -> "SchwartzProfile":
        off = np.broadcast_to(np.asarray(offset, dtype=float), (self.n,))
        return SchwartzProfile(self.n, self.a, tuple(np.add(self.center, off)), self.monomial, self.kind)

    def centered(self, y) -> np.ndarray:
        """Profile evaluated at ``y = x - center``; ``y`` has shape ``(..., n)``."""
        y = np.asarray(y, dtype=float)
        out = np.exp(-self.a * np.sum(y * y, axis=-1))
        for i, m in enumerate(self.monomial):
            if m:
                out = out * y[..., i] ** m
        return out

    def __call__(self, x) -> np.ndarray:
        return self.centered(np.asarray(x, dtype=float) - np.asarray(self.center))

    def fourier(self, xi) -> np.ndarray:
        """Closed-form ``phi_hat(xi)``; ``xi`` has shape ``(..., n)``."""
        xi = np.asarray(xi, dtype=float)
        b = 0.25 / self.a
        sb = math.sqrt(b)
        out = (TWO_PI ** (-self.n) * (math.pi / self.a) ** (0.5 * self.n)
               * np.exp(-b * np.sum(xi * xi, axis=-1)) + 0j)
        for i, m in enumerate(self.monomial):
            if m:
                coef = np.zeros(m + 1)
                coef[m] = 1.0
                out = out * (-1j * sb) ** m * H.hermval(sb * xi[..., i], coef)
        if any(self.center):
            out = out * np.exp(-1j * (xi @ np.asarray(self.center)))
        return out

    def mass(self) -> float:
        """``int phi dx``."""
        return float((TWO_PI**self.n * self.fourier(np.zeros(self.n))).real)

    def to_record(self) -> str:
        c = ",".join(format(x, ".17g") for x in self.center)
        m = ",".join(str(x) for x in self.monomial)
        return f"kind={self.kind} a={self.a!r} center={c} monomial={m}"

    @classmethod
    def from_record(cls, text: str) -> "SchwartzProfile":
        fields = dict(tok.split("=", 1) for tok in text.split())
        center = tuple(float(x) for x in fields["center"].split(","))
        mono = tuple(int(x) for x in fields.get("monomial", ",".join("0" * len(center))).split(","))
        return cls(len(center), float(fields["a"]), center, mono, fields.get("kind", "gaussian"))


@dataclass(frozen=True)
class LatticeValue:
    value: np.ndarray
    tail_bound: float
    radius: int


def _shell_count(n, m):
    return (2 * m + 1) ** n - (2 * m - 1) ** n


def _geometric_tail(term, ratio, start):
    """Sum ``term(m)`` for ``m >= start`` given non-increasing ratio bounds."""
    total = 0.0
    m = start
    while ratio(m) >= 0.5:
        total += term(m)
        m += 1
        if m > start + 10_000:
            return math.inf
    return total + term(m) / (1.0 - ratio(m))


def spatial_tail_bound(phi: SchwartzProfile, R: int) -> float:
    """Bound of ``sum_{|k|_inf > R} |phi_c(y + 2 pi k)|`` for ``y`` in ``Q_n``."""
    n, a, d = phi.n, phi.a, phi.degree
    # g(r) = r^d exp(-a r^2) decreases for r^2 > d / (2a)
    r_min = math.sqrt(d / (2.0 * a)) if d else 0.0
    start = R + 1
    while math.pi * (2 * start - 1) < r_min:
        start += 1

    def log_g(r):
        return d * math.log(r) - a * r * r

    def g(r):
        return math.exp(log_g(r)) if r > 0 else 0.0

    def term(m):
        return _shell_count(n, m) * g(math.pi * (2 * m - 1))

    def ratio(m):
        # log space: g itself underflows long before the ratio does
        r0, r1 = math.pi * (2 * m - 1), math.pi * (2 * m + 1)
        return _shell_count(n, m + 1) / _shell_count(n, m) * math.exp(log_g(r1) - log_g(r0))

    # shells between R+1 and start are bounded by the peak value of g
    peak = g(r_min) if d else 1.0
    head = sum(_shell_count(n, m) * peak for m in range(R + 1, start))
    return head + _geometric_tail(term, ratio, start)


def _hermite_abs_bound(m):
    coef = np.zeros(m + 1)
    coef[m] = 1.0
    return np.abs(H.herm2poly(coef))


def spectral_tail_bound(phi: SchwartzProfile, R: int) -> float:
    """Bound of ``sum_{|k|_inf > R} |phi_hat(k)|``."""
    n = phi.n
    b = 0.25 / phi.a
    sb = math.sqrt(b)
    amp = TWO_PI ** (-n) * (math.pi / phi.a) ** (0.5 * n) * sb**phi.degree
    polys = [_hermite_abs_bound(m) for m in phi.monomial]

    def poly(r):
        # |H_m(t)| <= sum |h_j| |t|^j with |t| <= sqrt(b n) r on the shell
        t = sb * math.sqrt(n) * r
        return math.prod(np.polynomial.polynomial.polyval(t, p) for p in polys)

    def term(m):
        return amp * _shell_count(n, m) * poly(m) * math.exp(-b * m * m)

    def ratio(m):
        return (_shell_count(n, m + 1) / _shell_count(n, m) * poly(m + 1) / poly(m)
                * math.exp(-b * (2 * m + 1)))

    return float(_geometric_tail(term, ratio, R + 1))


def _choose_radius(bound_fn, cfg: LatticeSumConfig):
    R = cfg.radius
    bound = bound_fn(R)
    while bound > cfg.tol:
        R += 1
        if R > MAX_RADIUS:
            raise AccuracyError(f"tolerance {cfg.tol} unreachable within radius {MAX_RADIUS}",
                                estimate=bound)
        bound = bound_fn(R)
    return R, bound


def _points(z, n):
    z = np.asarray(z, dtype=float)
    if n == 1 and (z.ndim == 0 or z.shape[-1] != 1):
        z = z[..., None]
    return z


def periodize(phi: SchwartzProfile, z, cfg: LatticeSumConfig = LatticeSumConfig()) -> LatticeValue:
    """``(p_Sigma phi)(z) = sum_k phi(z + 2 pi k)`` with a rigorous tail bound.

    The lattice radius is enlarged automatically until the bound meets
    ``cfg.tol``.
    """
    z = _points(z, phi.n)
    R, bound = _choose_radius(lambda r: spatial_tail_bound(phi, r), cfg)
    y = wrap(z - np.asarray(phi.center))
    total = np.zeros(y.shape[:-1])
    for k in _int_box(phi.n, -R, R):
        total = total + phi.centered(y + TWO_PI * k)
    return LatticeValue(total, bound, R)


def periodize_spectral(phi: SchwartzProfile, z, cfg: LatticeSumConfig = LatticeSumConfig()) -> LatticeValue:
    """``sum_k phi_hat(k) exp(i k.z)`` with a rigorous tail bound."""
    z = _points(z, phi.n)
    R, bound = _choose_radius(lambda r: spectral_tail_bound(phi, r), cfg)
    k = _int_box(phi.n, -R, R)
    coef = phi.fourier(k)
    total = (np.exp(1j * (z @ k.T)) @ coef).real
    return LatticeValue(total, bound, R)


def periodized_coefficients(phi: SchwartzProfile, M: int) -> SpectralFunction:
    """Fourier coefficients ``c_k(p_Sigma phi) = phi_hat(k)`` for ``|k|_inf <= M``."""
    r = np.arange(-M, M + 1)
    k = np.stack(np.meshgrid(*([r] * phi.n), indexing="ij"), axis=-1)
    return SpectralFunction(phi.n, M, phi.fourier(k))


@dataclass(frozen=True)
class PoissonCheck:
    spatial: np.ndarray
    spectral: np.ndarray
    residual: float
    spatial_bound: float
    spectral_bound: float


def poisson_summation_check(phi: SchwartzProfile, z, cfg: LatticeSumConfig = LatticeSumConfig()) -> PoissonCheck:
    """Sum ``phi`` over the lattice and ``phi_hat`` over ``Z^n`` independently."""
    s = periodize(phi, z, cfg)
    f = periodize_spectral(phi, z, cfg)
    res = float(np.max(np.abs(s.value - f.value)))
    return PoissonCheck(s.value, f.value, res, s.tail_bound, f.tail_bound)


# ----------------------------------------------------------------- repetition

def trig_interpolant(v: TorusFunction) -> SpectralFunction:
    """Trigonometric interpolant of grid data, Nyquist modes split evenly."""
    grid = v.grid
    M = grid.N // 2
    r = np.arange(-M, M + 1)
    E = np.exp(-1j * np.multiply.outer(r, grid.axis)) / grid.N
    c = v.array().astype(complex)
    for ax in range(grid.n):
        c = np.moveaxis(np.tensordot(E, c, axes=([1], [ax])), 0, ax)
        edge = [slice(None)] * grid.n
        for i in (0, -1):
            edge[ax] = i
            c[tuple(edge)] *= 0.5
    return SpectralFunction(grid.n, M, c)


def repetition_eval(v, x) -> np.ndarray:
    """``(Rv)(x)``: the periodic extension of ``v`` evaluated at points of ``R^n``.

    A :class:`SpectralFunction` is summed exactly at ``wrap(x)``; a
    :class:`TorusFunction` goes through its trigonometric interpolant.
    """
    s = trig_interpolant(v) if isinstance(v, TorusFunction) else v
    x = _points(x, s.n)
    return s.evaluate(wrap(x))


# ------------------------------------------------------------ bump partition

# antiderivative of (1 - u^2)^4 from 0, and its value at 1
_BUMP_P = np.polynomial.Polynomial([0.0, 1.0, 0.0, -4.0 / 3.0, 0.0, 6.0 / 5.0, 0.0, -4.0 / 7.0, 0.0, 1.0 / 9.0])
_BUMP_HALF_MASS = 128.0 / 315.0


@dataclass(frozen=True)
class BumpPartition:
    """``psi = chi_Q * eta_eps`` with the tensor-product mollifier
    ``eta_eps(x) = prod_i c (1 - (x_i/eps)^2)_+^4``, unit mass per axis."""

    n: int
    eps: float = 1.0

    def __post_init__(self):
        if not self.eps > 0:
            raise ConfigurationError("mollifier width must be positive")
        pts = np.random.default_rng(12345).uniform(-3 * math.pi, 3 * math.pi, (64, self.n))
        resid = self.partition_residual(pts)
        if resid > 1e-10:
            raise ConfigurationError(f"partition of unity residual {resid:.2e}")

    def _cdf(self, t):
        u = np.clip(np.asarray(t, dtype=float) / self.eps, -1.0, 1.0)
        return 0.5 + _BUMP_P(u) / (2.0 * _BUMP_HALF_MASS)

    def __call__(self, x) -> np.ndarray:
        x = _points(x, self.n)
        out = np.ones(x.shape[:-1])
        for i in range(self.n):
            out = out * (self._cdf(x[..., i] + math.pi) - self._cdf(x[..., i] - math.pi))
        return out

    @property
    def support_radius(self) -> float:
        return math.pi + self.eps

    def periodized(self, z) -> np.ndarray:
        return periodize_callable(self, z, self.n, self.support_radius)

    def partition_residual(self, z) -> float:
        return float(np.max(np.abs(self.periodized(z) - 1.0)))


def periodize_callable(f: Callable, z, n: int, support_radius: float) -> np.ndarray:
    """Exact periodization of a function supported in ``[-r, r]^n``."""
    z = wrap(_points(z, n))
    K = int(math.ceil((support_radius + math.pi) / TWO_PI))
    total = np.zeros(z.shape[:-1])
    for k in _int_box(n, -K, K):
        total = total + f(z + TWO_PI * k)
    return total


def bump_lift(phi_torus: SpectralFunction, part: BumpPartition) -> Callable:
    """Compactly supported ``phi = psi * R(phi_torus)`` with ``p_Sigma phi = phi_torus``."""
    if phi_torus.n != part.n:
        raise DomainError("dimension mismatch")

    def lifted(x):
        x = _points(x, part.n)
        return part(x) * repetition_eval(phi_torus, x)

    lifted.support_radius = part.support_radius
    return lifted
