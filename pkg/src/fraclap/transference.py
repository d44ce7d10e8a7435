"""Both sides of the transference identity

    int_{R^n} (Rv)(x) (-Delta)^sigma phi(x) dx = int_Q v(z) (-Delta)^sigma (p_Sigma phi)(z) dz,

the ``L_sigma`` integral of a repetition, and their independent cross-checks.

For ``phi(x) = exp(-a |x - c|^2)`` the function ``f = (-Delta)^sigma phi`` is
radial about ``c``.  Near the centre it is computed from

    f(r) = int_0^inf rho^(2 sigma + n - 1) phi_hat(rho) S_n(rho r) drho

(``S_1 = 2 cos``, ``S_2 = 2 pi J_0``, ``S_3 = 4 pi sinc``) with Gauss-Jacobi
quadrature absorbing the factor ``rho^(2 sigma + n - 1)``.  Far away the
asymptotic series

    f(r) ~ sum_s d_s r^(-n - 2 sigma - 2 s),
    d_s = 4^sigma Gamma(n/2 + sigma) / Gamma(-sigma) a^(-n/2 - s) (n/2 + sigma)_s (sigma + 1)_s / s!

is used; its omitted exponentially small part is below ``exp(-a r^2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import DomainError, UnsupportedError
from .lattice import TWO_PI, _int_box, riesz_tail, riesz_tail_bound
from .periodize import SchwartzProfile
from .special_fn import gamma, weight_fourier_coefficients
from .spectral_core import FracOrder, SpectralFunction, TorusFunction

# a r^2 beyond which the asymptotic series is used
FAR_FIELD = 45.0
# exp(-b Xi^2) at the spectral cut-off
_SPECTRAL_DECAY = 41.4
_GJ_NODES = 256
_SERIES_TERMS = 30


@lru_cache(maxsize=None)
def _gauss_jacobi(m, beta):
    t, w = special.roots_jacobi(m, 0.0, beta)
    return t, w


def _far_coefficients(n, sigma, a, count):
    s = np.arange(count)
    alpha = 0.5 * n + sigma
    lead = 4.0**sigma * gamma(alpha) / gamma(-sigma)
    log_poch = (special.gammaln(alpha + s) - special.gammaln(alpha)
                + special.gammaln(sigma + 1 + s) - special.gammaln(sigma + 1)
                - special.gammaln(s + 1))
    return lead * a ** (-0.5 * n - s) * np.exp(log_poch)


def _radial_kernel(n, u):
    if n == 1:
        return 2.0 * np.cos(u)
    if n == 2:
        return TWO_PI * special.j0(u)
    return 4.0 * math.pi * np.sinc(u / math.pi)


def _near(n, sigma, a, r, m=_GJ_NODES):
    b = 0.25 / a
    xi = math.sqrt(_SPECTRAL_DECAY / b)
    beta = 2.0 * sigma + n - 1.0
    t, w = _gauss_jacobi(m, beta)
    rho = 0.5 * xi * (1.0 + t)
    amp = (4.0 * math.pi * a) ** (-0.5 * n) * np.exp(-b * rho * rho) * w * (0.5 * xi) ** (beta + 1.0)
    out = np.empty(r.shape)
    for lo in range(0, r.size, 4096):
        chunk = r[lo:lo + 4096]
        out[lo:lo + 4096] = _radial_kernel(n, np.multiply.outer(chunk, rho)) @ amp
    return out


def _far(n, sigma, a, r):
    d = _far_coefficients(n, sigma, a, _SERIES_TERMS)
    q = n + 2.0 * sigma
    inv = 1.0 / (r * r)
    terms = d[None, :] * r[:, None] ** (-q) * inv[:, None] ** np.arange(_SERIES_TERMS)[None, :]
    return terms.sum(axis=1), float(np.max(np.abs(terms[:, -1]), initial=0.0))


def radial_profile(n: int, sigma: float, a: float, r) -> np.ndarray:
    """``(-Delta)^sigma exp(-a |x|^2)`` as a function of ``r = |x|``."""
    r = np.abs(np.asarray(r, dtype=float))
    flat = r.ravel()
    out = np.empty_like(flat)
    far = a * flat * flat >= FAR_FIELD
    if np.any(~far):
        out[~far] = _near(n, sigma, a, flat[~far])
    if np.any(far):
        out[far] = _far(n, sigma, a, flat[far])[0]
    return out.reshape(r.shape)


def _require_gaussian(phi: SchwartzProfile):
    if phi.degree:
        raise UnsupportedError("closed radial reduction needs a pure Gaussian profile")


def frac_laplacian_rn_gaussian(phi: SchwartzProfile, order: FracOrder, x) -> np.ndarray:
    """``(-Delta)^sigma phi(x)`` on ``R^n`` for a Gaussian profile; ``x`` has shape ``(..., n)``."""
    _require_gaussian(phi)
    x = np.asarray(x, dtype=float)
    if phi.n == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    r = np.sqrt(np.sum((x - np.asarray(phi.center)) ** 2, axis=-1))
    return radial_profile(phi.n, order.sigma, phi.a, r)


def near_field_error(phi: SchwartzProfile, order: FracOrder) -> float:
    """Change of the near-field quadrature when the node count is reduced by a quarter."""
    _require_gaussian(phi)
    r = np.linspace(0.0, math.sqrt(FAR_FIELD / phi.a), 64)
    full = _near(phi.n, order.sigma, phi.a, r)
    less = _near(phi.n, order.sigma, phi.a, r, m=3 * _GJ_NODES // 4)
    return float(np.max(np.abs(full - less)))


# ------------------------------------------------------------------ L_sigma

@dataclass(frozen=True)
class LsigmaResult:
    value: float
    truncated: float
    tail: float
    tail_bound: float
    radius: float


def _real_roots(s: SpectralFunction) -> np.ndarray:
    """Zeros in ``(-pi, pi]`` of a real trigonometric polynomial."""
    c = s.coefficients
    nz = np.flatnonzero(np.abs(c) > 0)
    if nz.size == 0:
        return np.array([])
    # sum c_k w^(k+M) trimmed to its lowest and highest powers
    poly = c[nz[0]:nz[-1] + 1][::-1]
    if poly.size < 2:
        return np.array([])
    w = np.roots(poly)
    on = np.abs(np.abs(w) - 1.0) < 1e-6
    ang = np.angle(w[on])
    return np.unique(np.round(ang, 14))


def _pieces(s: SpectralFunction, nodes=96):
    """Gauss-Legendre nodes and weights on ``Q`` split at the zeros of ``v``."""
    br = np.concatenate(([-math.pi], _real_roots(s), [math.pi]))
    br = np.unique(np.clip(br, -math.pi, math.pi))
    t, w = np.polynomial.legendre.leggauss(nodes)
    zs, ws = [], []
    for lo, hi in zip(br[:-1], br[1:]):
        if hi - lo < 1e-14:
            continue
        zs.append(0.5 * (hi - lo) * t + 0.5 * (hi + lo))
        ws.append(0.5 * (hi - lo) * w)
    return np.concatenate(zs), np.concatenate(ws)


def _as_spectral(v):
    if isinstance(v, TorusFunction):
        from .periodize import trig_interpolant
        return trig_interpolant(v)
    return v


def lsigma_norm(v, order: FracOrder, radius: float = TWO_PI * 4, tol: float = 1e-12) -> LsigmaResult:
    """``int_R |Rv(x)| (1 + x^2)^(-(1 + 2 sigma)/2) dx`` for ``n = 1``.

    Periods with ``|k| <= L`` (``radius = 2 pi L``) are integrated directly.
    Beyond them ``(1 + y^2)^(-p/2) = sum_j binom(-p/2, j) |y|^(-p-2j)`` and each
    power is summed over the remaining periods with Hurwitz zeta functions.
    ``tail_bound`` bounds the truncation of that binomial series.
    """
    s = _as_spectral(v)
    if s.n != 1:
        raise UnsupportedError("L_sigma integral implemented for n = 1")
    L = int(round(radius / TWO_PI))
    if L < 1 or abs(radius - TWO_PI * L) > 1e-9 * radius:
        raise DomainError("radius must be a positive multiple of 2 pi")
    p = 1.0 + 2.0 * order.sigma
    z, w = _pieces(s)
    av = np.abs(s.evaluate(z))
    k = np.arange(-L, L + 1)
    direct = float(np.sum(w * av * np.sum((1.0 + (z[:, None] + TWO_PI * k) ** 2) ** (-0.5 * p), axis=1)))
    # |y| >= 2 pi L - pi on the tail, so the binomial terms decay like (2 pi L - pi)^(-2j)
    ymin = TWO_PI * L - math.pi
    sup = float(np.max(av, initial=0.0))
    tail = 0.0
    j = 0
    coef = 1.0
    while True:
        T = riesz_tail(z, p + 2 * j, 1, L)
        tail += coef * float(np.sum(w * av * T))
        # binomial coefficient of (-p/2 choose j), updated in place
        coef *= (-0.5 * p - j) / (j + 1)
        j += 1
        nxt = abs(coef) * sup * TWO_PI * riesz_tail_bound(p + 2 * j, 1, L)
        bound = nxt / (1.0 - ymin**-2)
        if bound < tol or j > 200:
            break
    return LsigmaResult(direct + tail, direct, tail, bound, radius)


def lsigma_periodized(v, order: FracOrder, tol: float = 1e-15) -> float:
    """Cross-check ``int_Q |v| p_Sigma((1+|x|^2)^(-(n+2 sigma)/2)) dz``.

    The periodized weight is summed from its Fourier coefficients
    ``w_hat(k) ~ |k|^sigma K_sigma(|k|)``, so no spatial lattice sum appears.
    """
    s = _as_spectral(v)
    if s.n != 1:
        raise UnsupportedError("L_sigma cross-check implemented for n = 1")
    K = 8
    while weight_fourier_coefficients(1, order.sigma, np.array([float(K)]))[0] > tol:
        K += 8
    k = np.arange(1, K + 1, dtype=float)
    wh0 = weight_fourier_coefficients(1, order.sigma, np.array([0.0]))[0]
    wh = weight_fourier_coefficients(1, order.sigma, k)
    z, w = _pieces(s)
    W = wh0 + 2.0 * np.cos(np.multiply.outer(z, k)) @ wh
    return float(np.sum(w * np.abs(s.evaluate(z)) * W))


# --------------------------------------------------------------- transference

@dataclass(frozen=True)
class TransferenceReport:
    lhs: float
    rhs: float
    residual: float
    budget: dict = field(default_factory=dict)
    tolerance: float = 0.0

    @property
    def error_budget(self) -> float:
        return float(sum(self.budget.values()))

    @property
    def passed(self) -> bool:
        return self.residual <= max(self.tolerance, self.error_budget)

    def to_text(self) -> str:
        lines = [f"lhs={self.lhs:.17g}", f"rhs={self.rhs:.17g}", f"residual={self.residual:.17g}",
                 f"tolerance={self.tolerance:.17g}", f"error_budget={self.error_budget:.17g}"]
        lines += [f"budget.{k}={v:.17g}" for k, v in sorted(self.budget.items())]
        lines.append("status=" + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"


def transference_rhs(v: SpectralFunction, phi: SchwartzProfile, order: FracOrder) -> float:
    """``(2 pi)^n sum_k conj(c_k(v)) |k|^(2 sigma) phi_hat(k)``."""
    k = v.wavenumbers()
    mult = v.kabs() ** (2.0 * order.sigma)
    val = np.sum(np.conj(v.coefficients) * mult * phi.fourier(k))
    return float(TWO_PI**phi.n * val.real)


def _quadrature_nodes(n, count):
    h = TWO_PI / count
    ax = -math.pi + h * np.arange(1, count + 1)
    pts = np.stack(np.meshgrid(*([ax] * n), indexing="ij"), axis=-1).reshape(-1, n)
    return pts, h**n


def periodized_profile(phi: SchwartzProfile, order: FracOrder, z, L: int):
    """``sum_k f(z - c + 2 pi k)`` with the images ``|k - k0|_inf > L`` summed
    through the far-field series and exact lattice tails.  Returns the values
    and the size of the first omitted series term."""
    _require_gaussian(phi)
    n, sig, a = phi.n, order.sigma, phi.a
    c = np.asarray(phi.center)
    k0 = np.round(c / TWO_PI)
    base = z - (c - TWO_PI * k0)
    total = np.zeros(base.shape[0])
    for kk in _int_box(n, -L, L):
        y = base + TWO_PI * kk
        total += radial_profile(n, sig, a, np.sqrt(np.sum(y * y, axis=1)))
    q = n + 2.0 * sig
    d = _far_coefficients(n, sig, a, 80)
    scale = max(float(np.max(np.abs(total), initial=0.0)), abs(d[0]) * riesz_tail_bound(q, n, L))
    omitted = 0.0
    for s_idx in range(80):
        bound = abs(d[s_idx]) * riesz_tail_bound(q + 2 * s_idx, n, L)
        if bound < 1e-17 * scale:
            omitted = bound
            break
        total += d[s_idx] * riesz_tail(base, q + 2 * s_idx, n, L)
    else:
        omitted = bound
    return total, omitted


def verify_transference(v: SpectralFunction, phi: SchwartzProfile, order: FracOrder,
                        tol: float = 1e-7, nodes: int = None) -> TransferenceReport:
    """Evaluate both sides of the identity independently.

    The left side reduces, period by period, to ``int_Q v(z) P(z) dz`` with
    ``P`` the periodization of ``f = (-Delta)^sigma phi`` on ``R^n``; ``P`` is
    built from ``R^n`` quantities only and integrated by the trapezoid rule,
    which is spectrally accurate for the smooth periodic integrand.  The
    right side is the spectral pairing on the torus.
    """
    _require_gaussian(phi)
    if v.n != phi.n:
        raise DomainError("dimension mismatch")
    n, a = phi.n, phi.a
    if nodes is None:
        nodes = 2 * int(math.ceil(0.5 * (2 * v.M + 2 + math.sqrt(320.0 * a))))
    L = max(1, int(math.ceil(math.sqrt(FAR_FIELD / a) / TWO_PI)))
    z, wq = _quadrature_nodes(n, nodes)
    P, omitted = periodized_profile(phi, order, z, L)
    vz = v.evaluate(z)
    lhs = float(math.fsum(wq * vz * P))
    rhs = transference_rhs(v, phi, order)
    mass = float(np.sum(np.abs(v.coefficients)))
    # trapezoid aliasing: modes of P beyond nodes - M fold onto those of v
    kk = np.arange(nodes - v.M, nodes - v.M + 40, dtype=float)
    alias = TWO_PI**n * mass * float(np.sum(n * (2 * kk + 1) ** (n - 1) * kk ** (2 * order.sigma)
                                            * (4 * math.pi * a) ** (-0.5 * n) * np.exp(-kk * kk / (4 * a))))
    budget = {
        "near_field": TWO_PI**n * mass * near_field_error(phi, order) * (2 * L + 1) ** n,
        "lattice_tail": TWO_PI**n * mass * omitted,
        "aliasing": alias,
        "rounding": 64 * np.finfo(float).eps * (abs(lhs) + float(np.sum(wq * np.abs(vz * P)))),
    }
    return TransferenceReport(lhs, rhs, abs(lhs - rhs), budget, tol)
