"""Periodized Riesz kernel, the principal-value formula on the torus and a
nonlocal Dirichlet solver.

The kernel is ``K(x) = C(n, sigma) * sum_k |x + 2 pi k|^(-(n + 2 sigma))`` and

    (-Delta)^sigma v(x) = P.V. int_Q (v(x) - v(z)) K(x - z) dz.

Quadrature
----------
The punctured trapezoid rule over grid offsets is used in its symmetrised
form ``(1/2) sum_{j != 0} (2 v_i - v_{i+j} - v_{i-j}) K(w_j) h^n``.  Near the
origin the integrand behaves like ``-(C/2) |w|^(-n-2 sigma) (w.grad)^2 v``,
whose punctured lattice sum misses a term of order ``h^(2 - 2 sigma)``.  The
generalised Euler-Maclaurin (Navot) expansion gives it in closed form:

    + C / (2n) * Delta v(x) * Z_n(n + 2 sigma - 2) * h^(2 - 2 sigma),

with ``Z_n`` the continued Epstein zeta function of ``Z^n``.  For ``n = 1``
the next term ``+ (C/12) zeta(2 sigma - 3) v''''(x) h^(4 - 2 sigma)`` is
added as well.  Derivatives come from the trigonometric interpolant.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import AccuracyError, ConfigurationError, DomainError, UnsupportedError
from .lattice import TWO_PI, _int_box, epstein_zeta_continued, riesz_sum, riesz_tail, riesz_tail_bound, wrap
from .periodize import LatticeSumConfig, trig_interpolant
from .spectral_core import FracOrder, TorusFunction, TorusGrid, synthesize

MAX_DIRECT_RADIUS = 40


@dataclass(frozen=True)
class KernelValue:
    value: float
    lower: float
    upper: float
    radius: int


@dataclass(frozen=True)
class PeriodizedKernel:
    n: int
    order: FracOrder
    cfg: LatticeSumConfig = LatticeSumConfig(radius=2, tol=1e-10)
    constant: float = None

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise DomainError("dimension must be 1, 2 or 3")
        if self.constant is None:
            object.__setattr__(self, "constant", self.order.kernel_const(self.n))

    @property
    def exponent(self) -> float:
        return self.n + 2.0 * self.order.sigma

    def tail_bound(self, R: int) -> float:
        """Bound of the omitted lattice terms beyond ``|k|_inf = R`` (unscaled)."""
        return riesz_tail_bound(self.exponent, self.n, R)

    def radius(self) -> int:
        """Smallest radius (capped) whose tail bound meets the tolerance."""
        R = self.cfg.radius
        while self.tail_bound(R) > self.cfg.tol and R < MAX_DIRECT_RADIUS:
            R += 1
        return R

    def __call__(self, x) -> np.ndarray:
        """Vectorised kernel values at points of shape ``(..., n)``; zero maps to inf."""
        pts = np.asarray(x, dtype=float)
        if self.n == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
            pts = pts[..., None]
        w = wrap(pts)
        r2 = np.sum(w * w, axis=-1)
        out = self.constant * riesz_sum(w, self.exponent, self.n)
        return np.where(r2 > 0, out, np.inf)


def kernel_eval(ker: PeriodizedKernel, x) -> KernelValue:
    """``K(x)`` together with a rigorous enclosure.

    ``lower`` is the direct sum over ``|k|_inf <= R``; ``upper`` adds the shell
    tail bound.  ``value`` completes the direct sum with the exact remainder
    (Hurwitz zeta for ``n = 1``, Ewald splitting otherwise).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != ker.n:
        raise DomainError("point must have n components")
    y = wrap(x)
    if not np.any(y != 0):
        raise DomainError("kernel is singular at the origin")
    q = ker.exponent
    R = ker.radius()
    box = _int_box(ker.n, -R, R)
    direct = float(np.sum(np.sum((y + TWO_PI * box) ** 2, axis=1) ** (-0.5 * q)))
    rest = float(riesz_tail(y[None, :], q, ker.n, R)[0])
    bound = ker.tail_bound(R)
    C = ker.constant
    return KernelValue(C * (direct + rest), C * direct, C * (direct + bound), R)


def _offset_weights(ker: PeriodizedKernel, grid: TorusGrid) -> np.ndarray:
    """``h^n K(w)`` on the grid offsets in FFT order, zero at the origin."""
    idx = np.fft.fftfreq(grid.N, 1.0 / grid.N)
    off = np.stack(np.meshgrid(*([idx * grid.h] * grid.n), indexing="ij"), axis=-1)
    vals = ker(off.reshape(-1, grid.n)).reshape(grid.shape)
    vals[(0,) * grid.n] = 0.0
    return vals * grid.h**grid.n


def local_correction(grid: TorusGrid, order: FracOrder, constant: float, v: TorusFunction) -> np.ndarray:
    """The Navot terms missing from the punctured rule at every node."""
    n, s, h = grid.n, order.sigma, grid.h
    c = trig_interpolant(v)
    ksq = np.sum(c.wavenumbers() ** 2, axis=-1)
    lap = synthesize(c.with_coefficients(-ksq * c.coefficients), grid).values
    out = constant / (2 * n) * lap * epstein_zeta_continued(n, n + 2 * s - 2) * h ** (2 - 2 * s)
    if n == 1:
        d4 = synthesize(c.with_coefficients(ksq**2 * c.coefficients), grid).values
        out = out + constant / 12.0 * epstein_zeta_continued(1, 2 * s - 3) / 2 * d4 * h ** (4 - 2 * s)
    return out


def _resolution_warning(v: TorusFunction):
    c = trig_interpolant(v)
    k = np.max(np.abs(c.wavenumbers()), axis=-1)
    total = np.sum(np.abs(c.coefficients) ** 2)
    high = np.sum(np.abs(c.coefficients[k > v.grid.N // 4]) ** 2)
    if total > 0 and high > 1e-16 * total:
        warnings.warn("grid under-resolves v; the near-field correction may be invalid",
                      RuntimeWarning, stacklevel=3)


def frac_laplacian_pointwise(v: TorusFunction, order: FracOrder,
                             cfg: LatticeSumConfig = LatticeSumConfig(radius=2, tol=1e-10),
                             constant: float = None, correction: bool = True) -> TorusFunction:
    """Principal-value quadrature of ``(-Delta)^sigma v`` at every node.

    The offset sum is a circular convolution and is applied with the FFT.
    """
    grid = v.grid
    if grid.n == 3:
        raise UnsupportedError("the kernel method is implemented for n in {1, 2}")
    _resolution_warning(v)
    ker = PeriodizedKernel(grid.n, order, cfg, constant)
    W = _offset_weights(ker, grid)
    a = v.array()
    conv = np.fft.ifftn(np.fft.fftn(W) * np.fft.fftn(a)).real
    out = a * W.sum() - conv
    if correction:
        out = out + local_correction(grid, order, ker.constant, v).reshape(grid.shape)
    return TorusFunction(grid, out.ravel())


def discrete_symbol(grid: TorusGrid, order: FracOrder, k, correction: bool = True) -> float:
    """Eigenvalue of the corrected quadrature on the mode ``exp(i k.z)``."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    ker = PeriodizedKernel(grid.n, order)
    W = _offset_weights(ker, grid)
    idx = np.fft.fftfreq(grid.N, 1.0 / grid.N) * grid.h
    off = np.stack(np.meshgrid(*([idx] * grid.n), indexing="ij"), axis=-1)
    lam = float(np.sum(W * (1.0 - np.cos(off @ k))))
    if correction:
        n, s, h = grid.n, order.sigma, grid.h
        ksq = float(k @ k)
        lam -= ker.constant / (2 * n) * ksq * epstein_zeta_continued(n, n + 2 * s - 2) * h ** (2 - 2 * s)
        if n == 1:
            lam += ker.constant / 24.0 * epstein_zeta_continued(1, 2 * s - 3) * ksq**2 * h ** (4 - 2 * s)
    return lam


# ------------------------------------------------------------ Dirichlet problem

@dataclass(frozen=True, eq=False)
class NonlocalDirichletProblem:
    grid: TorusGrid
    interior: np.ndarray
    exterior_data: np.ndarray
    order: FracOrder
    cfg: LatticeSumConfig = field(default_factory=lambda: LatticeSumConfig(radius=2, tol=1e-10))

    def __post_init__(self):
        mask = np.asarray(self.interior, dtype=bool).reshape(-1)
        g = np.asarray(self.exterior_data, dtype=float).reshape(-1)
        if mask.size != self.grid.size or g.size != self.grid.size:
            raise ConfigurationError("mask and data must cover the grid")
        if not mask.any() or mask.all():
            raise ConfigurationError("interior must be nonempty and a proper subset")
        if not np.all(np.isfinite(g[~mask])):
            raise ConfigurationError("exterior data must be finite")
        object.__setattr__(self, "interior", mask)
        object.__setattr__(self, "exterior_data", np.where(mask, 0.0, g))


def stiffness(p: NonlocalDirichletProblem):
    """Coupling weights ``W_ij = h^n K(x_i - x_j)`` (rows: interior nodes).

    Returns ``(A, B)`` with ``A`` the interior block of the operator
    (``A_ii = sum_{j != i} W_ij``, ``A_ij = -W_ij``) and ``B`` the
    interior-exterior coupling, so that ``A v_int = B g_ext``.
    """
    grid = p.grid
    ker = PeriodizedKernel(grid.n, p.order, p.cfg)
    pts = grid.points()
    inner = pts[p.interior]
    diff = inner[:, None, :] - pts[None, :, :]
    W = ker(diff.reshape(-1, grid.n)).reshape(inner.shape[0], pts.shape[0]) * grid.h**grid.n
    rows = np.flatnonzero(p.interior)
    W[np.arange(rows.size), rows] = 0.0
    A = -W[:, p.interior]
    A = 0.5 * (A + A.T)
    A[np.diag_indices_from(A)] = W.sum(axis=1)
    return A, W[:, ~p.interior]


def dirichlet_solve(p: NonlocalDirichletProblem) -> TorusFunction:
    """Solve ``(-Delta)^sigma v = 0`` on the interior nodes with ``v = g`` outside."""
    A, B = stiffness(p)
    b = B @ p.exterior_data[~p.interior]
    try:
        vi = linalg.solve(A, b, assume_a="pos")
    except (linalg.LinAlgError, ValueError) as exc:
        raise AccuracyError(f"stiffness system could not be solved: {exc}") from exc
    out = p.exterior_data.copy()
    out[p.interior] = vi
    return TorusFunction(p.grid, out)


# ------------------------------------------------------------ Harnack experiment

@dataclass(frozen=True)
class HarnackResult:
    max_ratio: float
    ratios: np.ndarray
    min_inf: float
    violations: int


def random_exterior_data(rng: np.random.Generator, n: int, degree: int = 3):
    """A squared trigonometric polynomial with normal coefficients."""
    r = np.arange(-degree, degree + 1)
    k = np.stack(np.meshgrid(*([r] * n), indexing="ij"), axis=-1).reshape(-1, n)
    a = rng.standard_normal(k.shape[0])
    b = rng.standard_normal(k.shape[0])

    def g(x):
        ph = x @ k.T
        return (np.cos(ph) @ a + np.sin(ph) @ b) ** 2

    return g


def harnack_ratio_experiment(n: int, sigma: float, N: int, O_radius: float = math.pi / 2,
                             K_radius: float = math.pi / 4, trials: int = 100, seed: int = 0,
                             degree: int = 3) -> HarnackResult:
    """``sup_K v / inf_K v`` for seeded random nonnegative exterior data.

    ``O`` is the open ball of radius ``O_radius`` about the origin and ``K``
    the closed ball of radius ``K_radius``.  The first trial uses ``g = 1``.
    """
    if not 0 < K_radius < O_radius:
        raise ConfigurationError("need 0 < K_radius < O_radius")
    grid = TorusGrid(n, N)
    pts = grid.points()
    r = np.sqrt(np.sum(pts**2, axis=1))
    interior = r < O_radius
    compact = r[interior] <= K_radius
    if not compact.any():
        raise ConfigurationError("compact set contains no grid nodes")
    order = FracOrder(sigma)
    p0 = NonlocalDirichletProblem(grid, interior, np.zeros(grid.size), order)
    A, B = stiffness(p0)
    chol = linalg.cho_factor(A)
    rng = np.random.default_rng(seed)
    ratios = np.empty(trials)
    min_inf = math.inf
    bad = 0
    for t in range(trials):
        g = np.ones(grid.size) if t == 0 else random_exterior_data(rng, n, degree)(pts)
        vi = linalg.cho_solve(chol, B @ g[~interior])
        vk = vi[compact]
        lo, hi = float(vk.min()), float(vk.max())
        min_inf = min(min_inf, lo)
        if lo <= 0:
            bad += 1
            ratios[t] = math.inf
        else:
            ratios[t] = hi / lo
    return HarnackResult(float(np.max(ratios)), ratios, min_inf, bad)
