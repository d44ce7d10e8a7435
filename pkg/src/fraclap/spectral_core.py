"""Uniform grids on the torus, discrete Fourier analysis/synthesis and the
spectral fractional Laplacian.

Conventions
-----------
* Grid nodes per axis are ``z_j = -pi + 2 pi (j + 1) / N`` for ``j = 0..N-1``;
  they lie in ``(-pi, pi]`` and the last node is ``pi``.
* Values of an ``n``-dimensional grid function are stored in row-major
  (C) order, axis 0 slowest.
* Fourier coefficients are ``c_k = (2 pi)^(-n) int_Q v(z) exp(-i k.z) dz``.
  A :class:`SpectralFunction` stores them densely for ``|k|_inf <= M`` in an
  array of shape ``(2M+1,)*n`` where index ``k + M`` holds ``c_k``.
"""
from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .errors import AliasingError, DomainError, SymmetryError
from .special_fn import c_sigma as _c_sigma
from .special_fn import gamma


@dataclass(frozen=True)
class TorusGrid:
    n: int
    N: int

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise DomainError(f"dimension must be 1, 2 or 3, got {self.n}")
        if self.N < 4 or self.N % 2:
            raise DomainError(f"points per axis must be even and >= 4, got {self.N}")

    @property
    def h(self) -> float:
        return 2.0 * math.pi / self.N

    @property
    def axis(self) -> np.ndarray:
        return -math.pi + self.h * np.arange(1, self.N + 1)

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    def mesh(self) -> list[np.ndarray]:
        """Coordinate arrays of shape ``grid.shape``, one per axis."""
        return np.meshgrid(*([self.axis] * self.n), indexing="ij")

    def points(self) -> np.ndarray:
        """Node coordinates as an ``(N^n, n)`` array in storage order."""
        return np.stack([m.ravel() for m in self.mesh()], axis=-1)


@dataclass(frozen=True, eq=False)
class TorusFunction:
    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        if vals.size != self.grid.size:
            raise DomainError(f"expected {self.grid.size} values, got {vals.size}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("grid function has non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, grid: TorusGrid, func: Callable) -> "TorusFunction":
        """Sample ``func(z1, ..., zn)`` (vectorised) on the grid."""
        return cls(grid, np.broadcast_to(func(*grid.mesh()), grid.shape).ravel())

    def array(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)


@dataclass(frozen=True, eq=False)
class SpectralFunction:
    n: int
    M: int
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex)
        if c.shape != (2 * self.M + 1,) * self.n:
            raise DomainError(f"coefficient array must have shape {(2 * self.M + 1,) * self.n}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_dict(cls, n: int, coeffs: dict) -> "SpectralFunction":
        """Build from ``{k: c_k}`` with ``k`` an int (n=1) or an n-tuple."""
        keys = [np.atleast_1d(k) for k in coeffs]
        M = max((int(np.max(np.abs(k))) for k in keys), default=0)
        arr = np.zeros((2 * M + 1,) * n, dtype=complex)
        for k, val in coeffs.items():
            arr[tuple(np.atleast_1d(k) + M)] += val
        return cls(n, M, arr)

    def wavenumbers(self) -> np.ndarray:
        """Integer lattice vectors, shape ``(2M+1,)*n + (n,)``."""
        r = np.arange(-self.M, self.M + 1)
        return np.stack(np.meshgrid(*([r] * self.n), indexing="ij"), axis=-1)

    def kabs(self) -> np.ndarray:
        return np.sqrt(np.sum(self.wavenumbers() ** 2, axis=-1))

    def coeff(self, k) -> complex:
        k = np.atleast_1d(k)
        if np.max(np.abs(k)) > self.M:
            return 0j
        return complex(self.coefficients[tuple(k + self.M)])

    def items(self) -> Iterator[tuple[tuple, complex]]:
        """Nonzero ``(k, c_k)`` pairs in lexicographic order of ``k``."""
        for idx in zip(*np.nonzero(self.coefficients)):
            yield tuple(int(i) - self.M for i in idx), complex(self.coefficients[idx])

    def hermitian_defect(self) -> float:
        c = self.coefficients
        return float(np.max(np.abs(c - np.conj(c[(slice(None, None, -1),) * self.n])), initial=0.0))

    def with_coefficients(self, coeffs: np.ndarray) -> "SpectralFunction":
        return SpectralFunction(self.n, self.M, coeffs)

    def scaled(self, t: float) -> "SpectralFunction":
        return self.with_coefficients(self.coefficients * t)

    def __add__(self, other: "SpectralFunction") -> "SpectralFunction":
        M = max(self.M, other.M)
        return SpectralFunction(self.n, M, _pad(self, M) + _pad(other, M))

    def evaluate(self, points) -> np.ndarray:
        """Evaluate the series at arbitrary points, array of shape ``(..., n)``."""
        pts = np.asarray(points, dtype=float)
        if self.n == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
            pts = pts[..., None]
        r = np.arange(-self.M, self.M + 1)
        lead = pts.shape[:-1]
        flat = pts.reshape(-1, self.n)
        # separable evaluation, contracting one axis at a time
        acc = np.einsum("pk,k...->p...", np.exp(1j * np.multiply.outer(flat[:, 0], r)),
                        self.coefficients)
        for ax in range(1, self.n):
            e = np.exp(1j * np.multiply.outer(flat[:, ax], r))
            acc = np.einsum("pk,pk...->p...", e, acc)
        return acc.real.reshape(lead)

    def derivative(self, gamma_idx) -> "SpectralFunction":
        """Spectral derivative ``D^gamma`` (multiplier ``prod (i k_j)^gamma_j``)."""
        k = self.wavenumbers()
        mult = np.ones(k.shape[:-1], dtype=complex)
        for ax, order in enumerate(gamma_idx):
            mult = mult * (1j * k[..., ax]) ** order
        return self.with_coefficients(self.coefficients * mult)


def _pad(s: SpectralFunction, M: int) -> np.ndarray:
    d = M - s.M
    return np.pad(s.coefficients, [(d, d)] * s.n)


@dataclass(frozen=True)
class FracOrder:
    sigma: float

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise DomainError(f"sigma must lie in (0, 1), got {self.sigma}")

    @property
    def c_sigma(self) -> float:
        return _c_sigma(self.sigma)

    def kernel_const(self, n: int) -> float:
        """``4^s Gamma(n/2 + s) / (pi^(n/2) |Gamma(-s)|)``, the constant that makes
        the principal-value formula reproduce the multiplier ``|k|^(2s)``."""
        s = self.sigma
        return 4.0**s * gamma(0.5 * n + s) / (math.pi ** (0.5 * n) * abs(gamma(-s)))

    def printed_kernel_const(self, n: int) -> float:
        """``2^s Gamma((n+s)/2) / (|Gamma(-s/2)| pi^(n/2))``; kept for comparison."""
        s = self.sigma
        return 2.0**s * gamma(0.5 * (n + s)) / (abs(gamma(-0.5 * s)) * math.pi ** (0.5 * n))


def _analysis_matrix(grid: TorusGrid, M: int) -> np.ndarray:
    r = np.arange(-M, M + 1)
    return np.exp(-1j * np.multiply.outer(r, grid.axis)) / grid.N


def analyze(v: TorusFunction, M: int) -> SpectralFunction:
    """Discrete Fourier coefficients ``c_k`` for ``|k|_inf <= M``.

    Exact (to rounding) for trigonometric polynomials of degree ``<= M``.
    The result is symmetrised so that ``c_{-k} = conj(c_k)`` holds exactly.
    """
    grid = v.grid
    if M < 0:
        raise DomainError("cutoff must be non-negative")
    if 2 * M >= grid.N:
        raise AliasingError(f"cutoff M={M} aliases on N={grid.N}; need M < N/2")
    E = _analysis_matrix(grid, M)
    c = v.array().astype(complex)
    for ax in range(grid.n):
        c = np.moveaxis(np.tensordot(E, c, axes=([1], [ax])), 0, ax)
    flip = (slice(None, None, -1),) * grid.n
    c = 0.5 * (c + np.conj(c[flip]))
    return SpectralFunction(grid.n, M, c)


def synthesize(s: SpectralFunction, grid: TorusGrid, tol: float = 1e-10) -> TorusFunction:
    """Evaluate ``sum_k c_k exp(i k.z)`` at the grid nodes.

    Raises :class:`SymmetryError` when the Hermitian defect exceeds ``tol``
    (relative to the largest coefficient); a smaller nonzero defect is
    discarded with a warning.
    """
    if s.n != grid.n:
        raise DomainError("dimension mismatch")
    defect = s.hermitian_defect()
    scale = max(1.0, float(np.max(np.abs(s.coefficients), initial=0.0)))
    if defect > tol * scale:
        raise SymmetryError(f"Hermitian defect {defect:.3e} exceeds tolerance")
    if defect > 64 * np.finfo(float).eps * scale:
        warnings.warn(f"discarding imaginary residue from Hermitian defect {defect:.3e}")
    r = np.arange(-s.M, s.M + 1)
    E = np.exp(1j * np.multiply.outer(grid.axis, r))
    c = s.coefficients
    for ax in range(grid.n):
        c = np.moveaxis(np.tensordot(E, c, axes=([1], [ax])), 0, ax)
    return TorusFunction(grid, c.real.ravel())


def frac_laplacian_spectral(s: SpectralFunction, order: FracOrder) -> SpectralFunction:
    """Apply the multiplier ``|k|^(2 sigma)`` (zero at ``k = 0``)."""
    return s.with_coefficients(s.coefficients * s.kabs() ** (2.0 * order.sigma))


@dataclass(frozen=True)
class ConditionCheck:
    holds: bool
    partial_sum: float
    tail_bound: float


def _shell_counts(n, m):
    return (2 * m + 1) ** n - (2 * m - 1) ** n


def check_transference_condition(coeffs, n: int = None, radius: int = 20, growth=None) -> ConditionCheck:
    """Check summability of ``sum_{k != 0} |c_k| exp(-|k|^2) / |k|``.

    ``coeffs`` is either a :class:`SpectralFunction` (finitely supported,
    so the tail is zero) or a callable ``k -> c_k`` taking an integer
    array of shape ``(..., n)``.  For a callable, ``growth=(C, p)`` asserting
    ``|c_k| <= C (1 + |k|)^p`` is required; the partial sum runs over
    ``0 < |k|_inf <= radius`` and the tail is bounded shell by shell, the
    remainder after the last explicit shell by a geometric series whose
    ratio is non-increasing.
    """
    if isinstance(coeffs, SpectralFunction):
        kabs = coeffs.kabs()
        nz = kabs > 0
        total = float(np.sum(np.abs(coeffs.coefficients[nz]) * np.exp(-kabs[nz] ** 2) / kabs[nz]))
        return ConditionCheck(True, total, 0.0)
    if n is None:
        raise DomainError("dimension required for a coefficient rule")
    if growth is None:
        raise DomainError("an infinite coefficient rule needs a growth bound (C, p)")
    C, p = growth
    r = np.arange(-radius, radius + 1)
    k = np.stack(np.meshgrid(*([r] * n), indexing="ij"), axis=-1).reshape(-1, n)
    kabs = np.sqrt(np.sum(k**2, axis=1))
    nz = kabs > 0
    ck = np.abs(np.asarray(coeffs(k[nz]), dtype=complex))
    partial = float(np.sum(ck * np.exp(-kabs[nz] ** 2) / kabs[nz]))

    pp = max(p, 0.0)

    def shell(m):
        # |k| lies in [m, sqrt(n) m] on the shell |k|_inf = m
        return C * _shell_counts(n, m) * (1.0 + math.sqrt(n) * m) ** pp * math.exp(-m * m) / m

    def ratio_bound(m):
        # shell(j+1)/shell(j) <= ratio_bound(m) for all j >= m (each factor non-increasing)
        return (_shell_counts(n, m + 1) / _shell_counts(n, m)
                * ((1.0 + math.sqrt(n) * (m + 1)) / (1.0 + math.sqrt(n) * m)) ** pp
                * math.exp(-(2 * m + 1)))

    tail = 0.0
    m = radius + 1
    while ratio_bound(m) >= 0.5:
        tail += shell(m)
        m += 1
    tail += shell(m) / (1.0 - ratio_bound(m))
    return ConditionCheck(bool(np.isfinite(partial) and np.isfinite(tail)), partial, tail)


# ---------------------------------------------------------------- CSV formats

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def torus_function_to_csv(v: TorusFunction) -> str:
    buf = io.StringIO()
    buf.write(f"# n={v.grid.n} N={v.grid.N}\n")
    for x in v.values:
        buf.write(_fmt(x) + "\n")
    return buf.getvalue()


def torus_function_from_csv(text: str) -> TorusFunction:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    head = dict(tok.split("=") for tok in lines[0].lstrip("#").split())
    grid = TorusGrid(int(head["n"]), int(head["N"]))
    return TorusFunction(grid, np.array([float(x) for x in lines[1:]]))


def spectral_function_to_csv(s: SpectralFunction) -> str:
    buf = io.StringIO()
    k = s.wavenumbers().reshape(-1, s.n)
    for kk, c in zip(k, s.coefficients.ravel()):
        buf.write(",".join(str(int(x)) for x in kk) + f",{_fmt(c.real)},{_fmt(c.imag)}\n")
    return buf.getvalue()


def spectral_function_from_csv(text: str) -> SpectralFunction:
    rows = [ln.split(",") for ln in text.strip().splitlines() if ln.strip() and not ln.startswith("#")]
    n = len(rows[0]) - 2
    return SpectralFunction.from_dict(
        n, {tuple(int(x) for x in r[:n]): complex(float(r[n]), float(r[n + 1])) for r in rows}
    )
