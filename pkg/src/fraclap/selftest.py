"""Acceptance checks, one runner per criterion.

Every runner is seeded and returns a :class:`CheckResult`; ``format_line``
renders the single summary line used by the CLI and the test suite.  Output
never contains timings, so repeated runs are byte-identical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ExponentError
from .extension import conormal_limit
from .kernel_pv import frac_laplacian_pointwise, harnack_ratio_experiment
from .periodize import (BumpPartition, LatticeSumConfig, SchwartzProfile, bump_lift, periodize_callable,
                        poisson_summation_check)
from .regularity import (case_exponents, hoelder_ratio, random_band_limited, regularity_ratio_suite,
                         single_mode_ratio)
from .special_fn import bessel_asymptotic_ratio, bessel_coefficient_identity, c_sigma
from .spectral_core import (FracOrder, SpectralFunction, TorusFunction, TorusGrid, analyze,
                            check_transference_condition, frac_laplacian_spectral, spectral_function_from_csv,
                            spectral_function_to_csv, synthesize, torus_function_from_csv, torus_function_to_csv)
from .transference import lsigma_norm, lsigma_periodized, verify_transference

SIGMA_SWEEP = tuple(round(0.1 * i, 1) for i in range(1, 10))


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    metrics: dict = field(default_factory=dict)

    def format_line(self) -> str:
        body = " ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in self.metrics.items())
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.title}: {body}"


def _cos_product(n):
    coeffs = {}
    for signs in np.ndindex(*(2,) * n):
        coeffs[tuple(1 - 2 * s for s in signs)] = 0.5**n
    return SpectralFunction.from_dict(n, coeffs)


def transference_cases(seed: int = 0):
    """The twelve ``(label, v, phi, sigma)`` combinations of the identity check."""
    rng = np.random.default_rng(seed)
    family = [
        ("one", SpectralFunction.from_dict(1, {0: 1.0})),
        ("cos", _cos_product(1)),
        ("cos_cos", _cos_product(2)),
        ("random_M3", random_band_limited(rng, 1, 3)),
    ]
    cases = []
    for i, (label, v) in enumerate(family):
        for j, sig in enumerate((0.25, 0.5, 0.75)):
            a = (0.5, 2.0)[(i + j) % 2]
            center = (0.7,) if v.n == 1 else (0.7, -2.1)
            cases.append((label, v, SchwartzProfile(v.n, a, center), sig))
    return cases


def criterion_1(seed: int = 0) -> CheckResult:
    worst = 0.0
    for _, v, phi, sig in transference_cases(seed):
        rep = verify_transference(v, phi, FracOrder(sig))
        worst = max(worst, rep.residual / (1.0 + abs(rep.rhs)))
    return CheckResult(1, "transference identity", worst <= 1e-6,
                       {"cases": 12, "max_rel_residual": worst, "tol": 1e-6})


def _kernel_error(n, N, M, sig, rng):
    s = random_band_limited(rng, n, M)
    grid = TorusGrid(n, N)
    order = FracOrder(sig)
    ref = synthesize(frac_laplacian_spectral(s, order), grid).values
    pv = frac_laplacian_pointwise(synthesize(s, grid), order).values
    return float(np.max(np.abs(pv - ref)) / np.max(np.abs(ref)))


def _printed_constant_error(sig=0.5):
    # same comparison with the alternative constant, reported only
    grid = TorusGrid(1, 64)
    order = FracOrder(sig)
    s = SpectralFunction.from_dict(1, {1: 0.5, -1: 0.5})
    ref = synthesize(frac_laplacian_spectral(s, order), grid).values
    pv = frac_laplacian_pointwise(synthesize(s, grid), order, constant=order.printed_kernel_const(1)).values
    return float(np.max(np.abs(pv - ref)) / np.max(np.abs(ref)))


def criterion_2(seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    k1 = max(_kernel_error(1, 64, 4, s, rng) for s in SIGMA_SWEEP)
    k2 = max(_kernel_error(2, 32, 3, s, rng) for s in SIGMA_SWEEP)
    ext = 0.0
    for n, N, M in ((1, 32, 4), (2, 16, 3)):
        s = random_band_limited(rng, n, M)
        grid = TorusGrid(n, N)
        for sig in SIGMA_SWEEP:
            order = FracOrder(sig)
            ref = order.c_sigma * synthesize(frac_laplacian_spectral(s, order), grid).values
            lim = conormal_limit(s, order, grid).limit_field.values
            ext = max(ext, float(np.max(np.abs(lim - ref)) / np.max(np.abs(ref))))
    half = c_sigma(0.5)
    ok = k1 <= 1e-3 and k2 <= 1e-2 and ext <= 1e-4 and half == 1.0
    return CheckResult(2, "three-method agreement", ok,
                       {"kernel_n1": k1, "kernel_n2": k2, "conormal": ext, "c_half": half,
                        "printed_const_err": _printed_constant_error()})


def criterion_3(seed: int = 0) -> CheckResult:
    worst = 0.0
    vectors = {1: [(1.0,), (2.0,), (3.0,)], 2: [(1.0, 0.0), (1.0, 1.0), (2.0, 0.0), (2.0, 1.0), (2.0, 2.0), (3.0, 0.0)]}
    for n, ks in vectors.items():
        for sig in (0.25, 0.5, 0.75):
            for k in ks:
                worst = max(worst, bessel_coefficient_identity(n, sig, np.array(k)).residual)
    ratios = [bessel_asymptotic_ratio(s, 16.0) for s in (0.25, 0.5, 0.75)]
    ok = worst <= 1e-6 and all(0.95 <= r <= 1.05 for r in ratios)
    return CheckResult(3, "Bessel identity", ok,
                       {"max_residual": worst, "ratio_min": min(ratios), "ratio_max": max(ratios)})


def criterion_4(seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    funcs = [
        (SpectralFunction.from_dict(1, {0: 1.0}), 0.5),
        (SpectralFunction.from_dict(1, {0: 1.0, 1: 0.5, -1: 0.5}), 0.3),
        (random_band_limited(rng, 1, 3), 0.7),
    ]
    worst = 0.0
    for v, sig in funcs:
        order = FracOrder(sig)
        worst = max(worst, abs(lsigma_norm(v, order).value - lsigma_periodized(v, order)))
    cond = check_transference_condition(lambda k: np.ones(k.shape[0]), n=1, radius=20, growth=(1.0, 0.0))
    ok = worst <= 1e-6 and abs(cond.partial_sum - 0.754157) <= 1e-5 and cond.holds
    return CheckResult(4, "L_sigma membership", ok,
                       {"max_difference": worst, "partial_sum": cond.partial_sum, "tail_bound": cond.tail_bound})


def criterion_5(seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    cfg = LatticeSumConfig(radius=2, tol=1e-12)
    profiles = [
        SchwartzProfile(1, 0.5), SchwartzProfile(1, 2.0, (0.7,)), SchwartzProfile(1, 0.3, (9.0,), (3,)),
        SchwartzProfile(2, 0.5, (1.0, -2.0)), SchwartzProfile(2, 1.5, (0.0, 4.0), (1, 2)),
    ]
    poisson = 0.0
    for phi in profiles:
        z = rng.uniform(-math.pi, math.pi, (9, phi.n))
        poisson = max(poisson, poisson_summation_check(phi, z, cfg).residual)
    part = BumpPartition(1, 1.0)
    bump = 0.0
    for target in (SpectralFunction.from_dict(1, {0: 1.0}), _cos_product(1), random_band_limited(rng, 1, 2)):
        lifted = bump_lift(target, part)
        z = rng.uniform(-math.pi, math.pi, 17)
        got = periodize_callable(lifted, z, 1, lifted.support_radius)
        bump = max(bump, float(np.max(np.abs(got - target.evaluate(z)))))
    return CheckResult(5, "Poisson summation and bump lemma", poisson <= 1e-9 and bump <= 1e-9,
                       {"poisson_residual": poisson, "bump_residual": bump})


def criterion_6(seed: int = 0) -> CheckResult:
    runs = {N: harnack_ratio_experiment(1, 0.5, N, trials=100, seed=seed) for N in (64, 128)}
    r64, r128 = runs[64].max_ratio, runs[128].max_ratio
    positive = all(r.violations == 0 and r.min_inf > 0 for r in runs.values())
    drift = abs(r128 - r64) / r64
    ok = positive and math.isfinite(r64) and math.isfinite(r128) and drift <= 0.2
    return CheckResult(6, "interior Harnack", ok,
                       {"max_ratio_64": r64, "max_ratio_128": r128, "drift": drift,
                        "min_inf": min(r.min_inf for r in runs.values())})


HOELDER_CASES = ((1, 0.9, 0.2, None), (2, 0.9, 0.2, None), (3, 0.5, 0.4, None), (4, 0.5, 0.3, 2))


def criterion_7(seed: int = 0) -> CheckResult:
    drift = 0.0
    finite = True
    for case, alpha, sig, k in HOELDER_CASES:
        a = regularity_ratio_suite(case, alpha, sig, N=64, samples=50, seed=seed, k=k).max_ratio
        b = regularity_ratio_suite(case, alpha, sig, N=128, samples=50, seed=seed, k=k).max_ratio
        finite = finite and math.isfinite(a) and math.isfinite(b) and a > 0
        drift = max(drift, abs(b - a) / a)
    try:
        case_exponents(3, 0.2, 0.6)
        rejected = False
    except ExponentError:
        rejected = True
    mode = 0.0
    for case, alpha, sig, k in HOELDER_CASES:
        ex = case_exponents(case, alpha, sig, k)
        for m in (1, 2, 3):
            s = SpectralFunction.from_dict(1, {m: 0.5, -m: 0.5})
            got = hoelder_ratio(s, FracOrder(sig), ex, TorusGrid(1, 256))
            want = single_mode_ratio(m, FracOrder(sig), ex)
            mode = max(mode, abs(got - want) / want)
    ok = finite and drift <= 0.2 and rejected and mode <= 0.05
    return CheckResult(7, "Hoelder suite", ok,
                       {"max_drift": drift, "case3_exclusion_rejected": rejected, "single_mode_err": mode})


def criterion_8(seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n, M, N in ((1, 5, 32), (2, 3, 16), (3, 2, 8)):
        s = random_band_limited(rng, n, M)
        grid = TorusGrid(n, N)
        v = synthesize(s, grid)
        worst = max(worst, float(np.max(np.abs(analyze(v, M).coefficients - s.coefficients))))
        back = torus_function_from_csv(torus_function_to_csv(v))
        worst = max(worst, float(np.max(np.abs(back.values - v.values))))
        s2 = spectral_function_from_csv(spectral_function_to_csv(s))
        worst = max(worst, float(np.max(np.abs(s2.coefficients - s.coefficients))))
    # determinism of seeded runs
    first = _seeded_fingerprint(seed)
    second = _seeded_fingerprint(seed)
    ok = worst <= 1e-12 and first == second
    return CheckResult(8, "infrastructure", ok, {"roundtrip_error": worst, "deterministic": first == second})


def _seeded_fingerprint(seed):
    h = harnack_ratio_experiment(1, 0.5, 32, trials=10, seed=seed)
    r = regularity_ratio_suite(1, 0.9, 0.2, N=32, samples=5, seed=seed)
    return ",".join(format(x, ".17g") for x in np.concatenate([h.ratios, r.ratios]))


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8)


def run_all(seed: int = 0) -> list[CheckResult]:
    return [c(seed) for c in CRITERIA]
