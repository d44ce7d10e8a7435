"""Command-line front end.

Subcommands: apply, transfer, kernel, extend, conormal, hoelder, harnack,
bessel, selftest.  Numbers are printed with 17 significant digits; a JSON
run manifest is written with ``--manifest``.  Exit status is 0 when every
check passes, 1 when a check fails and 2 on usage errors.

Function specs (``--v``) are sums of terms joined by ``+``; a term is a
product of factors joined by ``*``; a factor is a number, ``const:c``,
``cos:k``, ``sin:k`` (``k`` comma separated for ``n > 1``, meaning
``cos(k.z)``) or ``trig:<file>`` (coefficient CSV).  Profiles (``--phi``)
are ``gauss:a[@c1,c2,...]``.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import json
import math
import os
import sys
import time

import numpy as np
from scipy import signal

from . import __version__
from .errors import FraclapError
from .extension import conormal_limit, extend
from .kernel_pv import PeriodizedKernel, frac_laplacian_pointwise, harnack_ratio_experiment
from .periodize import LatticeSumConfig, SchwartzProfile
from .regularity import random_band_limited, regularity_ratio_suite
from .selftest import run_all
from .special_fn import bessel_asymptotic_ratio, bessel_k
from .spectral_core import (FracOrder, SpectralFunction, TorusGrid, frac_laplacian_spectral,
                            spectral_function_from_csv, synthesize, torus_function_to_csv)
from .transference import verify_transference


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    return format(float(x), ".17g")


# ------------------------------------------------------------------ grammar

def _wavevector(text, n):
    k = tuple(int(t) for t in text.split(","))
    if len(k) != n:
        raise UsageError(f"wave vector {text!r} needs {n} components")
    return k


def _factor(text: str, n: int) -> SpectralFunction:
    text = text.strip()
    kind, _, arg = text.partition(":")
    if not arg:
        try:
            return SpectralFunction.from_dict(n, {(0,) * n: float(text)})
        except ValueError:
            raise UsageError(f"cannot parse function factor {text!r}") from None
    if kind == "const":
        return SpectralFunction.from_dict(n, {(0,) * n: float(arg)})
    if kind in ("cos", "sin"):
        k = _wavevector(arg, n)
        mk = tuple(-x for x in k)
        if kind == "cos":
            return SpectralFunction.from_dict(n, {k: 0.5, mk: 0.5})
        return SpectralFunction.from_dict(n, {k: -0.5j, mk: 0.5j})
    if kind == "trig":
        with open(arg) as fh:
            s = spectral_function_from_csv(fh.read())
        if s.n != n:
            raise UsageError(f"{arg} holds a function of dimension {s.n}, expected {n}")
        return s
    raise UsageError(f"unknown function kind {kind!r}")


def _product(a: SpectralFunction, b: SpectralFunction) -> SpectralFunction:
    c = signal.convolve(a.coefficients, b.coefficients, method="direct")
    return SpectralFunction(a.n, a.M + b.M, c)


def parse_function(spec: str, n: int) -> SpectralFunction:
    total = None
    for term in spec.split("+"):
        prod = None
        for fac in term.split("*"):
            f = _factor(fac, n)
            prod = f if prod is None else _product(prod, f)
        total = prod if total is None else total + prod
    return total


def parse_profile(spec: str, n: int) -> SchwartzProfile:
    kind, _, arg = spec.partition(":")
    if kind != "gauss" or not arg:
        raise UsageError(f"profile must be gauss:a[@center], got {spec!r}")
    a, _, center = arg.partition("@")
    c = tuple(float(t) for t in center.split(",")) if center else (0.0,) * n
    if len(c) != n:
        raise UsageError(f"center needs {n} components")
    return SchwartzProfile(n, float(a), c)


def _floats(text):
    return [float(t) for t in str(text).split(",")]


# ------------------------------------------------------------------ commands

def cmd_apply(args, out, manifest):
    n = args.n
    order = FracOrder(_single(args.sigma))
    grid = TorusGrid(n, args.grid)
    s = parse_function(args.v or "cos:" + ",".join(["1"] + ["0"] * (n - 1)), n)
    if 2 * s.M >= grid.N:
        raise UsageError(f"grid {grid.N} too small for modes up to {s.M}")
    ref = synthesize(frac_laplacian_spectral(s, order), grid)
    if args.method == "spectral":
        res = ref
    elif args.method == "kernel":
        if n == 3:
            raise UsageError("--method kernel is implemented for n in {1, 2}")
        if grid.N < 4 * max(s.M, 1):
            raise UsageError(f"--method kernel needs --grid >= {4 * max(s.M, 1)} for these modes")
        res = frac_laplacian_pointwise(synthesize(s, grid), order, _lattice(args))
    else:
        res = conormal_limit(s, order, grid).limit_field
        res = type(res)(grid, res.values / order.c_sigma)
    err = float(np.max(np.abs(res.values - ref.values)) / max(np.max(np.abs(ref.values)), 1e-300))
    out.write(torus_function_to_csv(res))
    manifest["checks"]["agreement_with_spectral"] = {"error": err, "tol": args.tol, "pass": err <= args.tol}
    return err <= args.tol


def _lattice(args):
    return LatticeSumConfig(radius=args.lattice_radius, tol=min(args.tol, 1e-10))


def cmd_transfer(args, out, manifest):
    n = args.n
    v = parse_function(args.v or "cos:" + ",".join(["1"] + ["0"] * (n - 1)), n)
    phi = parse_profile(args.phi or "gauss:0.5", n)
    rep = verify_transference(v, phi, FracOrder(_single(args.sigma)), tol=args.tol)
    out.write(rep.to_text())
    ok = rep.residual <= args.tol
    manifest["checks"]["transference"] = {"residual": rep.residual, "tol": args.tol, "pass": ok,
                                          "budget": rep.budget}
    return ok


def cmd_kernel(args, out, manifest):
    n = args.n
    ker = PeriodizedKernel(n, FracOrder(_single(args.sigma)), _lattice(args))
    rng = np.random.default_rng(args.seed)
    pts = rng.uniform(-math.pi, math.pi, (args.samples, n))
    vals = ker(pts)
    out.write(",".join(f"x{i + 1}" for i in range(n)) + ",K\n")
    for p, k in zip(pts, vals):
        out.write(",".join(_fmt(x) for x in p) + "," + _fmt(k) + "\n")
    manifest["checks"]["kernel_constant"] = {"used": ker.constant,
                                             "printed": ker.order.printed_kernel_const(n), "pass": True}
    return True


def cmd_extend(args, out, manifest):
    n = args.n
    s = parse_function(args.v or "cos:" + ",".join(["1"] + ["0"] * (n - 1)), n)
    res = extend(s, FracOrder(_single(args.sigma)), args.y, TorusGrid(n, args.grid))
    out.write(torus_function_to_csv(res))
    return True


def cmd_conormal(args, out, manifest):
    n = args.n
    rng = np.random.default_rng(args.seed)
    if args.v:
        s = parse_function(args.v, n)
    else:
        s = random_band_limited(rng, n, args.modes)
    grid = TorusGrid(n, args.grid)
    out.write("sigma,c_sigma,recovered,rel_error,richardson_error\n")
    ok = True
    for sig in _floats(args.sigma):
        order = FracOrder(sig)
        lim = conormal_limit(s, order, grid)
        spec = synthesize(frac_laplacian_spectral(s, order), grid).values
        scale = float(np.max(np.abs(spec)))
        if scale == 0.0:
            raise UsageError("function has no nonconstant modes")
        i = int(np.argmax(np.abs(spec)))
        rec = lim.limit_field.values[i] / spec[i]
        err = float(np.max(np.abs(lim.limit_field.values - order.c_sigma * spec))) / (order.c_sigma * scale)
        ok = ok and err <= args.tol
        out.write(",".join(_fmt(x) for x in (sig, order.c_sigma, rec, err, lim.richardson_error)) + "\n")
    manifest["checks"]["c_sigma_recovery"] = {"tol": args.tol, "pass": ok}
    return ok


def cmd_hoelder(args, out, manifest):
    res = regularity_ratio_suite(args.case, args.alpha, _single(args.sigma), n=args.n, N=args.grid,
                                 M=args.modes, samples=args.samples, seed=args.seed, k=args.k)
    out.write("sample,ratio\n")
    for i, r in enumerate(res.ratios):
        out.write(f"{i},{_fmt(r)}\n")
    ex = res.exponents
    out.write(f"# summary case={ex.case} k={ex.k} alpha={_fmt(ex.alpha)} l={ex.l} beta={_fmt(ex.beta)} "
              f"max_ratio={_fmt(res.max_ratio)}\n")
    ok = math.isfinite(res.max_ratio)
    manifest["checks"]["finite_ratio"] = {"max_ratio": res.max_ratio, "pass": ok}
    return ok


def cmd_harnack(args, out, manifest):
    res = harnack_ratio_experiment(args.n, _single(args.sigma), args.grid, args.O_radius, args.K_radius,
                                   args.trials, args.seed)
    out.write("trial,ratio\n")
    for i, r in enumerate(res.ratios):
        out.write(f"{i},{_fmt(r)}\n")
    out.write(f"# summary max_ratio={_fmt(res.max_ratio)} min_inf={_fmt(res.min_inf)} "
              f"violations={res.violations}\n")
    ok = res.violations == 0
    manifest["checks"]["positivity"] = {"violations": res.violations, "pass": ok}
    return ok


def cmd_bessel(args, out, manifest):
    nu = _single(args.sigma)
    out.write("nu,z,K,error_estimate,asymptotic_ratio\n")
    for z in _floats(args.z):
        b = bessel_k(nu, z)
        out.write(",".join(_fmt(x) for x in (nu, z, b.value, b.error_estimate, bessel_asymptotic_ratio(nu, z))) + "\n")
    return True


def cmd_selftest(args, out, manifest):
    ok = True
    for r in run_all(args.seed):
        out.write(r.format_line() + "\n")
        manifest["checks"][f"criterion_{r.number}"] = {"pass": r.passed}
        ok = ok and r.passed
    return ok


def _single(sigma):
    vals = _floats(sigma)
    if len(vals) != 1:
        raise UsageError("this subcommand takes a single --sigma")
    return vals[0]


COMMANDS = {
    "apply": cmd_apply, "transfer": cmd_transfer, "kernel": cmd_kernel, "extend": cmd_extend,
    "conormal": cmd_conormal, "hoelder": cmd_hoelder, "harnack": cmd_harnack, "bessel": cmd_bessel,
    "selftest": cmd_selftest,
}


def _common(p, sigma="0.5", grid=64, tol=1e-6):
    p.add_argument("--n", type=int, default=1, choices=(1, 2, 3))
    p.add_argument("--sigma", default=sigma)
    p.add_argument("--grid", type=int, default=grid)
    p.add_argument("--tol", type=float, default=tol)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lattice-radius", type=int, default=2)
    p.add_argument("--out", default="-")
    p.add_argument("--manifest")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fraclap", description="Fractional Laplacian on the torus.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = _common(sub.add_parser("apply", help="apply the operator to a grid function"), tol=1e-3)
    p.add_argument("--method", choices=("spectral", "kernel", "extension"), default="spectral")
    p.add_argument("--v")

    p = _common(sub.add_parser("transfer", help="check the transference identity"))
    p.add_argument("--v")
    p.add_argument("--phi")

    p = _common(sub.add_parser("kernel", help="sample the periodized kernel"))
    p.add_argument("--samples", type=int, default=16)

    p = _common(sub.add_parser("extend", help="evaluate the extension at height y"))
    p.add_argument("--v")
    p.add_argument("--y", type=float, default=0.1)

    p = _common(sub.add_parser("conormal", help="recover c_sigma from the conormal limit"),
                sigma=",".join(str(i / 10) for i in range(1, 10)), grid=32, tol=1e-4)
    p.add_argument("--v")
    p.add_argument("--modes", type=int, default=4)

    p = _common(sub.add_parser("hoelder", help="Hoelder ratio suite"))
    p.add_argument("--case", type=int, required=True, choices=(1, 2, 3, 4))
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--modes", type=int, default=4)

    p = _common(sub.add_parser("harnack", help="interior Harnack experiment"))
    p.add_argument("--O-radius", dest="O_radius", type=float, default=math.pi / 2)
    p.add_argument("--K-radius", dest="K_radius", type=float, default=math.pi / 4)
    p.add_argument("--trials", type=int, default=100)

    p = _common(sub.add_parser("bessel", help="modified Bessel function K_nu (nu = --sigma)"))
    p.add_argument("--z", default="1")

    _common(sub.add_parser("selftest", help="run the acceptance suite"))
    return parser


@contextlib.contextmanager
def _thread_limit():
    limit = os.environ.get("FRACLAP_THREADS")
    if not limit:
        yield
        return
    from threadpoolctl import threadpool_limits
    with threadpool_limits(limits=int(limit)):
        yield


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    manifest = {"subcommand": args.command, "version": __version__,
                "parameters": {k: v for k, v in sorted(vars(args).items()) if k != "command"},
                "seed": args.seed, "tolerance": args.tol, "checks": {}}
    buf = io.StringIO()
    start = time.perf_counter()
    try:
        with _thread_limit():
            ok = COMMANDS[args.command](args, buf, manifest)
    except (UsageError, FraclapError, ValueError, OSError) as exc:
        print(f"fraclap {args.command}: error: {exc}", file=sys.stderr)
        return 2
    manifest["wall_clock_seconds"] = time.perf_counter() - start
    manifest["status"] = "pass" if ok else "fail"
    if args.out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.out, "w") as fh:
            fh.write(buf.getvalue())
    if args.manifest:
        with open(args.manifest, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True, default=float)
            fh.write("\n")
    return 0 if ok else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
