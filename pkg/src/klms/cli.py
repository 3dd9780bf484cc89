"""Command-line surface.

Subcommands:
  theory       print step exponents, predicted rates and the regime for (alpha, r)
  simulate     run replicates for a config file, write per-replicate CSV
  gamma-sweep  best constant step per sample size, write CSV
  compare      four-algorithm rate comparison on a benchmark point, write CSV
  selfcheck    run the oracle-equivalence suites
  bernoulli    evaluate B_k(x)

Exit codes: 0 success, 2 configuration error, 3 numerical divergence,
4 selfcheck failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bernoulli, harness, kernels, risk, theory
from .errors import ConfigurationError, DivergenceError
from .estimator import (AlgorithmSpec, FiniteHorizon, KernelExpansion,
                        averaged_coefficients, evaluate, finite_dim_sgd, sgd_run)
from .kernels import LinearKernel

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_SELFCHECK = 4


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _cmd_theory(args) -> int:
    setting = args.setting
    expo = (theory.step_exponent_finite_horizon(args.alpha, args.r)
            if setting == "fh" else theory.step_exponent_online(args.alpha, args.r))
    print(f"alpha = {_fmt(args.alpha)}  r = {_fmt(args.r)}  setting = {setting}")
    print(f"step_exponent     = {_fmt(expo)}")
    print(f"predicted_rate    = {_fmt(theory.predicted_rate(args.alpha, args.r, setting))}")
    print(f"competitor_rate   = {_fmt(theory.competitor_rate(args.r))}")
    print(f"regime            = {theory.classify_regime(args.alpha, args.r, setting).value}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    config = harness.parse_config(args.config)
    run = harness.run_replicates(config)
    if args.out:
        harness.write_simulate_csv(args.out, run)
        print(f"wrote {args.out}")
    else:
        print("n,mean_excess_risk")
        for n, v in zip(run.checkpoints, run.mean):
            print(f"{n},{v:.16e}")
    if run.diverged:
        for rep, msg in run.diverged:
            print(f"replicate {rep} diverged: {msg}", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def _cmd_gamma_sweep(args) -> int:
    config = harness.parse_config(args.config)
    if args.grid_min is not None and args.grid_max is not None and args.grid_points:
        if args.grid_min <= 0 or args.grid_max <= args.grid_min:
            raise ConfigurationError("need 0 < grid-min < grid-max")
        grid = np.geomspace(args.grid_min, args.grid_max, args.grid_points)
    else:
        grid = harness.default_gamma_grid(config.R_sq)
    rows = harness.gamma_sweep(config, grid)
    if args.out:
        harness.write_sweep_csv(args.out, rows)
        print(f"wrote {args.out}")
    else:
        print("n,best_gamma,mean_excess_risk")
        for row in rows:
            print(f"{row.n},{row.best_gamma:.16e},{row.mean_excess_risk:.16e}")
    fit = harness.fit_rate([(row.n, row.best_gamma) for row in rows])
    print(f"best-gamma slope over second half: {_fmt(fit.slope)}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    rows = harness.compare_algorithms(args.point, n_max=args.n_max,
                                      replicates=args.replicates,
                                      noise_sigma=args.noise,
                                      master_seed=args.seed,
                                      use_table_step=args.table_step)
    if args.out:
        harness.write_compare_csv(args.out, rows)
        print(f"wrote {args.out}")
    for row in rows:
        print(f"{row.algorithm:12s} predicted {row.predicted_slope:+.3f}  "
              f"effective {row.effective_slope:+.3f}  (rms {row.residual_rms:.3f})")
    return EXIT_OK


def _cmd_bernoulli(args) -> int:
    print(_fmt(bernoulli.bernoulli_poly(args.k, args.x)))
    return EXIT_OK


# ---------------------------------------------------------------------------
# selfcheck
# ---------------------------------------------------------------------------

def _check_kernel_series() -> tuple[bool, str]:
    grid = np.linspace(0.0, 1.0, 21, endpoint=False)
    worst = 0.0
    for m in (1, 2):
        for s in grid:
            for t in grid[::4]:
                closed = kernels.spline_kernel(m, s, t)
                series = kernels.spline_kernel_series(m, s, t, 10**5)
                worst = max(worst, abs(closed - series))
    return worst <= 1e-8, f"max |closed - series| = {worst:.2e}"


def _check_bernoulli_fourier() -> tuple[bool, str]:
    worst = 0.0
    for k in range(1, 9):
        for x in np.linspace(0.0, 1.0, 25, endpoint=False):
            if k == 1 and x == 0.0:
                continue
            diff = abs(bernoulli.bernoulli_fourier_eval(k, float(x), 10**5)
                       - bernoulli.bernoulli_poly(k, float(x)))
            worst = max(worst, diff)
    return worst <= 1e-6, f"max |series - poly| = {worst:.2e}"


def _check_eigen() -> tuple[bool, str]:
    worst = 0.0
    for m in (1, 2):
        for i in (1, 2, 3):
            for s in (0.0, 0.3):
                for sine in (False, True):
                    lhs, rhs = kernels.eigen_check(m, i, s, 10**4, sine=sine)
                    if abs(rhs) < 1e-12:
                        worst = max(worst, abs(lhs))
                    else:
                        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return worst <= 1e-6, f"max eigen residual = {worst:.2e}"


def _check_risk_oracles() -> tuple[bool, str]:
    rng = np.random.default_rng(7)
    worst_f, worst_q = 0.0, 0.0
    for _ in range(20):
        m = int(rng.integers(1, 3))
        k = int(rng.integers(1, 4))
        n = int(rng.integers(1, 31))
        exp = KernelExpansion(rng.random(n), rng.uniform(-1, 1, n))
        closed = risk.excess_risk_closed(exp, m, k)
        worst_f = max(worst_f, abs(closed - risk.excess_risk_fourier(exp, m, k, 10**5)))
        worst_q = max(worst_q, abs(closed - risk.excess_risk_mc(exp, m, k, 10**5)))
    ok = worst_f <= 1e-8 and worst_q <= 1e-5
    return ok, f"fourier gap {worst_f:.2e}, quadrature gap {worst_q:.2e}"


def _check_averaging() -> tuple[bool, str]:
    rng = np.random.default_rng(11)
    worst = 0.0
    for regularized in (False, True):
        n = 60
        a = rng.uniform(-1, 1, n)
        shrinks = 1.0 - 0.01 * rng.random(n) if regularized else np.ones(n)
        got = averaged_coefficients(a, shrinks if regularized else None)
        # brute force: materialize every iterate's coefficient vector
        coeffs = np.zeros(n)
        acc = np.zeros(n)
        for i in range(n):
            coeffs[:i] *= shrinks[i]
            coeffs[i] = a[i]
            acc += coeffs
        brute = acc / (n + 1)
        worst = max(worst, float(np.max(np.abs(got - brute))))
    return worst <= 1e-12, f"max averaging gap = {worst:.2e}"


def _check_finite_dim() -> tuple[bool, str]:
    rng = np.random.default_rng(3)
    n, d = 50, 2
    xs = rng.standard_normal((n, d))
    ys = xs @ np.array([0.5, -1.0]) + 0.1 * rng.standard_normal(n)
    gamma = 0.05
    theta_bar = finite_dim_sgd((xs, ys), gamma)
    spec = AlgorithmSpec("ours", averaged=True, step=FiniteHorizon(gamma))
    _, avg = sgd_run(LinearKernel(d), (xs, ys), spec, [n])[0]
    test_points = rng.standard_normal((5, d))
    worst = max(abs(float(theta_bar @ p) - evaluate(avg, LinearKernel(d), p))
                for p in test_points)
    return worst <= 1e-10, f"max primal/expansion gap = {worst:.2e}"


_SELFCHECKS = [
    ("spline kernel closed form vs Fourier series", _check_kernel_series),
    ("Bernoulli polynomials vs Fourier series", _check_bernoulli_fourier),
    ("covariance eigenpairs by quadrature", _check_eigen),
    ("risk oracle triple agreement", _check_risk_oracles),
    ("averaged coefficients vs brute force", _check_averaging),
    ("finite-dimensional vs expansion recursion", _check_finite_dim),
]


def _cmd_selfcheck(_args) -> int:
    failures = 0
    for name, fn in _SELFCHECKS:
        ok, detail = fn()
        print(f"{'PASS' if ok else 'FAIL'}  {name} ({detail})")
        if not ok:
            failures += 1
    return EXIT_OK if failures == 0 else EXIT_SELFCHECK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="klms", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", help="step exponents, rates and regime")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--setting", choices=["fh", "online"], default="fh")
    p.set_defaults(fn=_cmd_theory)

    p = sub.add_parser("simulate", help="run replicates from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("gamma-sweep", help="best constant step per sample size")
    p.add_argument("--config", required=True)
    p.add_argument("--grid-min", type=float, default=None)
    p.add_argument("--grid-max", type=float, default=None)
    p.add_argument("--grid-points", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_gamma_sweep)

    p = sub.add_parser("compare", help="four-algorithm rate comparison")
    p.add_argument("--point", type=int, choices=[1, 2, 3, 4], required=True)
    p.add_argument("--n-max", type=int, default=3162)
    p.add_argument("--replicates", type=int, default=15)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=None,
                   help="noise level (default: per-point calibration)")
    p.add_argument("--table-step", action="store_true",
                   help="use the published table's step exponent for ours")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("selfcheck", help="run the oracle-equivalence suites")
    p.set_defaults(fn=_cmd_selfcheck)

    p = sub.add_parser("bernoulli", help="evaluate B_k(x)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.set_defaults(fn=_cmd_bernoulli)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DivergenceError as err:
        print(f"numerical divergence: {err}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ConfigurationError, ValueError) as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
