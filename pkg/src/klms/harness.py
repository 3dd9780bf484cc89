"""Experiment harness: data generation, replicate orchestration, step-size
sweeps, rate fitting, and the four-algorithm comparison.

All randomness flows through numpy SeedSequences built from
(master_seed, replicate_index, stream_digest), so replicates are independent
of execution order and two configs that describe the same data distribution
see the same streams. Excess risks are evaluated with the closed form from
`klms.risk`, amortized per replicate through precomputed Gram matrices.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import risk, theory
from .bernoulli import bernoulli_poly
from .errors import ConfigurationError, DivergenceError
from .estimator import (AlgorithmSpec, FiniteHorizon, Online, TarresYao,
                        ALGORITHM_NAMES, sgd_constant_grid, sgd_run)
from .kernels import PeriodicSplineKernel, kernel_sup_sq

# The four benchmark problems: point -> (kernel order m, target index k).
TABLE_POINTS = {1: (1, 2), 2: (2, 2), 3: (1, 3), 4: (2, 1)}

# Noise levels for the published-table reproduction. The source experiments
# never state their noise, and the effective slopes over a finite window are
# noise sensitive, so these are calibrated per problem: the flat-spectrum
# problems reproduce with sigma = 0.1, the order-2 kernel with the B_2 target
# needs lower noise for the bias range to show, and the saturated problem
# needs more noise so the non-averaged competitor pays its variance.
POINT_NOISE = {1: 0.1, 2: 0.05, 3: 0.5, 4: 0.1}

# Sample-size grids start at 1, mirroring the source experiments (sizes
# distributed exponentially between 1 and n_max); the second-half fitting
# window then starts near sqrt(n_max).
CHECKPOINT_FLOOR = 1


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    kernel_order_m: int = 1
    target_index_k: int = 2
    noise_sigma: float = 0.1
    algorithm: str = "ours"
    setting: str = "finite_horizon"
    gamma0: Optional[float] = None      # None means 1 / R^2
    n_max: int = 3162
    n_checkpoints: int = 20
    replicates: int = 15
    master_seed: int = 0

    def __post_init__(self):
        if self.kernel_order_m not in (1, 2, 3, 4):
            raise ConfigurationError("kernel_order_m must be in {1, 2, 3, 4}")
        if not 1 <= self.target_index_k <= 4:
            raise ConfigurationError("target_index_k must be in 1..4")
        if self.noise_sigma < 0:
            raise ConfigurationError("noise_sigma must be non-negative")
        if self.algorithm not in ALGORITHM_NAMES:
            raise ConfigurationError(f"algorithm must be one of {ALGORITHM_NAMES}")
        if self.setting not in ("finite_horizon", "online"):
            raise ConfigurationError("setting must be finite_horizon or online")
        if self.gamma0 is not None and not self.gamma0 > 0:
            raise ConfigurationError("gamma0 must be positive")
        if self.n_max < 1 or self.n_checkpoints < 1 or self.replicates < 1:
            raise ConfigurationError("n_max, n_checkpoints and replicates must be >= 1")

    @property
    def alpha(self) -> float:
        return 2.0 * self.kernel_order_m

    @property
    def delta(self) -> float:
        return 2.0 * self.target_index_k

    @property
    def r(self) -> float:
        return (self.delta - 1.0) / (2.0 * self.alpha)

    @property
    def R_sq(self) -> float:
        return kernel_sup_sq(self.kernel_order_m)

    def effective_gamma0(self) -> float:
        return self.gamma0 if self.gamma0 is not None else 1.0 / self.R_sq

    def checkpoints(self) -> list[int]:
        return checkpoint_grid(self.n_max, self.n_checkpoints)

    def stream_digest(self) -> int:
        """Stable hash of the fields that determine the data stream, so runs
        that only differ in the algorithm see identical samples."""
        text = (f"m={self.kernel_order_m};k={self.target_index_k};"
                f"sigma={self.noise_sigma!r};n={self.n_max}")
        return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


_CONFIG_TYPES = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def parse_config(path: str) -> ExperimentConfig:
    """Read a flat ``key = value`` file with exactly the ExperimentConfig
    field names; unknown keys are errors."""
    values = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
            key, _, raw = text.partition("=")
            key = key.strip()
            raw = raw.strip()
            if key not in _CONFIG_TYPES:
                raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _coerce_field(key, raw, path, lineno)
    return ExperimentConfig(**values)


def _coerce_field(key: str, raw: str, path: str, lineno: int):
    if key in ("kernel_order_m", "target_index_k", "n_max", "n_checkpoints",
               "replicates", "master_seed"):
        try:
            return int(raw)
        except ValueError:
            raise ConfigurationError(f"{path}:{lineno}: {key} must be an integer") from None
    if key in ("noise_sigma", "gamma0"):
        if key == "gamma0" and raw.lower() in ("none", "default"):
            return None
        try:
            return float(raw)
        except ValueError:
            raise ConfigurationError(f"{path}:{lineno}: {key} must be a number") from None
    return raw


def checkpoint_grid(n_max: int, count: int) -> list[int]:
    """count log-spaced sample sizes from 1 to n_max, deduplicated."""
    lo = min(CHECKPOINT_FLOOR, n_max)
    vals = np.unique(np.round(np.geomspace(lo, n_max, count)).astype(int))
    vals = vals[(vals >= 1) & (vals <= n_max)]
    return [int(v) for v in vals]


# ---------------------------------------------------------------------------
# data
# ---------------------------------------------------------------------------

def sample_stream(seed, k: int, sigma: float, n: int):
    """(x_i, y_i) with x_i uniform on [0, 1) and y_i = B_k(x_i) + sigma e_i,
    e_i standard Gaussian; fully determined by the seed."""
    if n < 1:
        raise ConfigurationError("n must be at least 1")
    rng = np.random.default_rng(seed)
    xs = rng.random(n)
    ys = bernoulli_poly(k, xs)
    if sigma > 0:
        ys = ys + sigma * rng.standard_normal(n)
    return xs, ys


def replicate_seed(master_seed: int, rep: int, digest: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(master_seed), int(rep), int(digest)])


# ---------------------------------------------------------------------------
# per-replicate context: everything that depends only on the stream
# ---------------------------------------------------------------------------

@dataclass
class _Context:
    kernel: PeriodicSplineKernel
    xs: np.ndarray
    ys: np.ndarray
    gram: np.ndarray
    doubled_gram: np.ndarray
    inner: np.ndarray
    norm_sq: float


def _make_context(m: int, k: int, xs: np.ndarray, ys: np.ndarray) -> _Context:
    kernel = PeriodicSplineKernel(m)
    return _Context(
        kernel=kernel,
        xs=xs,
        ys=ys,
        gram=kernel.gram(xs),
        doubled_gram=kernel.doubled_gram(xs),
        inner=risk.kernel_target_inner(m, k, xs),
        norm_sq=risk.target_norm_sq(k),
    )


def _snapshot_risk(ctx: _Context, expansion) -> float:
    n = len(expansion)
    w = expansion.folded_coeffs
    if n == 0:
        return ctx.norm_sq
    quad = float(w @ ctx.doubled_gram[:n, :n] @ w)
    return quad - 2.0 * float(w @ ctx.inner[:n]) + ctx.norm_sq


# ---------------------------------------------------------------------------
# algorithm presets
# ---------------------------------------------------------------------------

def make_algorithm_spec(name: str, alpha: float, r: float, gamma0: float,
                        horizon: Optional[int] = None, setting: str = "finite_horizon",
                        step_exponent: Optional[float] = None) -> AlgorithmSpec:
    """Configured AlgorithmSpec for one of the four studied algorithms.

    For the horizon-dependent finite-horizon schedules the caller supplies
    the horizon; `step_exponent` overrides the step exponent of `ours`
    (used to reproduce a published table value that differs from the
    formula).
    """
    if name == "tarres_yao":
        sched = TarresYao(r=r)
        return AlgorithmSpec("tarres_yao", averaged=False, step=sched, reg=sched)
    if setting == "online":
        if name != "ours":
            raise ConfigurationError(f"the online setting is only wired for ours, not {name!r}")
        zeta = -theory.step_exponent_online(alpha, r)
        return AlgorithmSpec("ours", averaged=True, step=Online(gamma0, zeta))
    expo = _fh_step_exponent(name, alpha, r, step_exponent)
    if expo == 0.0:
        return _fh_spec(name, gamma0)
    if horizon is None:
        raise ConfigurationError(f"{name} needs a horizon for its constant step")
    return _fh_spec(name, gamma0 * float(horizon) ** expo)


def _fh_step_exponent(name: str, alpha: float, r: float,
                      override: Optional[float]) -> float:
    if name == "ours":
        return override if override is not None else theory.step_exponent_finite_horizon(alpha, r)
    if name in ("zhang", "ying_pontil"):
        return -2.0 * r / (2.0 * r + 1.0)
    raise ConfigurationError(f"unknown algorithm {name!r}")


def _fh_spec(name: str, gamma: float) -> AlgorithmSpec:
    averaged = name in ("ours", "zhang")
    return AlgorithmSpec(name, averaged=averaged, step=FiniteHorizon(gamma))


def _algorithm_curve(name: str, m: int, k: int, gamma0: float, setting: str,
                     ctx: _Context, cps: Sequence[int],
                     step_exponent: Optional[float] = None) -> np.ndarray:
    """Excess risk of the algorithm's designated output at each checkpoint,
    for one stream. Averaged algorithms report the averaged iterate, the
    others the last iterate."""
    alpha = 2.0 * m
    r = (2.0 * k - 1.0) / (4.0 * m)
    averaged = name in ("ours", "zhang")
    stream = (ctx.xs, ctx.ys)

    def pick(pair):
        return pair[1] if averaged else pair[0]

    horizon_free = (
        name == "tarres_yao"
        or (name == "ours" and setting == "online")
        or _fh_step_exponent(name, alpha, r, step_exponent) == 0.0
    )
    if horizon_free:
        spec = make_algorithm_spec(name, alpha, r, gamma0, horizon=None, setting=setting,
                                   step_exponent=step_exponent)
        snaps = sgd_run(ctx.kernel, stream, spec, cps, gram=ctx.gram)
        return np.array([_snapshot_risk(ctx, pick(s)) for s in snaps])

    out = np.empty(len(cps))
    for idx, horizon in enumerate(cps):
        spec = make_algorithm_spec(name, alpha, r, gamma0, horizon=horizon,
                                   setting=setting, step_exponent=step_exponent)
        snap = sgd_run(ctx.kernel, stream, spec, [horizon], gram=ctx.gram)[0]
        out[idx] = _snapshot_risk(ctx, pick(snap))
    return out


# ---------------------------------------------------------------------------
# replicate orchestration
# ---------------------------------------------------------------------------

@dataclass
class ReplicateRun:
    checkpoints: list[int]
    per_replicate: np.ndarray          # shape (replicates, len(checkpoints))
    diverged: list[tuple[int, str]] = field(default_factory=list)

    @property
    def mean(self) -> np.ndarray:
        return self.per_replicate.mean(axis=0)


def run_replicates(config: ExperimentConfig,
                   checkpoints: Optional[Sequence[int]] = None,
                   step_exponent: Optional[float] = None) -> ReplicateRun:
    """Mean excess risk of the configured algorithm over independent streams.

    A replicate that diverges is recorded (its row becomes NaN and the pair
    (index, message) lands in ``diverged``) rather than silently dropped.
    """
    cps = list(checkpoints) if checkpoints is not None else config.checkpoints()
    digest = config.stream_digest()
    gamma0 = config.effective_gamma0()
    rows = np.full((config.replicates, len(cps)), np.nan)
    diverged: list[tuple[int, str]] = []
    for rep in range(config.replicates):
        xs, ys = sample_stream(replicate_seed(config.master_seed, rep, digest),
                               config.target_index_k, config.noise_sigma, config.n_max)
        ctx = _make_context(config.kernel_order_m, config.target_index_k, xs, ys)
        try:
            rows[rep] = _algorithm_curve(config.algorithm, config.kernel_order_m,
                                         config.target_index_k, gamma0, config.setting,
                                         ctx, cps, step_exponent=step_exponent)
        except DivergenceError as err:
            diverged.append((rep, str(err)))
    return ReplicateRun(cps, rows, diverged)


# ---------------------------------------------------------------------------
# step-size sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    n: int
    best_gamma: float
    mean_excess_risk: float


def default_gamma_grid(R_sq: float, per_decade: int = 25) -> np.ndarray:
    """Log-spaced grid of constant step sizes, 1e-2/R^2 up to 2/R^2."""
    lo = 1e-2 / R_sq
    hi = 2.0 / R_sq
    count = int(math.ceil(per_decade * math.log10(hi / lo))) + 1
    return np.geomspace(lo, hi, count)


def gamma_sweep(config: ExperimentConfig, grid: Sequence[float],
                n_values: Optional[Sequence[int]] = None) -> list[SweepRow]:
    """For each sample size, the grid constant whose averaged iterate attains
    the smallest mean excess risk over the configured replicates.

    The sweep always runs the averaged unregularized recursion (that is the
    estimator whose optimal constant step is under study). Grid constants
    whose runs diverge get infinite risk and are never selected.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ConfigurationError("grid must be positive and strictly increasing")
    cps = list(n_values) if n_values is not None else config.checkpoints()
    if cps[-1] > config.n_max or cps[0] < 1:
        raise ConfigurationError("n_values must lie within 1..n_max")
    digest = config.stream_digest()
    sums = np.zeros((len(cps), grid.size))
    for rep in range(config.replicates):
        xs, ys = sample_stream(replicate_seed(config.master_seed, rep, digest),
                               config.target_index_k, config.noise_sigma, config.n_max)
        ctx = _make_context(config.kernel_order_m, config.target_index_k, xs, ys)
        coeffs = sgd_constant_grid(ctx.gram, ys, grid)
        for ci, n in enumerate(cps):
            weights = np.arange(n, 0, -1) / (n + 1)
            abar = coeffs[:, :n] * weights
            with np.errstate(invalid="ignore", over="ignore"):
                quad = np.einsum("pi,pi->p", abar @ ctx.doubled_gram[:n, :n], abar)
                sums[ci] += quad - 2.0 * (abar @ ctx.inner[:n]) + ctx.norm_sq
    means = sums / config.replicates
    rows = []
    for ci, n in enumerate(cps):
        line = np.where(np.isfinite(means[ci]), means[ci], np.inf)
        if not np.any(np.isfinite(line)):
            raise DivergenceError(n, math.inf)
        best = int(np.argmin(line))
        rows.append(SweepRow(n, float(grid[best]), float(means[ci, best])))
    return rows


# ---------------------------------------------------------------------------
# rate fitting and algorithm comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    window: tuple[int, int]            # index range [start, stop) of points used
    residual_rms: float


def fit_rate(points: Sequence[tuple[float, float]]) -> RateFit:
    """Least-squares affine fit of log10(value) against log10(n), restricted
    to the second half of the points (by index); the slope is the effective
    rate."""
    pts = list(points)
    if len(pts) < 4:
        raise ConfigurationError("need at least 4 points to fit a rate")
    start = len(pts) // 2
    window = pts[start:]
    ns = np.array([p[0] for p in window], dtype=float)
    vals = np.array([p[1] for p in window], dtype=float)
    if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
        raise ConfigurationError("rate fitting needs positive finite values in the window")
    lx = np.log10(ns)
    ly = np.log10(vals)
    design = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    return RateFit(float(slope), float(intercept), (start, len(pts)),
                   float(np.sqrt(np.mean(resid**2))))


@dataclass(frozen=True)
class ComparisonRow:
    algorithm: str
    predicted_slope: float
    effective_slope: float
    residual_rms: float


def compare_algorithms(point: int, n_max: int = 3162, replicates: int = 15,
                       noise_sigma: Optional[float] = None, master_seed: int = 0,
                       n_checkpoints: int = 20,
                       use_table_step: bool = False) -> list[ComparisonRow]:
    """Run the four algorithms on one of the benchmark problems and report
    predicted versus fitted log-log slopes.

    All algorithms see the same streams within each replicate. The default
    noise level is the per-problem calibration in POINT_NOISE; pass
    ``noise_sigma`` to override. With ``use_table_step`` the step exponent
    of `ours` follows the published experiment table instead of the
    optimizing formula (they differ for the saturated problem, point 3).
    """
    if point not in TABLE_POINTS:
        raise ConfigurationError(f"point must be one of {sorted(TABLE_POINTS)}")
    if noise_sigma is None:
        noise_sigma = POINT_NOISE[point]
    m, k = TABLE_POINTS[point]
    cfg = ExperimentConfig(kernel_order_m=m, target_index_k=k, noise_sigma=noise_sigma,
                           n_max=n_max, n_checkpoints=n_checkpoints,
                           replicates=replicates, master_seed=master_seed)
    alpha, r = cfg.alpha, cfg.r
    gamma0 = cfg.effective_gamma0()
    override = _TABLE_STEP_EXPONENTS.get((m, k)) if use_table_step else None
    cps = cfg.checkpoints()
    digest = cfg.stream_digest()

    sums = {name: np.zeros(len(cps)) for name in ALGORITHM_NAMES}
    for rep in range(replicates):
        xs, ys = sample_stream(replicate_seed(master_seed, rep, digest), k, noise_sigma, n_max)
        ctx = _make_context(m, k, xs, ys)
        for name in ALGORITHM_NAMES:
            expo = override if name == "ours" else None
            sums[name] += _algorithm_curve(name, m, k, gamma0, "finite_horizon",
                                           ctx, cps, step_exponent=expo)

    rows = []
    for name in ALGORITHM_NAMES:
        mean = sums[name] / replicates
        fit = fit_rate(list(zip(cps, mean)))
        predicted = (theory.predicted_rate(alpha, r, "fh") if name == "ours"
                     else theory.competitor_rate(r))
        rows.append(ComparisonRow(name, predicted, fit.slope, fit.residual_rms))
    return rows


# Step exponents as listed in the published experiment table; the entry for
# (m, k) = (1, 3) differs from the optimizing formula (see the ours override).
_TABLE_STEP_EXPONENTS = {(1, 2): -0.5, (2, 2): 0.0, (1, 3): -3.0 / 7.0, (2, 1): 0.0}


# ---------------------------------------------------------------------------
# CSV surface
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.16e}"


def write_simulate_csv(path: str, run: ReplicateRun) -> None:
    with open(path, "w", encoding="utf-8") as out:
        out.write("n,replicate,excess_risk\n")
        for rep in range(run.per_replicate.shape[0]):
            for ci, n in enumerate(run.checkpoints):
                out.write(f"{n},{rep},{_fmt(run.per_replicate[rep, ci])}\n")


def write_sweep_csv(path: str, rows: Iterable[SweepRow]) -> None:
    with open(path, "w", encoding="utf-8") as out:
        out.write("n,best_gamma,mean_excess_risk\n")
        for row in rows:
            out.write(f"{row.n},{_fmt(row.best_gamma)},{_fmt(row.mean_excess_risk)}\n")


def write_compare_csv(path: str, rows: Iterable[ComparisonRow]) -> None:
    with open(path, "w", encoding="utf-8") as out:
        out.write("algorithm,predicted_slope,effective_slope,residual_rms\n")
        for row in rows:
            out.write(f"{row.algorithm},{_fmt(row.predicted_slope)},"
                      f"{_fmt(row.effective_slope)},{_fmt(row.residual_rms)}\n")
