"""Estimation of the harmonic functions V, V* and the exit-time constants.

V(x) = -E[S at exit from x] is estimated two ways: the ladder estimator
walks each path to its exit (or a step cap) and averages the exit value,
while the killed estimator averages the position at a finite horizon,
E(x + S_n; tau_x > n), which increases to V(x).  Both run under the base
law, its dual (negated increments), or a mean-zero tilted law.

A HarmonicTable interpolates grid estimates linearly and extrapolates as
x + offset beyond the grid, which is exact to o(1) since V(x)/x -> 1.
The constants kappa (and their tilted versions) are quadratures of the
one-step killing probability against the dual table.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import CensoringExcess, DriftedLaw, QuadratureFailure
from .increments import IncrementLaw, TiltedLaw, left_exit_prob
from .rngstream import chunk_generator, mix64, resolve_threads
from .special import quad
from .walk import McEstimate, Statistic, _block_len, _chunk_sizes, \
    _combine, _run_chunks


@dataclass(frozen=True)
class LadderEstimate(McEstimate):
    censor_rate: float = 0.0


def _require_zero_mean(sampler):
    if abs(sampler.mean) > 1e-10:
        raise DriftedLaw(f"law has mean {sampler.mean!r}; tilt it first")


def estimate_V_ladder(law, x: float, cap: int = 10 ** 6, samples: int = 10 ** 5,
                      seed: int = 0, dual: bool = False,
                      threads: int | None = None) -> LadderEstimate:
    """Mean exit value -S_tau from start x, paths capped at ``cap`` steps.

    Censored paths contribute zero and are reported through the censor
    rate; their bias is bounded by the survival probability at the cap
    times (x + overshoot scale).
    """
    if cap < 10 ** 3:
        raise ValueError("cap must be at least 1e3")
    _require_zero_mean(law)
    threads = resolve_threads(threads)
    n_chunks, sizes = _chunk_sizes(samples)

    def worker(i):
        rng = chunk_generator(seed, i)
        pos = np.full(sizes[i], float(x))
        done = 0
        s = q = 0.0
        while pos.size and done < cap:
            b = _block_len(pos.size, cap - done)
            d = law.sample_block(rng, (pos.size, b))
            if dual:
                np.negative(d, out=d)
            np.cumsum(d, axis=1, out=d)
            d += pos[:, None]
            neg = d < 0.0
            died = neg.any(axis=1)
            if died.any():
                rows = np.nonzero(died)[0]
                first = neg[rows].argmax(axis=1)
                vals = x - d[rows, first]
                s += float(vals.sum())
                q += float((vals * vals).sum())
                pos = d[~died, b - 1]
            else:
                pos = d[:, b - 1]
            done += b
        return [(s, q)], pos.size

    raw = _run_chunks(worker, n_chunks, threads)
    est = _combine([r[0] for r in raw], samples, seed)[0]
    censored = sum(r[1] for r in raw)
    rate = censored / samples
    if rate > 1e-3:
        warnings.warn(f"ladder estimate censored {rate:.2%} of paths",
                      CensoringExcess)
    return LadderEstimate(est.mean, est.stderr, est.count, est.seed, rate)


def estimate_V_killed(law, x: float, n: int, samples: int, seed: int,
                      dual: bool = False, threads: int | None = None) -> McEstimate:
    """E(x + S_n; tau_x > n), a monotone-in-n lower approximant of V(x)."""
    _require_zero_mean(law)
    sigma = law.sigma
    from .walk import _mc_many
    return _mc_many(law, sigma, x, n, [Statistic.killed_position(dual=dual)],
                    samples, seed, threads)[0]


# ---------------------------------------------------------------------------
# Tables


DEFAULT_GRID_HALF_STEPS = range(-2, 11)  # sigma * 2^(k/2)


def default_grid(sigma: float):
    pts = [0.0] + [sigma * 2.0 ** (k / 2.0) for k in DEFAULT_GRID_HALF_STEPS]
    return tuple(pts)


@dataclass(frozen=True)
class TableParams:
    method: str = "ladder"     # or "killed"
    accuracy: float = 0.01     # stderr target at x = 0, in units of sigma
    rel_accuracy: float = 0.006  # stderr target per unit of x/sigma beyond 0
    horizon: int = 10 ** 4     # killed-estimator horizon
    seed: int = 0

    def point_budget(self, x: float, sigma: float):
        """Per-point (samples, cap) hitting the stderr target.

        The exit-value spread is O(sigma), so samples ~ (sigma/target)^2;
        the cap keeps the censoring bias, roughly the survival probability
        at the cap times (x + sigma), at the order of the target.
        """
        xt = x / sigma
        target = max(self.accuracy, self.rel_accuracy * xt) * sigma
        samples = max(300, int((1.2 * sigma / target) ** 2))
        cap = max(10 ** 5, int(((xt + 1.0) ** 2 * sigma / target) ** 2))
        return samples, cap


@dataclass(frozen=True)
class HarmonicTable:
    grid: tuple
    values: tuple  # McEstimate per grid point
    dual: bool = False
    tilt: float | None = None
    extrapolation_offset: float = 0.0
    _means: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_means",
                           np.array([v.mean for v in self.values]))

    def __call__(self, x):
        """Interpolated estimate; x + offset beyond the grid."""
        x = np.asarray(x, dtype=float)
        inside = np.interp(x, self.grid, self._means)
        out = np.where(x > self.grid[-1], x + self.extrapolation_offset, inside)
        out = np.where(x < self.grid[0], self._means[0], out)
        return float(out) if out.ndim == 0 else out

    def stderr_at(self, x: float) -> float:
        i = int(np.searchsorted(self.grid, x).clip(0, len(self.grid) - 1))
        return self.values[i].stderr


def build_harmonic_table(law, grid=None, method: str = "ladder",
                         params: TableParams | None = None, dual: bool = False,
                         tilt: TiltedLaw | None = None,
                         threads: int | None = None) -> HarmonicTable:
    """Estimate V (or V*, or their tilted versions) on a grid.

    With a tilt the estimation runs under the mean-zero tilted sampler.
    The extrapolation offset is an inverse-variance fit of (estimate - x)
    over the top grid decade.
    """
    params = params or TableParams(method=method)
    sampler = tilt.sampler if tilt is not None else law
    sigma = sampler.sigma
    grid = tuple(grid) if grid is not None else default_grid(sigma)
    values = []
    for j, x in enumerate(grid):
        pt_seed = mix64(params.seed ^ mix64(1000 + j))
        n_pt, cap_pt = params.point_budget(x, sigma)
        if params.method == "ladder":
            est = estimate_V_ladder(sampler, x, cap=cap_pt, samples=n_pt,
                                    seed=pt_seed, dual=dual, threads=threads)
        elif params.method == "killed":
            est = estimate_V_killed(sampler, x, params.horizon, n_pt,
                                    pt_seed, dual=dual, threads=threads)
        else:
            raise ValueError(f"unknown method {params.method!r}")
        values.append(est)

    top = [i for i, x in enumerate(grid) if x >= grid[-1] / 10.0 and x > 0]
    wsum = vsum = 0.0
    for i in top:
        w = 1.0 / max(values[i].stderr, 1e-12) ** 2
        wsum += w
        vsum += w * (values[i].mean - grid[i])
    offset = vsum / wsum if wsum > 0 else 0.0
    lam = tilt.lam if tilt is not None else None
    return HarmonicTable(grid, tuple(values), dual, lam, offset)


def harmonicity_residual(law, table: HarmonicTable, x: float, samples: int,
                         seed: int, tilt: TiltedLaw | None = None) -> McEstimate:
    """MC estimate of E[V(x + X) 1{x + X >= 0}] - V(x) under the table.

    Zero for the exact harmonic function; the estimate's deviation is
    bounded by the table's own error budget.
    """
    sampler = tilt.sampler if tilt is not None else law
    n_chunks, sizes = _chunk_sizes(samples)
    vx = table(x)

    def worker(i):
        rng = chunk_generator(seed, i)
        step = sampler.sample_block(rng, sizes[i])
        if table.dual:
            step = -step
        pos = x + step
        vals = np.where(pos >= 0.0, table(pos), 0.0)
        return [(float(vals.sum()), float((vals * vals).sum()))]

    parts = _run_chunks(worker, n_chunks, resolve_threads(None))
    est = _combine(parts, samples, seed)[0]
    return McEstimate(est.mean - vx, est.stderr, est.count, est.seed)


# ---------------------------------------------------------------------------
# kappa constants


def _decay_weight(lam):
    if lam is None or lam == 0.0:
        return lambda t: 1.0
    return lambda t: math.exp(-lam * t)


def kappa_constant(law: IncrementLaw, dual_table: HarmonicTable,
                   tilt: TiltedLaw | None = None,
                   quad_tol: float = 1e-10) -> float:
    """Killing-probability form: integral of P(t + X < 0) w(t) V*(t) dt.

    ``law`` is the base (possibly drifted) law; the dual table must hold
    V* estimated under the tilted measure when a tilt is supplied, and the
    weight is then exp(-lam t).
    """
    lam = tilt.lam if tilt is not None else None
    w = _decay_weight(lam)

    def integrand(t):
        return left_exit_prob(law, t) * w(t) * float(dual_table(t))

    hi = _kappa_truncation(law, dual_table, lam)
    val = quad(integrand, 0.0, hi, tol=quad_tol,
               points=list(dual_table.grid))
    if val <= 0.0:
        raise QuadratureFailure("kappa integral came out non-positive")
    return val


def _kappa_truncation(law, table, lam):
    t = max(table.grid[-1], 1.0)
    while left_exit_prob(law, t) * float(table(t)) * \
            (math.exp(-lam * t) if lam else 1.0) > 1e-12 and t < 1e6:
        t *= 1.5
    return t


def kappa_extension_form(law: IncrementLaw, dual_table: HarmonicTable,
                         tilt: TiltedLaw | None = None,
                         quad_tol: float = 1e-8) -> float:
    """Extension form: E e^{lam X} times the integral of e^{-lam t} V*(t)
    over t < 0, with V* continued below zero by one harmonic step.

    The continuation V*(s) = E_tilted[V*(s - X); s - X >= 0] uses the
    tilted density (the base density when no tilt is given).
    """
    lam = tilt.lam if tilt is not None else 0.0
    sampler = tilt.sampler if tilt is not None else law
    mass = math.exp(tilt.log_mgf) if tilt is not None else 1.0

    if isinstance(sampler, IncrementLaw) and sampler.family == "finite_support":
        def v_ext(s):
            return sum(p * float(dual_table(s - xi))
                       for xi, p in zip(sampler.points, sampler.probs)
                       if s - xi >= 0.0)
    else:
        if isinstance(sampler, IncrementLaw):
            dens = sampler.density
            step_lo, step_hi = sampler.support_bounds()
        else:
            base, tl = sampler.base, sampler.lam
            lg = tilt.log_mgf
            step_lo, step_hi = base.support_bounds()

            def dens(u):
                return math.exp(tl * u - lg) * float(base.density(u))

        knots = list(dual_table.grid)

        def v_ext(s):
            lo_u, hi_u = max(0.0, s - step_hi), s - step_lo
            if hi_u <= lo_u:
                return 0.0
            return quad(lambda u: float(dual_table(u)) * float(dens(s - u)),
                        lo_u, hi_u, tol=1e-10, points=knots)

    lo = -1.0
    while v_ext(lo) * math.exp(-lam * lo) > 1e-12 and lo > -1e4:
        lo *= 1.5

    val = quad(lambda s: math.exp(-lam * s) * v_ext(s), lo, 0.0, tol=quad_tol)
    return mass * val


def weighted_table_integral(table: HarmonicTable, decay: float) -> float:
    """Integral of exp(-decay t) V(t) over the positive half-line.

    Piecewise-linear quadrature on the grid plus the closed-form tail of
    the linear extrapolation, used for the drifted survival constant and
    the exponential-functional ingredient.
    """
    if decay <= 0:
        raise ValueError("decay rate must be positive")
    T = table.grid[-1]
    head = quad(lambda t: math.exp(-decay * t) * float(table(t)), 0.0, T,
                tol=1e-11, points=list(table.grid))
    c = table.extrapolation_offset
    tail = math.exp(-decay * T) * ((T + c) / decay + 1.0 / decay ** 2)
    return head + tail
