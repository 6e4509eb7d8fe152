"""Pointwise confidence intervals for the monotone hazard ratio.

Two routes:

* plug-in: theta_n(x) +/- tau_n(x) q_{1-alpha/2} / n^{1/3}, where q is a
  quantile of the Chernoff distribution (simulated once and cached) and
  tau_n estimates the limiting scale from the fitted curves, with the
  derivative of theta_n on the cumulative-hazard scale obtained by a
  cross-validated local linear smoother;
* sample splitting: average the fits on m random disjoint subsets and form
  a t-interval from their spread.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import isotonic_regression
from scipy.stats import t as student_t

from .mhr_estimator import MhrFit, TruncationPolicy, fit_theta, theta_at
from .survival_core import (CensoredSample, generalized_inverse, kaplan_meier,
                            reverse_kaplan_meier)

__all__ = [
    "ChernoffConfig",
    "ChernoffTable",
    "ConfidenceInterval",
    "SplitFit",
    "chernoff_table",
    "chernoff_quantile",
    "local_linear_slope",
    "cv_bandwidth",
    "estimate_tau",
    "plugin_ci",
    "split_fit",
    "split_ci",
]

DEFAULT_PROBABILITIES = tuple(np.round(np.arange(1, 1000) / 1000.0, 3))


@dataclass(frozen=True)
class ChernoffConfig:
    """Monte Carlo design for the Chernoff quantile table."""

    replications: int = 100_000
    domain_half_width: float = 10.0
    grid_step: float = 0.005
    seed: int = 1234

    def __post_init__(self):
        if self.replications < 1 or self.domain_half_width <= 0 or self.grid_step <= 0:
            raise ValueError("invalid Chernoff Monte Carlo configuration")
        if self.grid_step >= self.domain_half_width:
            raise ValueError("grid step must be smaller than the domain half-width")

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class ChernoffTable:
    """Empirical quantiles of the Chernoff distribution.

    W is the location of the maximum of B(t) - t^2 for a standard two-sided
    Brownian motion B; the left slope at zero of the greatest convex
    minorant of B(t) + t^2 equals 2W, which is what the simulation
    computes on a truncated grid before halving.
    """

    probabilities: tuple[float, ...]
    quantiles: tuple[float, ...]
    mean: float
    variance: float
    config: ChernoffConfig

    def quantile(self, p: float) -> float:
        probs = np.asarray(self.probabilities)
        if not probs[0] <= p <= probs[-1]:
            raise ValueError(f"p={p} outside tabulated range "
                             f"[{probs[0]}, {probs[-1]}]")
        return float(np.interp(p, probs, np.asarray(self.quantiles)))


def _simulate_chernoff(config: ChernoffConfig) -> np.ndarray:
    """Per-replication slope-at-zero draws, already halved to the W scale.

    Replication streams are derived from (seed, replication index) so the
    result does not depend on any execution batching.
    """
    half = int(round(config.domain_half_width / config.grid_step))
    n_grid = 2 * half + 1
    i0 = half
    t = (np.arange(n_grid) - i0) * config.grid_step
    parabola = t * t
    sqrt_step = math.sqrt(config.grid_step)
    draws = np.empty(config.replications)
    for rep in range(config.replications):
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence((config.seed, rep))))
        incr = rng.standard_normal(n_grid - 1) * sqrt_step
        b = np.empty(n_grid)
        b[i0] = 0.0
        np.cumsum(incr[i0:], out=b[i0 + 1:])
        b[:i0] = -np.cumsum(incr[:i0][::-1])[::-1]
        z = b + parabola
        slopes = np.diff(z) / config.grid_step
        # GCM slopes on a uniform grid are the isotonic regression of the
        # finite differences; the segment ending at 0 has index i0 - 1.
        iso = isotonic_regression(slopes).x
        draws[rep] = 0.5 * iso[i0 - 1]
    return draws


def chernoff_table(config: ChernoffConfig = ChernoffConfig(),
                   probabilities=DEFAULT_PROBABILITIES,
                   cache_path: str | os.PathLike | None = None) -> ChernoffTable:
    """Build (or load from cache) the quantile table for a MC config."""
    probabilities = tuple(float(p) for p in probabilities)
    if any(not 0.0 < p < 1.0 for p in probabilities):
        raise ValueError("probabilities must lie in (0, 1)")
    if list(probabilities) != sorted(probabilities):
        raise ValueError("probabilities must be sorted")
    if cache_path is not None and os.path.exists(cache_path):
        table = _load_table(cache_path)
        if (table is not None and table.config == config
                and table.probabilities == probabilities):
            return table
    draws = _simulate_chernoff(config)
    table = ChernoffTable(
        probabilities=probabilities,
        quantiles=tuple(float(q) for q in np.quantile(draws, probabilities)),
        mean=float(draws.mean()),
        variance=float(draws.var()),
        config=config,
    )
    if cache_path is not None:
        save_table(table, cache_path)
    return table


def save_table(table: ChernoffTable, path: str | os.PathLike) -> None:
    payload = {
        "config": asdict(table.config),
        "config_digest": table.config.digest(),
        "probabilities": list(table.probabilities),
        "quantiles": list(table.quantiles),
        "mean": table.mean,
        "variance": table.variance,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_table(path: str | os.PathLike) -> ChernoffTable | None:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        config = ChernoffConfig(**payload["config"])
        if payload.get("config_digest") != config.digest():
            return None
        return ChernoffTable(
            probabilities=tuple(payload["probabilities"]),
            quantiles=tuple(payload["quantiles"]),
            mean=payload["mean"],
            variance=payload["variance"],
            config=config,
        )
    except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError):
        return None


def chernoff_quantile(p: float, config: ChernoffConfig = ChernoffConfig(),
                      cache_path: str | os.PathLike | None = None) -> float:
    """Monte Carlo Chernoff quantile at probability p."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    return chernoff_table(config, cache_path=cache_path).quantile(p)


def _epanechnikov(z: np.ndarray) -> np.ndarray:
    return np.where(np.abs(z) < 1.0, 0.75 * (1.0 - z * z), 0.0)


def local_linear_slope(points, u0: float, bandwidth: float) -> float:
    """Slope of the Epanechnikov-weighted least-squares line at u0."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    pts = np.asarray(points, dtype=float)
    u, y = pts[:, 0], pts[:, 1]
    d = u - u0
    w = _epanechnikov(d / bandwidth)
    active = w > 0
    if np.unique(u[active]).size < 2:
        raise ValueError("bandwidth too small: fewer than 2 points in window")
    sw = w.sum()
    swd = (w * d).sum()
    den = (w * d * d).sum() - swd * swd / sw
    if den <= 0:
        raise ValueError("bandwidth too small: degenerate design")
    num = (w * d * y).sum() - swd * (w * y).sum() / sw
    return float(num / den)


def _loo_predictions(u: np.ndarray, y: np.ndarray, h: float):
    """Leave-level-out local-linear predictions at every u_i, or None.

    Each point is predicted with every point sharing its y value held
    out, not just itself.  With all-distinct responses this is ordinary
    leave-one-out.  With piecewise-constant responses (slopes read off a
    convex minorant) plain LOO lets a point be interpolated by its own
    flat run, which drives the score to favor bandwidths too narrow to
    see any level change; holding the run out scores real smoothing.
    Bandwidths whose windows leave some point with fewer than two
    usable neighbors are infeasible (None).
    """
    d = u[None, :] - u[:, None]
    w = _epanechnikov(d / h)
    w[y[None, :] == y[:, None]] = 0.0
    if np.any((w > 0).sum(axis=1) < 2):
        return None
    s0 = w.sum(axis=1)
    s1 = (w * d).sum(axis=1)
    s2 = (w * d * d).sum(axis=1)
    t0 = w @ y
    t1 = (w * d) @ y
    den = s0 * s2 - s1 * s1
    if np.any(den <= 0):
        return None
    return (s2 * t0 - s1 * t1) / den


def cv_bandwidth(points, candidates) -> float:
    """Leave-one-out cross-validated bandwidth over a candidate grid.

    Ties (within a tiny absolute tolerance, to absorb float noise on
    exactly-linear data) resolve to the largest bandwidth.
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] < 3:
        raise ValueError("need at least 3 points for cross validation")
    u, y = pts[:, 0], pts[:, 1]
    candidates = np.sort(np.asarray(candidates, dtype=float))
    errors = np.full(candidates.size, np.inf)
    for i, h in enumerate(candidates):
        pred = _loo_predictions(u, y, h)
        if pred is not None:
            errors[i] = float(np.sum((pred - y) ** 2))
    if not np.any(np.isfinite(errors)):
        raise ValueError("all candidates infeasible")
    tol = 1e-12 * (1.0 + float(np.dot(y, y)))
    best = errors.min()
    return float(candidates[np.nonzero(errors <= best + tol)[0][-1]])


@dataclass(frozen=True)
class ConfidenceInterval:
    x: float
    estimate: float
    lower: float
    upper: float
    level: float
    method: str

    def __post_init__(self):
        if not self.lower <= self.estimate <= self.upper:
            raise ValueError("interval must contain its estimate")
        if self.method not in ("plugin", "split", "kernel"):
            raise ValueError(f"unknown method {self.method!r}")

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def _derivative_grid(fit: MhrFit, n: int):
    """theta_n on the cumulative-hazard scale, on ceil(n^(2/3)) grid points."""
    m = math.ceil(round(n ** (2.0 / 3.0), 9))
    if m < 9:
        raise ValueError("sample too small for the derivative grid")
    grid = np.linspace(0.0, fit.eta_n, m)
    g = np.array([theta_at(fit, generalized_inverse(fit.lambda_T_hat, u))
                  for u in grid])
    return np.column_stack([grid, g]), m


def estimate_tau(fit: MhrFit, sample: CensoredSample, x: float) -> float:
    """Plug-in scale tau_n(x) for the plug-in confidence interval.

    tau^3 = 4 * d/du[theta_n o Lambda_T^-](Lambda_T(x))
              * [theta/(pi Fbar_S(x) Fbar_U(x-)) +
                 theta^2/((1-pi) Fbar_T(x) Fbar_V(x-))].

    The derivative is clamped at zero: theta_n is nondecreasing, so a
    negative cross-validated slope is smoothing noise.
    """
    if not 0.0 < x < fit.gamma_n:
        raise ValueError(f"x must lie strictly inside (0, gamma_n={fit.gamma_n})")
    points, m = _derivative_grid(fit, sample.n)
    if np.unique(points[:, 1]).size == 1:
        # entirely flat fit: zero derivative without a bandwidth search
        deriv = 0.0
    else:
        candidates = np.geomspace(4.0 * fit.eta_n / m, fit.eta_n / 2.0, 20)
        h = cv_bandwidth(points, candidates)
        deriv = max(local_linear_slope(points, fit.lambda_T_hat(x), h), 0.0)
    theta = theta_at(fit, x)
    pi = sample.pi_n
    factors = {
        "pi": pi,
        "1-pi": 1.0 - pi,
        "Fbar_S": kaplan_meier(sample, 1)(x),
        "Fbar_T": kaplan_meier(sample, 0)(x),
        "Fbar_U": reverse_kaplan_meier(sample, 1).left_limit(x),
        "Fbar_V": reverse_kaplan_meier(sample, 0).left_limit(x),
    }
    for name, value in factors.items():
        if value <= 0:
            raise ValueError(f"scale undefined at x: {name} estimate is 0")
    bracket = (theta / (pi * factors["Fbar_S"] * factors["Fbar_U"])
               + theta ** 2 / ((1.0 - pi) * factors["Fbar_T"] * factors["Fbar_V"]))
    return float(np.cbrt(4.0 * deriv * bracket))


def plugin_ci(fit: MhrFit, sample: CensoredSample, x: float, alpha: float,
              chernoff: ChernoffTable) -> ConfidenceInterval:
    """theta_n(x) +/- tau_n(x) q_{1-alpha/2} / n^{1/3}."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    tau = estimate_tau(fit, sample, x)
    q = chernoff.quantile(1.0 - alpha / 2.0)
    half = float(tau * q / np.cbrt(sample.n))
    estimate = theta_at(fit, x)
    return ConfidenceInterval(x=x, estimate=estimate, lower=estimate - half,
                              upper=estimate + half, level=1.0 - alpha,
                              method="plugin")


@dataclass(frozen=True)
class SplitFit:
    """Fits on m random disjoint subsets, evaluable at any x."""

    fits: tuple[MhrFit, ...]
    m: int

    def estimates_at(self, x: float) -> list[float]:
        short = [f.gamma_n for f in self.fits if f.gamma_n < x]
        if short:
            raise ValueError(
                f"fewer than m usable splits at x={x}: "
                f"a split truncates at {min(short)}")
        return [theta_at(f, x) for f in self.fits]

    def pooled_at(self, x: float) -> float:
        return float(np.mean(self.estimates_at(x)))

    def sd_at(self, x: float) -> float:
        return float(np.std(self.estimates_at(x), ddof=1))


def split_fit(sample: CensoredSample, m: int,
              policy: TruncationPolicy = TruncationPolicy(),
              seed=0) -> SplitFit:
    """Fit theta_n on m random disjoint subsets of roughly equal size."""
    if m < 2:
        raise ValueError("m must be at least 2")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(sample.n)
    fits = []
    for part in np.array_split(perm, m):
        try:
            sub = CensoredSample(tuple(sample.observations[i] for i in np.sort(part)))
            fits.append(fit_theta(sub, policy))
        except ValueError as exc:
            raise ValueError("split degenerate; reduce m") from exc
    return SplitFit(fits=tuple(fits), m=m)


def split_ci(splitfit: SplitFit, x: float, alpha: float) -> ConfidenceInterval:
    """t-interval from the spread of the per-split estimates."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    estimates = splitfit.estimates_at(x)
    pooled = float(np.mean(estimates))
    sd = float(np.std(estimates, ddof=1))
    tq = float(student_t.ppf(1.0 - alpha / 2.0, splitfit.m - 1))
    half = tq * sd / math.sqrt(splitfit.m)
    return ConfidenceInterval(x=x, estimate=pooled, lower=pooled - half,
                              upper=pooled + half, level=1.0 - alpha,
                              method="split")
