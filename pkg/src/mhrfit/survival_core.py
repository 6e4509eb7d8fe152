"""Step-function algebra and the classical right-censored estimators.

Everything downstream (hull construction, the monotone ratio estimator,
confidence intervals) consumes the objects defined here: per-subject
observations, two-arm samples, right-continuous step functions, and the
Nelson-Aalen / Kaplan-Meier / reverse Kaplan-Meier fits.

Conventions: arm 0 is the control arm (T), arm 1 the treatment arm (S);
status 1 is an event, 0 a censoring.  At tied times events are counted
before censorings leave the risk set, i.e. the at-risk set at t is
{Y_i >= t}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Observation",
    "CensoredSample",
    "StepFunction",
    "SurvivalCurve",
    "eval",
    "generalized_inverse",
    "hazard_increments",
    "nelson_aalen",
    "kaplan_meier",
    "reverse_kaplan_meier",
]


@dataclass(frozen=True)
class Observation:
    """One subject: observed time, event indicator, arm label."""

    time: float
    status: int
    arm: int

    def __post_init__(self):
        if not np.isfinite(self.time) or self.time < 0:
            raise ValueError(f"time must be finite and nonnegative, got {self.time}")
        if self.status not in (0, 1):
            raise ValueError(f"status must be 0 or 1, got {self.status}")
        if self.arm not in (0, 1):
            raise ValueError(f"arm must be 0 or 1, got {self.arm}")


@dataclass(frozen=True)
class CensoredSample:
    """A two-arm right-censored sample."""

    observations: tuple[Observation, ...]

    def __post_init__(self):
        if len(self.observations) < 1:
            raise ValueError("sample must contain at least one observation")
        object.__setattr__(self, "observations", tuple(self.observations))

    @classmethod
    def from_arrays(cls, times, status, arms) -> "CensoredSample":
        times = np.asarray(times, dtype=float)
        status = np.asarray(status, dtype=int)
        arms = np.asarray(arms, dtype=int)
        if not (times.shape == status.shape == arms.shape):
            raise ValueError("times, status and arms must have equal length")
        return cls(tuple(Observation(float(t), int(d), int(a))
                         for t, d, a in zip(times, status, arms)))

    @property
    def n(self) -> int:
        return len(self.observations)

    @property
    def pi_n(self) -> float:
        """Empirical fraction of subjects in arm 1."""
        return sum(o.arm for o in self.observations) / self.n

    def arm_arrays(self, arm: int) -> tuple[np.ndarray, np.ndarray]:
        """(times, status) for one arm, in input order."""
        t = np.array([o.time for o in self.observations if o.arm == arm])
        d = np.array([o.status for o in self.observations if o.arm == arm])
        return t, d


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous nondecreasing piecewise-constant function.

    Value is ``value_at_zero`` on (-inf, knots[0]) and ``values[j]`` on
    [knots[j], knots[j+1]).  Empty knot lists give the constant
    ``value_at_zero``.
    """

    knots: np.ndarray
    values: np.ndarray
    value_at_zero: float = 0.0

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if knots.shape != values.shape or knots.ndim != 1:
            raise ValueError("knots and values must be 1-d arrays of equal length")
        if knots.size and np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if values.size and np.any(np.diff(values) < 0):
            raise ValueError("values must be nondecreasing")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)

    def __call__(self, t):
        """Right-continuous evaluation; scalar or array argument."""
        idx = np.searchsorted(self.knots, t, side="right") - 1
        out = np.where(idx >= 0, self.values[np.maximum(idx, 0)] if self.values.size
                       else self.value_at_zero, self.value_at_zero)
        if np.isscalar(t) or np.ndim(t) == 0:
            return float(out)
        return out

    def left_limit(self, t):
        """Value just before t (the left limit)."""
        idx = np.searchsorted(self.knots, t, side="left") - 1
        out = np.where(idx >= 0, self.values[np.maximum(idx, 0)] if self.values.size
                       else self.value_at_zero, self.value_at_zero)
        if np.isscalar(t) or np.ndim(t) == 0:
            return float(out)
        return out

    @property
    def sup(self) -> float:
        return float(self.values[-1]) if self.values.size else self.value_at_zero


@dataclass(frozen=True)
class SurvivalCurve:
    """Survival function backed by a nondecreasing distribution estimate.

    ``distribution`` is the step-function estimate of F; ``survival``
    holds the survival value on each [knots[j], knots[j+1]).  Evaluation
    returns the stored survival values themselves rather than
    1 - distribution(t), so product-limit identities hold bitwise.
    """

    distribution: StepFunction
    survival: np.ndarray

    def __post_init__(self):
        survival = np.asarray(self.survival, dtype=float)
        if survival.shape != self.distribution.knots.shape:
            raise ValueError("survival values must match the knots")
        if survival.size and np.any(np.diff(survival) > 0):
            raise ValueError("survival values must be non-increasing")
        object.__setattr__(self, "survival", survival)

    def _lookup(self, t, side):
        idx = np.searchsorted(self.distribution.knots, t, side=side) - 1
        out = np.where(idx >= 0,
                       self.survival[np.maximum(idx, 0)] if self.survival.size
                       else 1.0, 1.0)
        if np.isscalar(t) or np.ndim(t) == 0:
            return float(out)
        return out

    def __call__(self, t):
        return self._lookup(t, "right")

    def left_limit(self, t):
        """Survival just before t."""
        return self._lookup(t, "left")


def eval(f: StepFunction, t: float) -> float:
    """Right-continuous evaluation of a step function."""
    return f(t)


def generalized_inverse(f: StepFunction, u: float) -> float:
    """Smallest t with f(t) >= u; 0 for u <= f's value at zero.

    The quantile-type inverse inf{t : f(t) >= u}.
    """
    if u > f.sup:
        raise ValueError(f"above range: u={u} exceeds sup f={f.sup}")
    if u <= f.value_at_zero:
        return 0.0
    idx = int(np.searchsorted(f.values, u, side="left"))
    return float(f.knots[idx])


def _event_table(times: np.ndarray, status: np.ndarray):
    """Distinct event times with event counts and at-risk counts."""
    order = np.argsort(times, kind="stable")
    times = times[order]
    status = status[order]
    utimes, first = np.unique(times, return_index=True)
    n = times.size
    # at risk at u: subjects with observed time >= u
    at_risk = n - first
    d = np.add.reduceat(status, first)
    keep = d > 0
    return utimes[keep], d[keep].astype(float), at_risk[keep].astype(float)


def hazard_increments(sample: CensoredSample, arm: int):
    """(event times, Nelson-Aalen increments dN/Y, at-risk counts) for an arm."""
    times, status = sample.arm_arrays(arm)
    if times.size == 0:
        raise ValueError(f"empty stratum: no observations in arm {arm}")
    utimes, d, y = _event_table(times, status)
    return utimes, d / y, y


def nelson_aalen(sample: CensoredSample, arm: int) -> StepFunction:
    """Stratified Nelson-Aalen cumulative hazard for one arm."""
    utimes, inc, _ = hazard_increments(sample, arm)
    return StepFunction(utimes, np.cumsum(inc))


def kaplan_meier(sample: CensoredSample, arm: int) -> SurvivalCurve:
    """Kaplan-Meier survival curve for the event distribution of one arm."""
    utimes, inc, _ = hazard_increments(sample, arm)
    surv = np.cumprod(1.0 - inc)
    return SurvivalCurve(StepFunction(utimes, 1.0 - surv), surv)


def reverse_kaplan_meier(sample: CensoredSample, arm: int) -> SurvivalCurve:
    """Kaplan-Meier with the status flipped: the censoring survival curve."""
    flipped = CensoredSample(tuple(
        Observation(o.time, 1 - o.status, o.arm) for o in sample.observations))
    return kaplan_meier(flipped, arm)
