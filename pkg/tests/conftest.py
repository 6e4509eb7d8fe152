"""Shared fixtures: small Monte Carlo tables and reusable datasets."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mhrfit.inference import ChernoffConfig, chernoff_table
from mhrfit.simulation import generate_dataset, make_scenario
from mhrfit.survival_core import CensoredSample

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def chernoff4000():
    """Moderate-size quantile table, shared by inference and study tests."""
    return chernoff_table(ChernoffConfig(replications=4000))


@pytest.fixture(scope="session")
def linear_sample_800():
    """One synthetic dataset from the linear scenario, n=800."""
    return generate_dataset(make_scenario("linear"), 800, 0.5, seed=11)


@pytest.fixture()
def toy_sample():
    """Two events per arm, no censoring; theta_n is identically 1."""
    return CensoredSample.from_arrays(
        np.array([1.0, 3.0, 2.0, 4.0]),
        np.array([1, 1, 1, 1]),
        np.array([1, 1, 0, 0]),
    )


def random_censored_sample(rng, n=None):
    """Generic random two-arm censored sample for property tests."""
    if n is None:
        n = int(rng.integers(20, 120))
    arms = rng.integers(0, 2, size=n)
    if arms.sum() == 0:
        arms[0] = 1
    elif arms.sum() == n:
        arms[0] = 0
    event = rng.exponential(scale=1.0, size=n) + 0.05
    censor = rng.exponential(scale=2.0, size=n) + 0.05
    times = np.minimum(event, censor)
    status = (event <= censor).astype(int)
    return CensoredSample.from_arrays(times, status, arms)
