"""Shared fixtures: reference models and session-scoped long traces."""

import numpy as np
import pytest

from csi_feedback import ArModel, NoiseSpec, autocovariance, generate_trace

REF_AR4 = ArModel(coeffs=(0.5, 0.2, 0.1, 0.05), innovation_var=1.0)
REF_AR1 = ArModel(coeffs=(0.9,), innovation_var=1.0)
UNIT_NOISE = NoiseSpec(obs_noise_var=1.0)


@pytest.fixture(scope="session")
def ar4():
    return REF_AR4


@pytest.fixture(scope="session")
def ar1():
    return REF_AR1


@pytest.fixture(scope="session")
def noise():
    return UNIT_NOISE


@pytest.fixture(scope="session")
def ar4_acov():
    return autocovariance(REF_AR4, 8)


@pytest.fixture(scope="session")
def ar1_acov():
    return autocovariance(REF_AR1, 4)


@pytest.fixture(scope="session")
def ar4_trace_1m():
    return generate_trace(REF_AR4, UNIT_NOISE, 1_000_000, seed=4)


@pytest.fixture(scope="session")
def ar1_trace_10m():
    return generate_trace(REF_AR1, UNIT_NOISE, 10_000_000, seed=99)


def sliding_predictions(y: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Vectorized one-step predictions; entry j forecasts x[len(theta) + j]."""
    windows = np.lib.stride_tricks.sliding_window_view(y, theta.size)[:-1]
    return windows @ theta[::-1]
