"""Infinite-rate baselines: order-L MMSE prediction and zero-holding.

Both estimators see only the noisy observation stream y.  The Wiener
coefficients come from the Toeplitz normal equations over kappa_y, and the
closed-form MSEs are the distortion floors used by every bound downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .channel import Autocovariance, NoiseSpec
from .errors import DimensionMismatch, SingularSystem


@dataclass(frozen=True, eq=False)
class PredictorCoefficients:
    """Wiener coefficients theta_1..theta_L and the prediction MSE sigma_P^2."""

    theta: np.ndarray
    order: int
    sigma_p_sq: float


@dataclass(frozen=True)
class ZhEstimator:
    """Zero-holding estimator: forecast alpha * y_k, with MSE sigma_z_sq."""

    alpha: float
    sigma_z_sq: float

    def estimate(self, y_k: float) -> float:
        return self.alpha * y_k


def mmse_coefficients(acov: Autocovariance, noise: NoiseSpec, order: int) -> PredictorCoefficients:
    """Solve the normal equations K theta = r for the one-step predictor.

    K is the L x L Toeplitz matrix of kappa_y and r = (kappa_x(1..L)); the
    prediction MSE is sigma_x^2 - r' K^-1 r.
    """
    if order < 1:
        raise ValueError("predictor order must be >= 1")
    if acov.max_lag < order:
        raise ValueError(f"autocovariance max_lag {acov.max_lag} < order {order}")

    kappa_y = acov.lags[:order].copy()
    kappa_y[0] += noise.obs_noise_var
    gram = toeplitz(kappa_y)
    r = acov.lags[1 : order + 1]
    try:
        theta = np.linalg.solve(gram, r)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("observation covariance matrix is singular") from exc
    sigma_p_sq = float(acov.lags[0] - r @ theta)
    # guard against roundoff producing a tiny negative MSE in noiseless cases
    sigma_p_sq = max(sigma_p_sq, 0.0)
    return PredictorCoefficients(theta=theta, order=order, sigma_p_sq=sigma_p_sq)


def predict_one_step(coeffs: PredictorCoefficients, window) -> float:
    """One-step forecast sum_l theta_l * y_{k+1-l}.

    ``window`` is ordered oldest to newest, (y_{k-L+1}, ..., y_k).
    """
    window = np.asarray(window, dtype=float)
    if window.shape != (coeffs.order,):
        raise DimensionMismatch(f"window length {window.shape} != order {coeffs.order}")
    return float(np.dot(coeffs.theta, window[::-1]))


def zh_estimator(acov: Autocovariance, noise: NoiseSpec) -> ZhEstimator:
    """Zero-holding baseline: alpha y_k as the forecast of x_{k+1}.

    alpha is the scalar MMSE weight sigma_x^2 / (sigma_x^2 + sigma_xi^2) and
    the MSE is 2 sigma_x^2 - 2 kappa_x(1) + sigma_x^2 sigma_xi^2 / (sigma_x^2 + sigma_xi^2).
    """
    sigma_x_sq = acov.sigma_x_sq
    total = sigma_x_sq + noise.obs_noise_var
    alpha = sigma_x_sq / total if total > 0 else 0.0
    filter_mse = sigma_x_sq * noise.obs_noise_var / total if total > 0 else 0.0
    sigma_z_sq = 2.0 * sigma_x_sq - 2.0 * float(acov.lags[1]) + filter_mse
    return ZhEstimator(alpha=alpha, sigma_z_sq=sigma_z_sq)


def zh_estimate(y_k: float, est: ZhEstimator) -> float:
    """Zero-holding forecast from the newest observation."""
    return est.estimate(y_k)
