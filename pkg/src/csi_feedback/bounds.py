"""Rate-distortion lower bounds and the high-resolution uniform-quantizer rate.

Each bound maps a target reconstruction distortion D to a minimum number of
bits per feedback sample.  The prediction-based bounds share the floor
sigma_P^2 and the zero-holding bound has the (higher) floor sigma_Z^2.

The aperiodic bounds come in two variants.  The default forms keep the full
window-entropy and weight terms; those factors are not per-sample quantities,
which makes cross-scheme rate comparisons meaningless.  ``normalized=True``
switches to dimensionally consistent per-sample Shannon-lower-bound forms,
which comparative sweeps should use.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import toeplitz

from . import analysis
from .channel import ArModel, Autocovariance, NoiseSpec, autocovariance
from .errors import DistortionBelowFloor, SingularSystem
from .predictor import PredictorCoefficients, ZhEstimator, mmse_coefficients, zh_estimator

TWO_PI_E = 2.0 * math.pi * math.e


class Scheme(enum.Enum):
    """Feedback schemes with a rate-distortion curve."""

    APERIODIC_PREDICTION = "aperiodic_prediction"
    APERIODIC_ZH = "aperiodic_zh"
    PERIODIC = "periodic"
    UNIFORM_APERIODIC = "uniform_aperiodic"
    PRACTICAL_AR1 = "practical_ar1"


class RdPoint(NamedTuple):
    distortion: float
    rate: float


@dataclass(frozen=True, eq=False)
class SchemeParams:
    """Model-derived quantities shared by all bound evaluations."""

    acov: Autocovariance
    noise: NoiseSpec
    coeffs: PredictorCoefficients
    zh: ZhEstimator
    sigma_nu_sq: float
    log_det_ky: float


@dataclass(eq=False)
class RdCurve:
    """Rate-distortion points for one scheme, ascending in distortion."""

    scheme: Scheme
    points: list[RdPoint]
    params: SchemeParams
    skipped: int = 0

    @property
    def distortions(self) -> np.ndarray:
        return np.array([p.distortion for p in self.points])

    @property
    def rates(self) -> np.ndarray:
        return np.array([p.rate for p in self.points])


def log_det_ky(acov: Autocovariance, noise: NoiseSpec, order: int) -> float:
    """log2 determinant of the order x order Toeplitz kappa_y matrix."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if acov.max_lag < order - 1:
        raise ValueError(f"autocovariance max_lag {acov.max_lag} < order-1")
    kappa_y = acov.lags[:order].copy()
    kappa_y[0] += noise.obs_noise_var
    sign, log_det = np.linalg.slogdet(toeplitz(kappa_y))
    if sign <= 0:
        raise SingularSystem("kappa_y Toeplitz matrix is not positive definite")
    return float(log_det / math.log(2.0))


def make_scheme_params(model: ArModel, noise: NoiseSpec, order: int | None = None) -> SchemeParams:
    """Bundle the derived quantities every bound needs for one model/noise pair."""
    if order is None:
        order = model.order
    acov = autocovariance(model, max(order, 1))
    coeffs = mmse_coefficients(acov, noise, order)
    return SchemeParams(
        acov=acov,
        noise=noise,
        coeffs=coeffs,
        zh=zh_estimator(acov, noise),
        sigma_nu_sq=nu_variance(model, noise),
        log_det_ky=log_det_ky(acov, noise, order),
    )


def _sum_log2_theta_sq(coeffs: PredictorCoefficients) -> float:
    theta_sq = coeffs.theta.astype(float) ** 2
    if np.any(theta_sq == 0.0):
        return -math.inf
    return float(np.sum(np.log2(theta_sq)))


def rate_aperiodic_prediction(
    d_x: float, p: SchemeParams, normalized: bool = False, clamp: bool = True
) -> float:
    """Lower bound on bits per sample for aperiodic feedback of predictions.

    Default form: log2|K_y| - 1/2 log2(D - sigma_P^2) + 1/2 sum_l log2 theta_l^2.
    Normalized form divides the entropy and weight terms by 2L.  ``clamp=False``
    returns the raw expression (useful for curve-shift comparisons; physical
    rates are non-negative).
    """
    floor = p.coeffs.sigma_p_sq
    if d_x <= floor:
        raise DistortionBelowFloor(f"D={d_x} <= sigma_P^2={floor}")
    order = p.coeffs.order
    log_weights = _sum_log2_theta_sq(p.coeffs)
    gap = -0.5 * math.log2(d_x - floor)
    if normalized:
        rate = (p.log_det_ky + log_weights) / (2.0 * order) + gap
    else:
        rate = p.log_det_ky + 0.5 * log_weights + gap
    return max(0.0, rate) if clamp else rate


def rate_aperiodic_zh(
    d_x: float, p: SchemeParams, normalized: bool = False, clamp: bool = True
) -> float:
    """Lower bound on bits per sample for aperiodic zero-holding feedback.

    Default form: 1/2 h(y) + 1/2 log2 alpha - 1/2 log2(2 pi e (D - sigma_Z^2))
    with h(y) = 1/2 log2(2 pi e sigma_y^2).  Normalized form is the scalar
    Gaussian bound 1/2 log2(alpha^2 sigma_y^2 / (D - sigma_Z^2)).
    """
    floor = p.zh.sigma_z_sq
    if d_x <= floor:
        raise DistortionBelowFloor(f"D={d_x} <= sigma_Z^2={floor}")
    sigma_y_sq = p.acov.sigma_x_sq + p.noise.obs_noise_var
    if normalized:
        rate = 0.5 * math.log2(p.zh.alpha**2 * sigma_y_sq / (d_x - floor))
    else:
        rate = (
            0.25 * math.log2(TWO_PI_E * sigma_y_sq)
            + 0.5 * math.log2(p.zh.alpha)
            - 0.5 * math.log2(TWO_PI_E * (d_x - floor))
        )
    return max(0.0, rate) if clamp else rate


def nu_variance(model: ArModel, noise: NoiseSpec) -> float:
    """Variance of the innovation driving the AR structure of the observation y.

    sigma_nu^2 = (sigma_x^2 sigma_xi^2 / (sigma_x^2 + sigma_xi^2)) * sum_m a_m^2
               + sigma_psi^2 + sigma_xi^2
    """
    sigma_x_sq = autocovariance(model, model.order).sigma_x_sq
    total = sigma_x_sq + noise.obs_noise_var
    filter_mse = sigma_x_sq * noise.obs_noise_var / total if total > 0 else 0.0
    sum_a_sq = sum(a * a for a in model.coeffs)
    return filter_mse * sum_a_sq + model.innovation_var + noise.obs_noise_var


def rate_periodic(d_x: float, p: SchemeParams, clamp: bool = True) -> float:
    """Lower bound on bits per sample for periodic innovation feedback."""
    floor = p.coeffs.sigma_p_sq
    if d_x <= floor:
        raise DistortionBelowFloor(f"D={d_x} <= sigma_P^2={floor}")
    rate = 0.5 * math.log2(p.sigma_nu_sq / (d_x - floor)) + 0.5 * _sum_log2_theta_sq(p.coeffs)
    return max(0.0, rate) if clamp else rate


def rate_uniform_aperiodic(
    mse_target: float, sigma_x_sq: float, sigma_p_sq: float, clamp: bool = True
) -> float:
    """High-resolution uniform-quantizer rate for aperiodic prediction feedback."""
    if mse_target <= sigma_p_sq:
        raise DistortionBelowFloor(f"target {mse_target} <= sigma_P^2={sigma_p_sq}")
    scale = math.sqrt(TWO_PI_E * (sigma_x_sq + sigma_p_sq)) / 12.0
    rate = 0.5 * math.log2(scale / (mse_target - sigma_p_sq))
    return max(0.0, rate) if clamp else rate


def _practical_context(p: SchemeParams) -> tuple[analysis.Ar1Approx, float]:
    approx = analysis.ar1_fit(p.acov)
    ar1 = ArModel(coeffs=(approx.beta,), innovation_var=approx.iota_var)
    lam = analysis.converged_gain(ar1, p.noise, sigma_q_sq=0.0)
    return approx, lam


def distortion_floor(scheme: Scheme, p: SchemeParams) -> float:
    """Distortion below which the scheme's rate is undefined (diverges)."""
    if scheme is Scheme.APERIODIC_ZH:
        return p.zh.sigma_z_sq
    if scheme is Scheme.PRACTICAL_AR1:
        approx, lam = _practical_context(p)
        return analysis.steady_state(approx, p.noise, lam, 0.0).varsigma_inf
    return p.coeffs.sigma_p_sq


def default_distortion_grid(scheme: Scheme, p: SchemeParams) -> tuple[float, float]:
    """Log-grid endpoints: just above the scheme floor up to 10 sigma_x^2."""
    floor = distortion_floor(scheme, p)
    return floor * (1.0 + 1e-3), 10.0 * p.acov.sigma_x_sq


def sweep(
    scheme: Scheme,
    params: SchemeParams,
    d_min: float,
    d_max: float,
    n_points: int,
    normalized: bool = False,
) -> RdCurve:
    """Evaluate a scheme's rate on a log-spaced distortion grid.

    Grid points at or below the scheme's floor are skipped and counted in the
    curve's ``skipped`` field rather than aborting the sweep.
    """
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    if not 0 < d_min < d_max:
        raise ValueError("need 0 < d_min < d_max")

    if scheme is Scheme.PRACTICAL_AR1:
        approx, lam = _practical_context(params)

    def evaluate(d: float) -> float:
        if scheme is Scheme.APERIODIC_PREDICTION:
            return rate_aperiodic_prediction(d, params, normalized)
        if scheme is Scheme.APERIODIC_ZH:
            return rate_aperiodic_zh(d, params, normalized)
        if scheme is Scheme.PERIODIC:
            return rate_periodic(d, params)
        if scheme is Scheme.UNIFORM_APERIODIC:
            return rate_uniform_aperiodic(d, params.acov.sigma_x_sq, params.coeffs.sigma_p_sq)
        return analysis.rate_practical(d, approx, params.noise, lam)

    points: list[RdPoint] = []
    skipped = 0
    for d in np.geomspace(d_min, d_max, n_points):
        try:
            points.append(RdPoint(float(d), evaluate(float(d))))
        except DistortionBelowFloor:
            skipped += 1
    return RdCurve(scheme=scheme, points=points, params=params, skipped=skipped)
