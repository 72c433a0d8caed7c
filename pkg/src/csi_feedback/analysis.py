"""Steady-state performance analysis of the closed-loop innovation codec.

Covers the long-term MSE recursion, its AR(1) approximation (beta, sigma_iota^2,
varsigma_inf), the innovation variance entering the high-resolution rate
formula, and the practical rate R_u at a target long-term MSE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .channel import ArModel, Autocovariance, NoiseSpec, autocovariance
from .errors import (
    ContractionViolated,
    DegenerateCovariance,
    DistortionBelowFloor,
    NonConvergence,
    QuadratureFailure,
)

TWO_PI_E = 2.0 * math.pi * math.e

GAIN_TOL = 1e-10


@dataclass(frozen=True)
class Ar1Approx:
    """First-order fit of the channel: beta = kappa(1)/kappa(0), drive sigma_iota^2."""

    beta: float
    iota_var: float


@dataclass(frozen=True)
class SteadyState:
    """Converged long-term MSE of the closed-loop codec and its inputs."""

    varsigma_inf: float
    lambda_ss: float
    quant_noise_var: float


def ar1_fit(acov: Autocovariance) -> Ar1Approx:
    """MMSE AR(1) approximation of the channel from its autocovariance."""
    kappa0 = acov.sigma_x_sq
    if kappa0 <= 0:
        raise DegenerateCovariance("kappa_x(0) must be positive")
    if acov.max_lag < 1:
        raise ValueError("need kappa_x up to lag 1")
    kappa1 = float(acov.lags[1])
    beta = kappa1 / kappa0
    return Ar1Approx(beta=beta, iota_var=kappa0 - kappa1 * kappa1 / kappa0)


def mse_recursion(
    model: ArModel,
    noise: NoiseSpec,
    lam: float,
    sigma_q_sq: float,
    steps: int,
) -> np.ndarray:
    """Iterate the long-term reconstruction-MSE recursion at a fixed gain.

    varsigma_k = (1-lam)^2 sum_m a_m^2 varsigma_{k-m}
               + (1-lam)^2 sigma_psi^2 + lam^2 sigma_xi^2 + sigma_Q^2

    starting from varsigma_0 = sigma_x^2.  Returns the trajectory up to and
    including the first value within 1e-10 relative of its predecessor; raises
    NonConvergence if that never happens within ``steps`` iterations.
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError("lam must lie in (0, 1]")
    sigma_x_sq = autocovariance(model, model.order).sigma_x_sq
    shrink = (1.0 - lam) ** 2
    constant = shrink * model.innovation_var + lam * lam * noise.obs_noise_var + sigma_q_sq
    coeff_sq = [a * a for a in model.coeffs]

    ring = [sigma_x_sq] * model.order  # most recent first
    trajectory = [sigma_x_sq]
    for _ in range(steps):
        previous = trajectory[-1]
        value = shrink * sum(c * v for c, v in zip(coeff_sq, ring)) + constant
        trajectory.append(value)
        ring.insert(0, value)
        ring.pop()
        if abs(value - previous) < 1e-10 * max(abs(previous), 1e-12):
            return np.asarray(trajectory)
    raise NonConvergence(f"MSE recursion not converged after {steps} steps")


def steady_state(approx: Ar1Approx, noise: NoiseSpec, lam: float, sigma_q_sq: float) -> SteadyState:
    """Closed-form long-term MSE of the AR(1)-approximated codec."""
    if not 0.0 < lam <= 1.0:
        raise ValueError("lam must lie in (0, 1]")
    contraction = (1.0 - lam) ** 2 * approx.beta**2
    if contraction >= 1.0:
        raise ContractionViolated(f"(1-lam)^2 beta^2 = {contraction} >= 1")
    numerator = (
        (1.0 - lam) ** 2 * approx.iota_var
        + lam * lam * noise.obs_noise_var
        + sigma_q_sq
    )
    return SteadyState(
        varsigma_inf=numerator / (1.0 - contraction),
        lambda_ss=lam,
        quant_noise_var=sigma_q_sq,
    )


def _spectral_variance(approx: Ar1Approx, rel_tol: float = 1e-8) -> float:
    """(1/2pi) integral of sigma_iota^2 / |1 - beta e^{j w}|^2 over [-pi, pi]."""
    beta = approx.beta
    if not 0.0 < beta < 1.0:
        raise ValueError("spectral variance needs beta in (0, 1)")

    def spectrum(omega: float) -> float:
        return approx.iota_var / (1.0 - 2.0 * beta * math.cos(omega) + beta * beta)

    value, abserr = quad(spectrum, -math.pi, math.pi, epsabs=0.0, epsrel=1e-12, limit=200)
    if value <= 0 or abserr > rel_tol * value:
        raise QuadratureFailure(f"spectral integral error {abserr} above tolerance")
    return value / (2.0 * math.pi)


def _ep_variance_from_approx(approx: Ar1Approx, noise: NoiseSpec) -> float:
    kappa0 = _spectral_variance(approx)
    kappa1 = approx.beta * kappa0
    return kappa0 - kappa1 * kappa1 / (kappa0 + noise.obs_noise_var)


def ep_variance(acov: Autocovariance, noise: NoiseSpec) -> float:
    """Variance of the one-step prediction error under the AR(1) approximation.

    kappa_tilde(0) is evaluated by numerical quadrature of the AR(1) spectrum
    (the closed form sigma_iota^2 / (1 - beta^2) serves as the independent
    cross-check in the tests), and the scalar Wiener error is
    kappa_tilde(0) - kappa_tilde(1)^2 / (kappa_tilde(0) + sigma_xi^2).
    """
    return _ep_variance_from_approx(ar1_fit(acov), noise)


def rate_practical(
    varsigma_target: float,
    approx: Ar1Approx,
    noise: NoiseSpec,
    lam: float,
    clamp: bool = True,
) -> float:
    """Bits per sample for the closed-loop codec at a target long-term MSE.

    Inverts the steady-state closed form to get the quantisation-noise budget
    implied by the target, then applies the high-resolution uniform-quantizer
    rate for a Gaussian innovation.  Clamped at zero.
    """
    contraction = (1.0 - lam) ** 2 * approx.beta**2
    implied_q = (
        (1.0 - contraction) * varsigma_target
        - (1.0 - lam) ** 2 * approx.iota_var
        - lam * lam * noise.obs_noise_var
    )
    if implied_q <= 0:
        raise DistortionBelowFloor(
            f"target {varsigma_target} leaves no quantisation budget (implied {implied_q})"
        )
    innovation_var = _ep_variance_from_approx(approx, noise)
    rate = (
        0.5 * math.log2(1.0 / 12.0)
        + 0.5 * math.log2(math.sqrt(TWO_PI_E * innovation_var))
        - 0.5 * math.log2(implied_q)
    )
    return max(0.0, rate) if clamp else rate


def converged_prediction_state(
    model: ArModel,
    noise: NoiseSpec,
    sigma_q_sq: float = 0.0,
    max_iter: int = 1_000_000,
) -> tuple[float, float]:
    """Fixed point (gain, prediction-error variance) of the codec recursion.

    Iterates the gain update and the per-lag error propagation used by the
    encoder until the gain settles to 1e-10.  The filtered variance is bounded
    by sigma_xi^2, so the iteration converges for every stationary model.
    """
    sigma_x_sq = autocovariance(model, model.order).sigma_x_sq
    coeff_sq = [a * a for a in model.coeffs]
    sigma_xi_sq = noise.obs_noise_var

    filtered = [sigma_x_sq] * model.order  # most recent first
    pred_var = sigma_x_sq
    gain = 1.0 if sigma_xi_sq == 0.0 else pred_var / (pred_var + sigma_xi_sq)
    for _ in range(max_iter):
        filtered.insert(0, (1.0 - gain) * pred_var)
        filtered.pop()
        pred_var = (
            sum(c * (f + sigma_q_sq) for c, f in zip(coeff_sq, filtered))
            + model.innovation_var
        )
        new_gain = 1.0 if sigma_xi_sq == 0.0 else pred_var / (pred_var + sigma_xi_sq)
        settled = abs(new_gain - gain) < GAIN_TOL
        gain = new_gain
        if settled:
            return gain, pred_var
    raise NonConvergence(f"gain iteration not settled after {max_iter} steps")


def converged_gain(model: ArModel, noise: NoiseSpec, sigma_q_sq: float = 0.0) -> float:
    """Converged codec gain for a model, noise level and quantiser noise."""
    gain, _ = converged_prediction_state(model, noise, sigma_q_sq)
    return gain
