"""AR(L) fading-channel model: stationarity, exact autocovariance, seeded traces.

The channel state x follows an order-L autoregression driven by white Gaussian
noise, and the receiver only sees the noisy observation y = x + xi.  Everything
downstream (predictors, bounds, codecs) is parameterised by the model defined
here and by its exact autocovariance sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import LagOutOfRange, NonStationaryModel, SingularSystem

# A root of modulus 1 - 1e-9 is already uselessly slow to mix; treat it as
# non-stationary rather than letting burn-in estimates blow up.
STATIONARITY_MARGIN = 1e-9

MAX_BURN_IN = 10_000


@dataclass(frozen=True)
class ArModel:
    """Order-L autoregressive channel x_k = sum_m a_m x_{k-m} + psi_k.

    ``coeffs`` holds (a_1, ..., a_L) and ``innovation_var`` is the variance of
    the white Gaussian drive psi.  A zero innovation variance is allowed only
    as a degenerate test drive (the process is then identically zero).
    """

    coeffs: tuple[float, ...]
    innovation_var: float
    order: int = field(init=False)

    def __post_init__(self) -> None:
        coeffs = tuple(float(a) for a in self.coeffs)
        if len(coeffs) == 0:
            raise ValueError("ArModel needs at least one coefficient")
        if self.innovation_var < 0:
            raise ValueError("innovation_var must be non-negative")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "innovation_var", float(self.innovation_var))
        object.__setattr__(self, "order", len(coeffs))

    def characteristic_roots(self) -> np.ndarray:
        """Roots of z^L - a_1 z^{L-1} - ... - a_L."""
        return np.roots([1.0, *(-a for a in self.coeffs)])


@dataclass(frozen=True)
class NoiseSpec:
    """Additive white Gaussian observation noise with variance sigma_xi^2."""

    obs_noise_var: float

    def __post_init__(self) -> None:
        if self.obs_noise_var < 0:
            raise ValueError("obs_noise_var must be non-negative")
        object.__setattr__(self, "obs_noise_var", float(self.obs_noise_var))


@dataclass(frozen=True, eq=False)
class Autocovariance:
    """Exact channel autocovariance kappa_x(0..max_lag)."""

    lags: np.ndarray
    max_lag: int

    @property
    def sigma_x_sq(self) -> float:
        return float(self.lags[0])

    def __getitem__(self, tau: int) -> float:
        return float(self.lags[tau])


@dataclass(frozen=True, eq=False)
class ChannelTrace:
    """A seeded realisation of the channel and its noisy observation."""

    x: np.ndarray
    y: np.ndarray
    seed: int
    model: ArModel
    noise: NoiseSpec


def validate_stationarity(model: ArModel) -> bool:
    """True iff every characteristic root has modulus < 1 - 1e-9."""
    roots = model.characteristic_roots()
    if roots.size == 0:
        return True
    return bool(np.max(np.abs(roots)) < 1.0 - STATIONARITY_MARGIN)


def autocovariance(model: ArModel, max_lag: int) -> Autocovariance:
    """Solve the extended Yule-Walker system for kappa_x(0..max_lag).

    The solve is exact for AR processes: lags 0..L come from the linear system

        kappa(tau) - sum_m a_m kappa(|tau - m|) = sigma_psi^2 * [tau == 0]

    and higher lags follow the recursion kappa(tau) = sum_m a_m kappa(tau - m).

    Raises NonStationaryModel if the model fails the stationarity check and
    SingularSystem if the linear solve is numerically singular.
    """
    if not validate_stationarity(model):
        raise NonStationaryModel(f"characteristic roots not inside unit circle: {model.coeffs}")
    if max_lag < model.order:
        raise ValueError(f"max_lag ({max_lag}) must be >= model order ({model.order})")

    order = model.order
    a = model.coeffs
    system = np.eye(order + 1)
    for tau in range(order + 1):
        for m in range(1, order + 1):
            system[tau, abs(tau - m)] -= a[m - 1]
    rhs = np.zeros(order + 1)
    rhs[0] = model.innovation_var
    try:
        head = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("Yule-Walker system is singular") from exc

    lags = np.empty(max_lag + 1)
    lags[: order + 1] = head
    for tau in range(order + 1, max_lag + 1):
        lags[tau] = sum(a[m - 1] * lags[tau - m] for m in range(1, order + 1))
    return Autocovariance(lags=lags, max_lag=max_lag)


def obs_autocovariance(acov: Autocovariance, noise: NoiseSpec, lag: int) -> float:
    """kappa_y(lag): the channel autocovariance plus noise power at lag zero."""
    if lag < 0 or lag > acov.max_lag:
        raise LagOutOfRange(f"lag {lag} outside [0, {acov.max_lag}]")
    value = float(acov.lags[lag])
    if lag == 0:
        value += noise.obs_noise_var
    return value


def cross_autocovariance(acov: Autocovariance, lag: int) -> float:
    """kappa_xy(lag) = kappa_x(lag); the noise is independent of the channel."""
    if lag < 0 or lag > acov.max_lag:
        raise LagOutOfRange(f"lag {lag} outside [0, {acov.max_lag}]")
    return float(acov.lags[lag])


def default_burn_in(model: ArModel) -> int:
    """Burn-in long enough to wash out the zero initial state.

    10 * L / (1 - max |root|), capped at MAX_BURN_IN.
    """
    roots = model.characteristic_roots()
    rho = float(np.max(np.abs(roots))) if roots.size else 0.0
    estimate = 10.0 * model.order / max(1.0 - rho, 1e-6)
    return int(min(MAX_BURN_IN, max(model.order, math.ceil(estimate))))


def generate_trace(
    model: ArModel,
    noise: NoiseSpec,
    n: int,
    seed: int,
    burn_in: int | None = None,
) -> ChannelTrace:
    """Generate a seeded channel realisation with its noisy observation.

    The AR recursion starts from a zero state; the first ``burn_in`` samples
    are discarded so the retained trace is effectively stationary.  The output
    is a pure function of (model, noise, n, seed, burn_in).
    """
    if not validate_stationarity(model):
        raise NonStationaryModel(f"characteristic roots not inside unit circle: {model.coeffs}")
    if n <= 0:
        raise ValueError("n must be positive")
    if burn_in is None:
        burn_in = default_burn_in(model)

    rng = np.random.default_rng(seed)
    psi = rng.normal(0.0, math.sqrt(model.innovation_var), size=burn_in + n)
    denominator = np.concatenate(([1.0], -np.asarray(model.coeffs)))
    x = lfilter([1.0], denominator, psi)[burn_in:]
    xi = rng.normal(0.0, math.sqrt(noise.obs_noise_var), size=n)
    return ChannelTrace(x=x, y=x + xi, seed=seed, model=model, noise=noise)
