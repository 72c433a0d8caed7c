"""Channel model: stationarity checks, Yule-Walker autocovariance, traces."""

import numpy as np
import pytest

from csi_feedback import (
    ArModel,
    NoiseSpec,
    autocovariance,
    cross_autocovariance,
    default_burn_in,
    generate_trace,
    obs_autocovariance,
    validate_stationarity,
)
from csi_feedback.errors import LagOutOfRange, NonStationaryModel

# closed forms for AR(1) a=0.9, sigma_psi^2=1: kappa0 = 1/(1-a^2), kappa1 = a*kappa0
AR1_KAPPA0 = 5.2631578947368421
AR1_KAPPA1 = 4.7368421052631579


def random_stationary_model(rng) -> ArModel:
    """Random model with sum |a_m| < 1, a sufficient stationarity condition."""
    order = int(rng.integers(1, 6))
    raw = rng.uniform(-1.0, 1.0, size=order)
    scale = rng.uniform(0.1, 0.95) / max(np.sum(np.abs(raw)), 1e-9)
    return ArModel(coeffs=tuple(raw * scale), innovation_var=float(rng.uniform(0.2, 3.0)))


class TestStationarity:
    def test_ar1_inside_unit_circle(self):
        assert validate_stationarity(ArModel((0.9,), 1.0))

    def test_unit_root_rejected(self):
        assert not validate_stationarity(ArModel((1.0,), 1.0))

    def test_reference_ar4(self, ar4):
        # sufficient condition sum |a_m| < 1 corroborates the root check
        assert sum(abs(a) for a in ar4.coeffs) < 1.0
        assert validate_stationarity(ar4)
        assert np.max(np.abs(ar4.characteristic_roots())) < 1.0 - 1e-9

    def test_explosive_rejected(self):
        assert not validate_stationarity(ArModel((1.2, -0.1), 1.0))


class TestAutocovariance:
    def test_ar1_closed_form(self, ar1):
        acov = autocovariance(ar1, 3)
        assert acov.lags[0] == pytest.approx(AR1_KAPPA0, rel=1e-12)
        assert acov.lags[1] == pytest.approx(AR1_KAPPA1, rel=1e-12)
        assert acov.lags[2] == pytest.approx(0.9 * AR1_KAPPA1, rel=1e-12)

    def test_white_noise_case(self):
        acov = autocovariance(ArModel((0.0, 0.0), 2.5), 4)
        assert acov.lags[0] == pytest.approx(2.5, rel=1e-12)
        assert np.allclose(acov.lags[1:], 0.0, atol=1e-15)

    def test_non_stationary_raises(self):
        with pytest.raises(NonStationaryModel):
            autocovariance(ArModel((1.0,), 1.0), 2)

    def test_max_lag_below_order_rejected(self, ar4):
        with pytest.raises(ValueError):
            autocovariance(ar4, 3)

    def test_yule_walker_consistency(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            model = random_stationary_model(rng)
            acov = autocovariance(model, model.order + 6)
            for tau in range(1, acov.max_lag + 1):
                predicted = sum(
                    model.coeffs[m - 1] * acov.lags[abs(tau - m)]
                    for m in range(1, model.order + 1)
                )
                assert abs(acov.lags[tau] - predicted) < 1e-9 * acov.lags[0]

    def test_toeplitz_positive_semidefinite(self):
        rng = np.random.default_rng(2)
        for _ in range(15):
            model = random_stationary_model(rng)
            acov = autocovariance(model, model.order + 5)
            from scipy.linalg import toeplitz

            eigenvalues = np.linalg.eigvalsh(toeplitz(acov.lags))
            assert eigenvalues.min() > -1e-9 * acov.lags[0]

    def test_bounded_by_lag_zero(self):
        rng = np.random.default_rng(3)
        for _ in range(15):
            model = random_stationary_model(rng)
            acov = autocovariance(model, model.order + 8)
            assert acov.lags[0] > 0
            assert np.all(np.abs(acov.lags) <= acov.lags[0] * (1 + 1e-12))

    def test_matches_sample_variance_10m(self, ar1_trace_10m):
        # closed-form kappa0 against the sample variance of a 1e7-step trace
        sample_var = float(np.var(ar1_trace_10m.x))
        assert abs(sample_var - AR1_KAPPA0) / AR1_KAPPA0 < 0.01

    def test_matches_sample_autocovariance_3se(self, ar4, ar4_acov, ar4_trace_1m):
        x = ar4_trace_1m.x
        n = x.size
        kappa = ar4_acov.lags
        # Bartlett-style standard error from the analytic sequence
        support = autocovariance(ar4, 200).lags
        for tau in range(5):
            shifted = np.concatenate([support[tau:], support[1 : 201 - tau][::-1]])
            var_hat = (np.sum(support**2) + np.sum(support[tau:] * support[: 201 - tau])) / n
            se = np.sqrt(var_hat)
            sample = float(np.mean((x[: n - tau]) * (x[tau:])))
            assert abs(sample - kappa[tau]) < 3 * se, f"lag {tau}"


class TestObsAutocovariance:
    def test_lag_zero_adds_noise_power(self, ar1_acov, noise):
        assert obs_autocovariance(ar1_acov, noise, 0) == pytest.approx(
            AR1_KAPPA0 + 1.0, rel=1e-12
        )

    def test_positive_lags_unchanged(self, ar1_acov, noise):
        for lag in range(1, ar1_acov.max_lag + 1):
            assert obs_autocovariance(ar1_acov, noise, lag) == ar1_acov.lags[lag]

    def test_noiseless_identity(self, ar1_acov):
        clean = NoiseSpec(0.0)
        for lag in range(ar1_acov.max_lag + 1):
            assert obs_autocovariance(ar1_acov, clean, lag) == ar1_acov.lags[lag]

    def test_cross_covariance_is_channel_covariance(self, ar1_acov):
        for lag in range(ar1_acov.max_lag + 1):
            assert cross_autocovariance(ar1_acov, lag) == ar1_acov.lags[lag]

    def test_lag_out_of_range(self, ar1_acov, noise):
        with pytest.raises(LagOutOfRange):
            obs_autocovariance(ar1_acov, noise, ar1_acov.max_lag + 1)
        with pytest.raises(LagOutOfRange):
            obs_autocovariance(ar1_acov, noise, -1)


class TestGenerateTrace:
    def test_deterministic_per_seed(self, ar4, noise):
        a = generate_trace(ar4, noise, 500, seed=11)
        b = generate_trace(ar4, noise, 500, seed=11)
        assert np.array_equal(a.x, b.x)
        assert np.array_equal(a.y, b.y)
        c = generate_trace(ar4, noise, 500, seed=12)
        assert not np.array_equal(a.x, c.x)

    def test_degenerate_drive(self):
        model = ArModel((0.9,), 0.0)
        trace = generate_trace(model, NoiseSpec(1.0), 1000, seed=0)
        assert np.all(trace.x == 0.0)
        residual = trace.y - trace.x
        assert abs(np.mean(residual)) < 0.15
        assert abs(np.var(residual) - 1.0) < 0.15

    def test_sample_lag1_ratio(self, ar1, noise):
        trace = generate_trace(ar1, noise, 1_000_000, seed=7, burn_in=1000)
        x = trace.x
        ratio = float(np.mean(x[1:] * x[:-1]) / np.var(x))
        assert 0.89 < ratio < 0.91

    def test_observation_noise_is_white(self, ar4_trace_1m, noise):
        residual = ar4_trace_1m.y - ar4_trace_1m.x
        n = residual.size
        assert abs(np.mean(residual)) < 3 / np.sqrt(n)
        assert abs(np.var(residual) - noise.obs_noise_var) < 3 * np.sqrt(2.0 / n)
        lag1 = np.corrcoef(residual[1:], residual[:-1])[0, 1]
        assert abs(lag1) < 3 / np.sqrt(n)

    def test_rejects_bad_inputs(self, ar4, noise):
        with pytest.raises(NonStationaryModel):
            generate_trace(ArModel((1.01,), 1.0), noise, 10, seed=0)
        with pytest.raises(ValueError):
            generate_trace(ar4, noise, 0, seed=0)

    def test_burn_in_default_capped(self):
        slow = ArModel((0.999999,), 1.0)
        assert default_burn_in(slow) == 10_000
        assert default_burn_in(ArModel((0.0,), 1.0)) == 10


class TestArModelValidation:
    def test_order_matches_coeffs(self, ar4):
        assert ar4.order == len(ar4.coeffs) == 4

    def test_rejects_empty_coeffs(self):
        with pytest.raises(ValueError):
            ArModel((), 1.0)

    def test_rejects_negative_variance(self):
        with pytest.raises(ValueError):
            ArModel((0.5,), -1.0)
        with pytest.raises(ValueError):
            NoiseSpec(-0.1)
