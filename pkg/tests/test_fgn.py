import numpy as np
import pytest
from scipy.integrate import quad

from hurstbench import (
    AutocovarianceCurve,
    EstimationError,
    FgnModel,
    TimeSeries,
    acf_tail_fit,
    aggregate_blocks,
    empirical_autocovariance,
    fgn_autocovariance,
    fgn_spectral_density,
    fgn_spectral_model,
)


class TestFgnModel:
    @pytest.mark.parametrize("h", [0.0, 1.0, -0.3, 1.7])
    def test_rejects_bad_hurst(self, h):
        with pytest.raises(ValueError):
            FgnModel(h)

    @pytest.mark.parametrize("sigma2", [0.0, -1.0])
    def test_rejects_bad_variance(self, sigma2):
        with pytest.raises(ValueError):
            FgnModel(0.7, sigma2)


class TestTimeSeries:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            TimeSeries(np.array([1.0, np.nan]))
        with pytest.raises(ValueError):
            TimeSeries(np.array([np.inf]))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            TimeSeries(np.array([]))


class TestAutocovariance:
    def test_white_noise_lag3_is_zero(self):
        assert fgn_autocovariance(FgnModel(0.5), 3) == 0.0

    def test_white_noise_all_lags_exactly_zero(self):
        rho = fgn_autocovariance(FgnModel(0.5), np.arange(1, 101))
        assert np.all(rho == 0.0)

    def test_lag_zero_is_variance(self):
        assert fgn_autocovariance(FgnModel(0.7, 2.5), 0) == 2.5
        assert fgn_autocovariance(FgnModel(0.9), 0) == 1.0

    def test_h09_lag1_against_arbitrary_precision_value(self):
        # 0.5 * (2^1.8 - 2): evaluated independently to 20 digits.
        assert fgn_autocovariance(FgnModel(0.9), 1) == pytest.approx(
            0.74110112659224824, abs=1e-5
        )

    def test_negative_lag_rejected(self):
        with pytest.raises(ValueError):
            fgn_autocovariance(FgnModel(0.7), -1)

    @pytest.mark.parametrize("h", [0.6, 0.75, 0.9])
    def test_positive_and_strictly_decreasing_for_persistent_h(self, h):
        rho = fgn_autocovariance(FgnModel(h), np.arange(1, 10_001))
        assert np.all(rho > 0.0)
        assert np.all(np.diff(rho) < 0.0)

    def test_partial_sums_diverge_for_h09(self):
        rho = fgn_autocovariance(FgnModel(0.9), np.arange(1, 100_001))
        sum_short = rho[:1000].sum()
        sum_long = rho.sum()
        assert sum_long > 1.10 * sum_short


class TestSpectralDensity:
    def test_white_noise_is_flat(self):
        model = FgnModel(0.5)
        for lam in (0.01, 0.3, 1.0, 2.0, np.pi):
            assert fgn_spectral_density(model, lam) == pytest.approx(
                1.0 / (2.0 * np.pi), abs=1e-6
            )

    def test_integral_recovers_variance_h07(self):
        model = FgnModel(0.7)
        value, _ = quad(lambda x: fgn_spectral_density(model, x), 0, np.pi, limit=400)
        assert 2.0 * value == pytest.approx(1.0, abs=1e-3)

    @pytest.mark.parametrize("h", [0.55, 0.7, 0.9])
    def test_integral_recovers_variance_within_point1_percent(self, h):
        model = FgnModel(h)
        value, _ = quad(lambda x: fgn_spectral_density(model, x), 0, np.pi, limit=400)
        assert abs(2.0 * value - 1.0) < 1e-3

    def test_lrd_divergence_toward_origin(self):
        model = FgnModel(0.8)
        values = [fgn_spectral_density(model, lam) for lam in (0.5, 0.25, 0.125)]
        assert values[0] < values[1] < values[2]

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            fgn_spectral_density(FgnModel(0.7), 0.0)
        with pytest.raises(ValueError):
            fgn_spectral_density(FgnModel(0.7), np.pi + 0.01)
        with pytest.raises(ValueError):
            fgn_spectral_density(FgnModel(0.7), 1.0, truncation=0)

    def test_spectral_model_invariants(self):
        freqs = np.linspace(0.1, np.pi, 32)
        model = fgn_spectral_model(FgnModel(0.8), freqs)
        assert np.all(model.density > 0.0)
        assert model.truncation == 200


class TestAggregateBlocks:
    def test_identity_for_unit_block(self):
        out = aggregate_blocks([1.0, 2.0, 3.0, 4.0], 1)
        assert np.array_equal(out.values, [1.0, 2.0, 3.0, 4.0])

    def test_block_means(self):
        out = aggregate_blocks([1.0, 2.0, 3.0, 4.0], 2)
        assert np.array_equal(out.values, [1.5, 3.5])

    def test_trailing_remainder_dropped(self):
        out = aggregate_blocks([1.0, 2.0, 3.0, 4.0, 5.0], 2)
        assert np.array_equal(out.values, [1.5, 3.5])

    def test_oversized_block_rejected(self):
        with pytest.raises(ValueError):
            aggregate_blocks([1.0, 2.0], 3)

    def test_two_stage_aggregation_composes(self, fgn_series):
        series = fgn_series(0.8, 2**10, 5)
        m1, m2 = 4, 8
        twice = aggregate_blocks(aggregate_blocks(series, m1), m2)
        once = aggregate_blocks(series, m1 * m2)
        np.testing.assert_allclose(twice.values, once.values, atol=1e-12)

    def test_variance_law_monte_carlo(self, fgn_series):
        # Var[mean of m samples] / Var[series] tracks m^(2H-2); 50 seeds here,
        # the 200-seed version is acceptance criterion 6.
        h, n, m = 0.8, 2**14, 4
        ratios = []
        for seed in range(50):
            series = fgn_series(h, n, 9000 + seed)
            ratios.append(
                np.var(aggregate_blocks(series, m).values) / np.var(series.values)
            )
        expected = m ** (2 * h - 2)
        assert np.mean(ratios) == pytest.approx(expected, rel=0.15)

    def test_time_base_propagates(self):
        series = TimeSeries(np.arange(8.0), origin=10.0, step=0.5)
        out = aggregate_blocks(series, 4)
        assert out.origin == 10.0
        assert out.step == 2.0


class TestEmpiricalAutocovariance:
    def test_constant_series_is_all_zero(self):
        curve = empirical_autocovariance(np.full(32, 3.3), 5)
        assert np.array_equal(curve.values, np.zeros(6))

    def test_lag_zero_is_biased_sample_variance(self, rng):
        x = rng.normal(size=100)
        curve = empirical_autocovariance(x, 0)
        assert curve.values[0] == pytest.approx(np.var(x), abs=1e-14)

    def test_matches_double_loop_oracle(self, rng):
        # O(N^2) reference implementation, straight from the definition.
        for n in (17, 64, 256):
            x = rng.normal(size=n)
            mean = x.mean()
            max_lag = min(n - 1, 20)
            curve = empirical_autocovariance(x, max_lag)
            for k in range(max_lag + 1):
                expected = 0.0
                for t in range(n - k):
                    expected += (x[t] - mean) * (x[t + k] - mean)
                expected /= n
                assert abs(curve.values[k] - expected) < 1e-12

    def test_max_lag_bounds(self):
        with pytest.raises(ValueError):
            empirical_autocovariance(np.arange(8.0), 8)
        with pytest.raises(ValueError):
            empirical_autocovariance(np.arange(8.0), -1)


class TestAcfTailFit:
    def test_h075_recovers_beta_half(self):
        lags = np.arange(0, 201)
        curve = AutocovarianceCurve(
            lags=lags, values=fgn_autocovariance(FgnModel(0.75), lags)
        )
        beta, c = acf_tail_fit(curve, k_min=10)
        assert beta == pytest.approx(0.5, abs=0.02)
        assert c > 0.0

    def test_white_noise_has_no_tail(self):
        lags = np.arange(0, 201)
        curve = AutocovarianceCurve(
            lags=lags, values=fgn_autocovariance(FgnModel(0.5), lags)
        )
        with pytest.raises(EstimationError):
            acf_tail_fit(curve, k_min=10)

    def test_h09_constant_positive(self):
        lags = np.arange(0, 201)
        curve = AutocovarianceCurve(
            lags=lags, values=fgn_autocovariance(FgnModel(0.9), lags)
        )
        beta, c = acf_tail_fit(curve, k_min=10)
        assert c > 0.0
        assert beta == pytest.approx(0.2, abs=0.02)

    def test_too_few_points(self):
        lags = np.arange(0, 13)
        curve = AutocovarianceCurve(
            lags=lags, values=fgn_autocovariance(FgnModel(0.8), lags)
        )
        with pytest.raises(ValueError):
            acf_tail_fit(curve, k_min=10)
