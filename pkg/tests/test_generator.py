import numpy as np
import pytest
from scipy import stats

from hurstbench import (
    FgnModel,
    GeneratorSpec,
    circulant_eigenvalues,
    empirical_autocovariance,
    fgn_autocovariance,
    generate_fgn,
)
from hurstbench.generator import embedding_size


class TestEmbeddingSize:
    @pytest.mark.parametrize(
        "n,expected", [(2, 4), (3, 8), (4, 8), (8, 16), (100, 256), (4096, 8192)]
    )
    def test_smallest_power_of_two(self, n, expected):
        assert embedding_size(n) == expected

    def test_too_short(self):
        with pytest.raises(ValueError):
            embedding_size(1)


class TestCirculantEigenvalues:
    def test_white_noise_row_is_delta(self):
        eigenvalues = circulant_eigenvalues(FgnModel(0.5), 8)
        assert eigenvalues.shape == (16,)
        assert np.max(np.abs(eigenvalues - 1.0)) < 1e-12

    def test_matches_direct_dft_sum_oracle(self):
        # O(L^2) evaluation of the DFT of the embedded covariance row.
        model = FgnModel(0.7)
        n = 8
        size = embedding_size(n)
        half = size // 2
        rho = fgn_autocovariance(model, np.arange(half + 1))
        row = np.concatenate([rho, rho[-2:0:-1]])
        direct = np.empty(size)
        for k in range(size):
            direct[k] = sum(
                row[j] * np.cos(2.0 * np.pi * j * k / size) for j in range(size)
            )
        fast = circulant_eigenvalues(model, n)
        np.testing.assert_allclose(fast, direct, atol=1e-9)

    def test_h09_large_embedding_nonnegative(self):
        assert circulant_eigenvalues(FgnModel(0.9), 2**12).min() >= 0.0

    @pytest.mark.parametrize("h", [0.5, 0.6, 0.7, 0.8, 0.9])
    @pytest.mark.parametrize("log2_n", range(6, 17))
    def test_validity_on_benchmark_grid(self, h, log2_n):
        assert circulant_eigenvalues(FgnModel(h), 1 << log2_n).min() >= 0.0


class TestGenerateFgn:
    def test_deterministic_for_fixed_seed(self):
        spec = GeneratorSpec(FgnModel(0.8), 4096, 42)
        first = generate_fgn(spec)
        second = generate_fgn(spec)
        assert np.array_equal(first.values, second.values)
        assert len(first) == 4096

    def test_seed_changes_output(self):
        a = generate_fgn(GeneratorSpec(FgnModel(0.8), 512, 1))
        b = generate_fgn(GeneratorSpec(FgnModel(0.8), 512, 2))
        assert not np.array_equal(a.values, b.values)

    def test_scale_equivariance(self):
        base = generate_fgn(GeneratorSpec(FgnModel(0.6, 1.0), 2048, 7))
        scaled = generate_fgn(GeneratorSpec(FgnModel(0.6, 4.0), 2048, 7))
        np.testing.assert_allclose(scaled.values, 2.0 * base.values, atol=1e-12)

    def test_monte_carlo_autocovariance_matches_theory(self):
        # 200 seeds at H=0.7, n=2^12: mean empirical autocovariance within
        # +-0.03 of the exact curve at lags 0..20.
        model = FgnModel(0.7)
        n = 2**12
        acc = np.zeros(21)
        seeds = 200
        for seed in range(seeds):
            series = generate_fgn(GeneratorSpec(model, n, 40_000 + seed))
            acc += empirical_autocovariance(series, 20).values
        mean_curve = acc / seeds
        expected = fgn_autocovariance(model, np.arange(21))
        assert np.max(np.abs(mean_curve - expected)) < 0.03

    def test_white_noise_sample_mean_bound(self):
        n = 2**14
        series = generate_fgn(GeneratorSpec(FgnModel(0.5), n, 3))
        assert abs(series.values.mean()) < 4.0 / np.sqrt(n)

    def test_pooled_moments_are_gaussian(self):
        # Moment check over 200 seeds at n=2^14.
        pooled = np.concatenate(
            [
                generate_fgn(GeneratorSpec(FgnModel(0.7), 2**14, 60_000 + seed)).values
                for seed in range(200)
            ]
        )
        assert abs(stats.skew(pooled)) < 0.05
        assert abs(stats.kurtosis(pooled)) < 0.1

    def test_rejects_bad_spec(self):
        with pytest.raises(ValueError):
            GeneratorSpec(FgnModel(0.8), 1, 0)
        with pytest.raises(ValueError):
            GeneratorSpec(FgnModel(0.8), 16, -1)
        with pytest.raises(ValueError):
            GeneratorSpec(FgnModel(0.8), 16, 2**64)
