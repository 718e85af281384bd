import numpy as np
import pytest

from hurstbench import (
    CaptureFormatError,
    CaptureRecord,
    FgnModel,
    GeneratorSpec,
    ScanPlan,
    TimeSeries,
    convergence_profile,
    disaggregate_phases,
    estimate_whittle,
    generate_fgn,
    ingest_capture_csv,
    sliding_scan,
)
from hurstbench.traces import bin_capture, parse_capture_rows


def write_capture(path, rows, header=None):
    lines = [] if header is None else [header]
    lines.extend(f"{t},{b}" for t, b in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


class TestIngest:
    def test_single_bin_sums_bytes(self, tmp_path):
        path = write_capture(
            tmp_path / "c.csv", [(0.001, 100), (0.002, 200), (0.003, 50)]
        )
        series = ingest_capture_csv(path, bin_width=0.01)
        assert np.array_equal(series.values, [350.0])
        assert series.origin == 0.001
        assert series.step == 0.01

    def test_empty_middle_bin(self, tmp_path):
        path = write_capture(tmp_path / "c.csv", [(0.0, 100), (0.025, 60)])
        series = ingest_capture_csv(path, bin_width=0.01)
        assert np.array_equal(series.values, [100.0, 0.0, 60.0])

    def test_header_tolerated(self, tmp_path):
        path = write_capture(
            tmp_path / "c.csv", [(0.0, 10), (0.001, 20)], header="timestamp,frame_bytes"
        )
        series = ingest_capture_csv(path, bin_width=0.01)
        assert series.values.sum() == 30.0

    def test_conservation_on_large_fixture(self, tmp_path, rng):
        timestamps = np.sort(rng.uniform(0.0, 3600.0, size=100_000))
        sizes = rng.integers(64, 1519, size=100_000)
        path = write_capture(tmp_path / "big.csv", list(zip(timestamps, sizes)))
        series = ingest_capture_csv(path, bin_width=0.5)
        assert series.values.sum() == float(sizes.sum())

    def test_packet_count_mode(self, tmp_path):
        path = write_capture(tmp_path / "c.csv", [(0.0, 100), (0.001, 900)])
        series = ingest_capture_csv(path, bin_width=0.01, count_packets=True)
        assert np.array_equal(series.values, [2.0])

    def test_unsorted_rows_are_sorted(self, tmp_path):
        path = write_capture(tmp_path / "c.csv", [(0.025, 60), (0.0, 100)])
        series = ingest_capture_csv(path, bin_width=0.01)
        assert np.array_equal(series.values, [100.0, 0.0, 60.0])

    def test_malformed_row_reports_line_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.0,100\n0.001,many\n")
        with pytest.raises(CaptureFormatError) as info:
            ingest_capture_csv(path)
        assert info.value.line_number == 2

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(CaptureFormatError):
            ingest_capture_csv(path)

    def test_bad_bin_width(self, tmp_path):
        path = write_capture(tmp_path / "c.csv", [(0.0, 10)])
        with pytest.raises(ValueError):
            ingest_capture_csv(path, bin_width=0.0)

    def test_record_validation(self):
        with pytest.raises(ValueError):
            CaptureRecord(0.0, 0)
        with pytest.raises(ValueError):
            CaptureRecord(float("nan"), 10)

    def test_parse_rows_header_only_is_empty(self):
        assert parse_capture_rows(["timestamp,frame_bytes"]) == []

    def test_bin_requires_records(self):
        with pytest.raises(ValueError):
            bin_capture([])


class TestSlidingScan:
    def test_point_count_formula(self, fgn_series):
        series = TimeSeries(fgn_series(0.7, 1024, 1).values[:1000])
        points = sliding_scan(series, ScanPlan(window=256, stride=128, estimator="rs"))
        assert len(points) == 6
        assert [p.t_index for p in points] == [0, 128, 256, 384, 512, 640]

    def test_too_short(self, fgn_series):
        series = TimeSeries(fgn_series(0.7, 128, 1).values[:100])
        with pytest.raises(ValueError):
            sliding_scan(series, ScanPlan(window=256, stride=128))

    def test_stride_spacing_even_with_gaps(self, fgn_series):
        # A constant stretch makes Whittle fail inside it; failed windows
        # stay in the output as gaps so spacing is preserved.
        noise = fgn_series(0.7, 512, 2).values
        values = np.concatenate([noise, np.zeros(512), noise])
        points = sliding_scan(
            TimeSeries(values), ScanPlan(window=256, stride=128, estimator="whittle")
        )
        spacing = np.diff([p.t_index for p in points])
        assert np.all(spacing == 128)
        assert any(p.h_e is None for p in points)
        assert any(p.h_e is not None for p in points)

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            ScanPlan(window=256, stride=0)
        with pytest.raises(ValueError):
            ScanPlan(window=256, stride=256)
        with pytest.raises(ValueError):
            ScanPlan(window=256, stride=128, estimator="dfa")

    def test_detects_h_change(self, fgn_series):
        low = fgn_series(0.6, 2**11, 3).values
        high = fgn_series(0.9, 2**11, 4).values
        points = sliding_scan(
            TimeSeries(np.concatenate([low, high])),
            ScanPlan(window=256, stride=128, estimator="whittle"),
        )
        half = len(low)
        first = [p.h_e for p in points if p.t_index + 256 <= half and p.h_e]
        second = [p.h_e for p in points if p.t_index >= half and p.h_e]
        assert np.mean(second) - np.mean(first) > 0.15


class TestPhases:
    def test_m1_identity(self, fgn_series):
        series = fgn_series(0.7, 64, 5)
        phases = disaggregate_phases(series, 1)
        assert phases.m == 1
        assert np.array_equal(phases.phases[0], series.values)

    def test_interleaving_example(self):
        phases = disaggregate_phases(np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]), 2)
        assert np.array_equal(phases.phases[0], [1.0, 3.0, 5.0])
        assert np.array_equal(phases.phases[1], [2.0, 4.0, 6.0])

    @pytest.mark.parametrize("length,m", [(12, 3), (13, 3), (64, 16), (100, 7)])
    def test_round_trip(self, rng, length, m):
        values = rng.normal(size=length)
        phases = disaggregate_phases(values, m)
        assert np.array_equal(phases.interleave(), values)
        lengths = [p.size for p in phases.phases]
        assert max(lengths) - min(lengths) <= 1

    def test_size_errors(self):
        with pytest.raises(ValueError):
            disaggregate_phases(np.arange(12.0), 4)
        with pytest.raises(ValueError):
            disaggregate_phases(np.arange(12.0), 0)


class TestConvergenceProfile:
    def test_m1_equals_direct_estimate(self, fgn_series):
        series = fgn_series(0.8, 2**12, 6)
        rows = convergence_profile(series, "whittle", [1])
        direct = estimate_whittle(series).h_hat
        assert rows[0].m == 1
        assert rows[0].phases == 1
        assert rows[0].mean_h == pytest.approx(direct, abs=1e-12)
        assert rows[0].spread == 0.0

    def test_inadmissible_m(self, fgn_series):
        series = TimeSeries(fgn_series(0.8, 64, 6).values[:12])
        with pytest.raises(ValueError):
            convergence_profile(series, "rs", [4])

    def test_self_similar_means_agree(self):
        # Phase subsampling of fGn stays fGn-like: Whittle means across
        # m in {1, 2, 4, 8} agree within 0.05, averaged over 50 seeds.
        m_values = [1, 2, 4, 8]
        spreads = []
        for seed in range(50):
            series = generate_fgn(GeneratorSpec(FgnModel(0.8), 2**14, 90_000 + seed))
            rows = convergence_profile(series, "whittle", m_values)
            means = [row.mean_h for row in rows]
            spreads.append(max(means) - min(means))
        assert np.mean(spreads) < 0.05


class TestStationarityDiagnostic:
    def test_window_spread_matches_monte_carlo_sigma(self):
        # On stationary fGn the windowed estimates should spread no wider
        # than twice the Monte-Carlo sigma of the estimator at that length.
        window = 2**10
        reference = [
            estimate_whittle(
                generate_fgn(GeneratorSpec(FgnModel(0.8), window, 95_000 + seed))
            ).h_hat
            for seed in range(100)
        ]
        sigma_mc = np.std(reference, ddof=1)
        series = generate_fgn(GeneratorSpec(FgnModel(0.8), 2**16, 4242))
        points = sliding_scan(
            series, ScanPlan(window=window, stride=window // 2, estimator="whittle")
        )
        estimates = [p.h_e for p in points if p.h_e is not None]
        assert len(estimates) == len(points)
        assert np.std(estimates, ddof=1) <= 2.0 * sigma_mc
