import numpy as np
import pytest

from omc_channel_sim.exceptions import AlignmentError, DomainError, UndefinedCorrelationError
from omc_channel_sim.metrics import (
    NRMSE_NORMALIZER,
    ValidationReport,
    build_report,
    nrmse,
    peak_error,
    pearson,
    qq_against_normal,
    qq_slope,
    residual_histogram,
    residuals,
    thin_qq_points,
)
from omc_channel_sim.receiver import add_noise
from omc_channel_sim.traces import VoltageTrace

DT = 0.01


def sine_trace(n: int = 10_001, offset: float = 3.0, amplitude: float = 1.5) -> VoltageTrace:
    times = np.arange(n) * DT
    return VoltageTrace(
        t0=0.0, dt=DT, samples=offset + amplitude * np.sin(2 * np.pi * times / 10.0), circuit_voltage=5.0
    )


class TestPearson:
    def test_identical_and_negated(self):
        trace = sine_trace(500)
        assert pearson(trace, trace) == pytest.approx(1.0)
        assert pearson(trace.samples, -trace.samples) == pytest.approx(-1.0)

    def test_affine_invariance(self):
        a = sine_trace(500).samples
        b = a + np.random.default_rng(1).normal(scale=0.2, size=a.size)
        assert pearson(3.0 * a + 1.0, b) == pytest.approx(pearson(a, b), abs=1e-12)

    def test_flat_trace_is_undefined(self):
        with pytest.raises(UndefinedCorrelationError):
            pearson(np.ones(10), np.arange(10.0))

    def test_single_sample_rejected(self):
        with pytest.raises(DomainError):
            pearson(np.ones(1), np.ones(1))

    def test_length_mismatch(self):
        with pytest.raises(AlignmentError):
            pearson(np.arange(5.0), np.arange(6.0))


class TestNrmse:
    def test_identical_is_zero(self):
        trace = sine_trace(500)
        assert nrmse(trace, trace) == 0.0

    def test_constant_offset(self):
        ref = sine_trace(1001).samples
        spread = np.ptp(ref)
        assert nrmse(ref + 0.03, ref) == pytest.approx(0.03 / spread)

    def test_shift_and_scale_invariance(self):
        rng = np.random.default_rng(2)
        ref = sine_trace(1001).samples
        model = ref + rng.normal(scale=0.05, size=ref.size)
        assert nrmse(2.0 * model + 7.0, 2.0 * ref + 7.0) == pytest.approx(nrmse(model, ref), rel=1e-12)

    def test_flat_reference_rejected(self):
        with pytest.raises(DomainError):
            nrmse(np.arange(5.0), np.ones(5))


class TestPeakError:
    def test_identical_is_zero(self):
        assert peak_error(sine_trace(500), sine_trace(500)) == 0.0

    def test_scaled_peak(self):
        ref = sine_trace(1001).samples
        assert peak_error(1.1 * ref, ref) == pytest.approx(0.1)

    def test_timing_is_ignored(self):
        ref = sine_trace(1001).samples
        assert peak_error(np.roll(ref, 37), ref) == 0.0

    def test_invalid_reference(self):
        with pytest.raises(DomainError):
            peak_error(np.ones(3), np.zeros(3))
        with pytest.raises(DomainError):
            peak_error(np.array([]), np.ones(3))


class TestResiduals:
    def test_antisymmetric(self):
        a = sine_trace(200)
        b = a.with_samples(a.samples * 0.9)
        np.testing.assert_allclose(residuals(a, b).samples, -residuals(b, a).samples)

    def test_keeps_grid(self):
        a = sine_trace(200)
        difference = residuals(a, a.with_samples(np.zeros(200)))
        assert isinstance(difference, VoltageTrace) and difference.same_grid(a)

    def test_grid_mismatch(self):
        a = sine_trace(200)
        shifted = VoltageTrace(t0=1.0, dt=DT, samples=a.samples, circuit_voltage=5.0)
        with pytest.raises(AlignmentError):
            residuals(a, shifted)

    def test_noise_statistics(self):
        rng = np.random.default_rng(4)
        model = np.full(10_000, 2.5)
        exp = model + rng.normal(scale=0.02, size=model.size)
        difference = residuals(exp, model)
        assert np.std(difference, ddof=1) == pytest.approx(0.02, rel=0.05)
        assert abs(np.mean(difference)) <= 3 * 0.02 / np.sqrt(model.size)


class TestQQ:
    def test_normal_sample(self):
        sample = np.random.default_rng(5).normal(scale=0.3, size=5000)
        qq = qq_against_normal(sample)
        assert qq.points.shape == (5000, 2)
        assert qq.ks_p > 0.01
        assert qq.std == pytest.approx(0.3, rel=0.05)
        assert qq_slope(qq) == pytest.approx(1.0, abs=0.05)

    def test_uniform_sample_is_rejected(self):
        sample = np.random.default_rng(6).uniform(-1.0, 1.0, size=10_000)
        assert qq_against_normal(sample).ks_p < 0.01

    def test_outlier_keeps_points_sorted(self):
        sample = np.zeros(50)
        sample[10] = 10.0
        qq = qq_against_normal(sample)
        assert np.all(np.diff(qq.empirical) >= 0)
        assert np.all(np.diff(qq.theoretical) > 0)

    def test_plotting_positions(self):
        qq = qq_against_normal(np.random.default_rng(7).normal(size=20))
        assert qq.theoretical[0] == pytest.approx(-1.959964, abs=1e-5)
        assert qq.theoretical[-1] == pytest.approx(1.959964, abs=1e-5)

    def test_too_few_samples(self):
        with pytest.raises(DomainError):
            qq_against_normal(np.arange(19.0))

    def test_zero_variance(self):
        with pytest.raises(DomainError):
            qq_against_normal(np.ones(100))

    def test_histogram_counts_every_residual(self):
        sample = np.random.default_rng(8).normal(size=1234)
        counts, edges = residual_histogram(sample, bins=25)
        assert counts.sum() == 1234
        assert edges.size == 26


class TestReport:
    def test_report_fields(self):
        model = sine_trace()
        exp = add_noise(model, 0.01, seed=12)
        report = build_report(exp, model, alignment_lag=-0.02)
        assert report.nrmse_normalizer == NRMSE_NORMALIZER == "range"
        assert report.alignment_lag == -0.02
        assert report.n_samples == len(model)
        assert report.ks_p is not None
        assert len(report.qq_points) == 200

    def test_noise_floor(self):
        model = sine_trace()
        exp = add_noise(model, 0.01, seed=13)
        report = build_report(exp, model)
        rms = np.sqrt(np.mean(model.samples**2))
        assert report.pearson_r > 0.99
        assert report.nrmse == pytest.approx(0.01 * rms / np.ptp(model.samples), rel=0.1)
        assert report.peak_error < 0.05

    def test_identical_traces(self):
        model = sine_trace(500)
        report = build_report(model, model)
        assert report.nrmse == 0.0 and report.peak_error == 0.0
        assert report.pearson_r == pytest.approx(1.0)
        assert report.ks_p is None and report.qq_points == []

    def test_save_and_load(self, tmp_path):
        model = sine_trace(500)
        report = build_report(add_noise(model, 0.01, seed=1), model)
        path = tmp_path / "report.json"
        report.save(str(path))
        assert ValidationReport.load_from_file(str(path)) == report

    def test_thinning_keeps_ends(self):
        points = np.column_stack([np.arange(1000.0), np.arange(1000.0)])
        thinned = thin_qq_points(points, limit=10)
        assert len(thinned) == 10
        assert thinned[0] == (0.0, 0.0) and thinned[-1] == (999.0, 999.0)
