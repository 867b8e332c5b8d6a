import numpy as np
import pytest
from pydantic import ValidationError

from omc_channel_sim.channel import ChannelDiagnostics, ChannelParams, PulseShape, SpacePoint
from omc_channel_sim.exceptions import DomainError, SingularPointError
from omc_channel_sim.receiver import baseline_voltage
from omc_channel_sim.sequence import (
    SimulationGrid,
    TransmissionSchedule,
    baseline_drift_fraction,
    end_to_end,
    inter_pulse_minima,
    run_symbol_period,
    run_symbol_period_sweep,
    simulate_chain,
    superpose,
)
from omc_channel_sim.traces import ConcentrationTrace, ConcentrationUnit, VoltageTrace

# Keeps the plateau static voltage well below the supply in both geometries.
UNSATURATED_AMOUNT = 0.0016


class TestSchedule:
    def test_regular_schedule(self):
        schedule = TransmissionSchedule.regular(5, 30.0)
        assert schedule.pulse_starts == [0.0, 30.0, 60.0, 90.0, 120.0]
        assert schedule.count == 5 and schedule.last_start == 120.0
        assert schedule.pulse.duration == 1.0

    def test_starts_must_increase(self):
        with pytest.raises(ValidationError):
            TransmissionSchedule(pulse_starts=[0.0, 10.0, 10.0])

    def test_starts_must_be_non_negative(self):
        with pytest.raises(ValidationError):
            TransmissionSchedule(pulse_starts=[-1.0])

    def test_shift_and_merge(self):
        merged = TransmissionSchedule(pulse_starts=[0.0]).merged(TransmissionSchedule(pulse_starts=[0.0]).shifted(5.0))
        assert merged.pulse_starts == [0.0, 5.0]

    def test_symbol_period_must_match_starts(self):
        with pytest.raises(ValidationError):
            TransmissionSchedule(pulse_starts=[0.0, 5.0], symbol_period=100.0)
        with pytest.raises(ValidationError):
            TransmissionSchedule(pulse_starts=[0.0, 30.0, 61.0], symbol_period=30.0)

    def test_regular_starts_may_be_offset(self):
        schedule = TransmissionSchedule(pulse_starts=[2.0, 12.0, 22.0], symbol_period=10.0)
        assert schedule.count == 3

    def test_shift_keeps_symbol_period(self):
        shifted = TransmissionSchedule.regular(3, 10.0).shifted(4.0)
        assert shifted.pulse_starts == [4.0, 14.0, 24.0]
        assert shifted.symbol_period == 10.0
        with pytest.raises(ValidationError):
            TransmissionSchedule.regular(2, 10.0).shifted(-1.0)


class TestGrid:
    def test_default_grid(self, receiver):
        grid = SimulationGrid.default_for(TransmissionSchedule.regular(5, 30.0), receiver)
        assert grid.t_end == pytest.approx(300.0)
        assert grid.n_samples == 30001
        assert grid.times[-1] == pytest.approx(300.0)

    def test_one_shot_grid(self, receiver):
        grid = SimulationGrid.default_for(TransmissionSchedule(), receiver)
        assert grid.t_end == pytest.approx(151.0)

    def test_coarse_grid_rejected(self):
        with pytest.raises(DomainError):
            SimulationGrid(t_end=10.0, dt=0.2).check_against(TransmissionSchedule())

    def test_grid_must_pass_last_start(self):
        with pytest.raises(DomainError):
            SimulationGrid(t_end=5.0).check_against(TransmissionSchedule(pulse_starts=[0.0, 10.0]))


class TestSuperposition:
    def test_bounded_plateau_timing(self, bounded_params, receiver_point):
        trace = superpose(bounded_params, receiver_point, TransmissionSchedule(), SimulationGrid(t_end=3.0))
        assert trace.unit is ConcentrationUnit.mol_per_m3
        onset = int(np.nonzero(trace.samples > 0)[0][0])
        assert abs(trace.times[onset] - 0.22) <= 0.01 + 1e-9
        assert np.max(trace.samples) == pytest.approx(1.028, abs=1e-3)

    def test_superposition_is_additive(self, unbounded_params, receiver_point):
        grid = SimulationGrid(t_end=10.0)
        first = TransmissionSchedule(pulse_starts=[0.0])
        second = TransmissionSchedule(pulse_starts=[3.0])
        both = superpose(unbounded_params, receiver_point, first.merged(second), grid)
        separate = (
            superpose(unbounded_params, receiver_point, first, grid).samples
            + superpose(unbounded_params, receiver_point, second, grid).samples
        )
        np.testing.assert_allclose(both.samples, separate, rtol=1e-12, atol=1e-15)

    def test_linear_in_released_amount(self, bounded_params, receiver_point):
        grid = SimulationGrid(t_end=3.0)
        single = superpose(bounded_params, receiver_point, TransmissionSchedule(), grid)
        double = superpose(bounded_params.with_amount(0.64), receiver_point, TransmissionSchedule(), grid)
        np.testing.assert_allclose(double.samples, 2 * single.samples, rtol=1e-12)

    def test_diagnostics_are_collected(self, unbounded_params, receiver_point):
        diagnostics = ChannelDiagnostics()
        superpose(unbounded_params, receiver_point, TransmissionSchedule(), SimulationGrid(t_end=2.0), diagnostics)
        assert diagnostics.clamped_negatives == 0

    @pytest.mark.parametrize("params_fixture", ["bounded_params", "unbounded_params"])
    def test_shift_invariance(self, request, params_fixture, receiver_point):
        params = request.getfixturevalue(params_fixture)
        grid = SimulationGrid(t_end=4.0)
        original = superpose(params, receiver_point, TransmissionSchedule(), grid).samples
        delayed = superpose(params, receiver_point, TransmissionSchedule().shifted(1.0), grid).samples
        np.testing.assert_allclose(delayed[100:], original[:-100], rtol=0.0, atol=1e-9)
        assert np.all(delayed[:100] == 0.0)

    def test_zero_diffusivity_duct_is_singular(self):
        params = ChannelParams(diffusivity=0.0)
        with pytest.raises(SingularPointError):
            superpose(params, SpacePoint(x=0.5), TransmissionSchedule.regular(1, 10.0), SimulationGrid(t_end=3.0))

    def test_traces_reject_non_finite_samples(self):
        with pytest.raises(DomainError):
            ConcentrationTrace(t0=0.0, dt=0.01, samples=np.array([0.0, np.inf]))
        with pytest.raises(DomainError):
            VoltageTrace(t0=0.0, dt=0.01, samples=np.array([2.6, np.nan]), circuit_voltage=5.0)


class TestChain:
    def test_seeded_chain_is_deterministic(self, bounded_params, receiver, receiver_point):
        schedule = TransmissionSchedule()
        grid = SimulationGrid(t_end=20.0)
        first = end_to_end(bounded_params, receiver, receiver_point, schedule, grid, seed=11)
        second = end_to_end(bounded_params, receiver, receiver_point, schedule, grid, seed=11)
        np.testing.assert_array_equal(first.samples, second.samples)

    def test_chain_stages(self, bounded_params, receiver, receiver_point):
        result = simulate_chain(
            bounded_params, receiver, receiver_point, TransmissionSchedule(), SimulationGrid(t_end=20.0), noisy=False
        )
        assert result.noisy_voltage is None
        assert result.output is result.clean_voltage
        assert result.concentration.unit is ConcentrationUnit.mg_per_L
        assert np.max(result.concentration.samples) == pytest.approx(47.4, abs=0.1)
        assert result.clean_voltage.samples[0] == pytest.approx(baseline_voltage(receiver))
        assert np.max(result.clean_voltage.samples) > 4.9


class TestIntersymbolInterference:
    def test_minima_need_symbol_period(self, receiver):
        voltage = VoltageTrace(t0=0.0, dt=0.01, samples=np.ones(100), circuit_voltage=5.0)
        with pytest.raises(DomainError):
            inter_pulse_minima(voltage, TransmissionSchedule(), 0.22)

    def test_drift_fraction(self):
        assert baseline_drift_fraction(np.array([2.0, 2.2, 2.1]), 2.0) == pytest.approx(0.1)

    def test_long_period_returns_to_baseline(self, bounded_params, receiver, receiver_point, one_second_pulse):
        point = run_symbol_period(bounded_params, receiver, receiver_point, one_second_pulse, 300.0, seed=0)
        assert point.drift_fraction < 0.01
        assert len(point.minima) == 5

    def test_short_period_builds_up(self, bounded_params, receiver, receiver_point, one_second_pulse):
        point = run_symbol_period(bounded_params, receiver, receiver_point, one_second_pulse, 10.0, seed=0)
        assert np.all(np.diff(point.minima) > 0)
        assert point.drift_fraction > 0.1

    @pytest.mark.parametrize("symbol_period", [30.0, 10.0])
    def test_unbounded_drifts_less_below_saturation(
        self, bounded_params, unbounded_params, receiver, receiver_point, one_second_pulse, symbol_period
    ):
        bounded = run_symbol_period(
            bounded_params.with_amount(UNSATURATED_AMOUNT), receiver, receiver_point, one_second_pulse, symbol_period
        )
        unbounded = run_symbol_period(
            unbounded_params.with_amount(UNSATURATED_AMOUNT), receiver, receiver_point, one_second_pulse, symbol_period
        )
        assert unbounded.drift_fraction < bounded.drift_fraction

    def test_saturated_sensor_hides_geometry(
        self, bounded_params, unbounded_params, receiver, receiver_point, one_second_pulse
    ):
        bounded = run_symbol_period(bounded_params, receiver, receiver_point, one_second_pulse, 30.0)
        unbounded = run_symbol_period(unbounded_params, receiver, receiver_point, one_second_pulse, 30.0)
        assert unbounded.drift_fraction == pytest.approx(bounded.drift_fraction, rel=0.02)

    def test_sweep_keeps_period_order(self, bounded_params, receiver, receiver_point):
        periods = [30.0, 10.0]
        points = run_symbol_period_sweep(
            bounded_params, receiver, receiver_point, PulseShape(), periods=periods, count=3, seed=5, max_workers=2
        )
        assert [point.symbol_period for point in points] == periods
        assert all(point.result.noisy_voltage is not None for point in points)

    def test_sweep_is_deterministic(self, bounded_params, receiver, receiver_point):
        kwargs = dict(periods=[10.0, 30.0], count=2, seed=9)
        first = run_symbol_period_sweep(bounded_params, receiver, receiver_point, PulseShape(), max_workers=1, **kwargs)
        second = run_symbol_period_sweep(bounded_params, receiver, receiver_point, PulseShape(), max_workers=2, **kwargs)
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.result.noisy_voltage.samples, b.result.noisy_voltage.samples)

    def test_sweep_rejects_non_positive_periods(self, bounded_params, receiver, receiver_point):
        with pytest.raises(DomainError):
            run_symbol_period_sweep(bounded_params, receiver, receiver_point, PulseShape(), periods=[0.0])
