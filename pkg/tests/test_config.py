import json

import pytest

from omc_channel_sim.channel import GeometryKind
from omc_channel_sim.config import (
    THREADS_ENV_VAR,
    ScenarioConfig,
    ScenarioPreset,
    merge_settings,
    preset_scenario,
    worker_count,
)
from omc_channel_sim.exceptions import ConfigError


class TestPresets:
    def test_bounded_preset(self):
        scenario = preset_scenario(ScenarioPreset.table1_bounded)
        assert scenario.channel.geometry is GeometryKind.bounded_square
        assert scenario.receiver.tau_rise == 0.23 and scenario.receiver.tau_decay == 30.0
        assert scenario.channel.released_amount == 0.32
        assert scenario.receiver_position.x == pytest.approx(1.10)

    def test_unbounded_preset(self):
        scenario = preset_scenario(ScenarioPreset.table1_unbounded)
        assert scenario.channel.geometry is GeometryKind.unbounded
        assert scenario.receiver.tau_rise == 0.05 and scenario.receiver.tau_decay == 45.0

    def test_user_keys_override_preset(self):
        scenario = ScenarioConfig.load_from_dict(
            {"defaults": "table1_unbounded", "channel": {"flow_speed": 2.5}, "seed": 17}
        )
        assert scenario.channel.flow_speed == 2.5
        assert scenario.channel.geometry is GeometryKind.unbounded
        assert scenario.seed == 17

    def test_unknown_preset(self):
        with pytest.raises(ConfigError) as info:
            ScenarioConfig.load_from_dict({"defaults": "wind_tunnel"})
        assert info.value.field_path == "defaults"


class TestValidation:
    @pytest.mark.parametrize(
        "document, field_path",
        [
            ({"channel": {"flow_speed": -1.0}}, "channel.flow_speed"),
            ({"channel": {"bogus": 1}}, "channel.bogus"),
            ({"receiver": {"tau_rise": 0.0}}, "receiver.tau_rise"),
            ({"seed": -3}, "seed"),
        ],
    )
    def test_field_paths(self, document, field_path):
        with pytest.raises(ConfigError) as info:
            ScenarioConfig.load_from_dict(document)
        assert info.value.field_path == field_path
        assert info.value.exit_code == 2
        assert str(info.value).startswith(field_path)

    def test_coarse_grid(self):
        with pytest.raises(ConfigError):
            ScenarioConfig.load_from_dict({"grid": {"dt": 2.0}, "schedule": {"pulse_duration": 1.0}})

    def test_schedule_needs_period(self):
        with pytest.raises(ConfigError):
            ScenarioConfig.load_from_dict({"schedule": {"count": 3}})

    def test_regular_schedule(self):
        scenario = ScenarioConfig.load_from_dict({"schedule": {"count": 3, "symbol_period": 30.0}})
        schedule = scenario.build_schedule()
        assert schedule.pulse_starts == [0.0, 30.0, 60.0]
        assert scenario.build_grid(schedule).t_end == pytest.approx(60.0 + 30.0 + 5 * 30.0)


class TestFiles:
    def test_save_and_load(self, tmp_path):
        scenario = ScenarioConfig.load_from_dict(
            {"defaults": "table1_unbounded", "schedule": {"count": 2, "symbol_period": 10.0}, "seed": 99}
        )
        path = tmp_path / "scenario.json"
        scenario.save(str(path))
        assert ScenarioConfig.load_from_file(str(path)) == scenario

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"channel": {"flow_speed": 5.0,}}')
        with pytest.raises(ConfigError) as info:
            ScenarioConfig.load_from_file(str(path))
        assert info.value.exit_code == 2

    def test_document_must_be_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text(json.dumps([1, 2]))
        with pytest.raises(ConfigError):
            ScenarioConfig.load_from_file(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            ScenarioConfig.load_from_file(str(tmp_path / "absent.json"))

    def test_with_updates_revalidates(self):
        scenario = ScenarioConfig()
        assert scenario.with_updates(seed=5).seed == 5
        with pytest.raises(ConfigError):
            scenario.with_updates(seed=-1)


def test_merge_does_not_mutate_inputs():
    base = {"channel": {"flow_speed": 5.0, "half_width": 0.125}, "seed": 1}
    override = {"channel": {"flow_speed": 2.0}}
    merged = merge_settings(base, override)
    assert merged == {"channel": {"flow_speed": 2.0, "half_width": 0.125}, "seed": 1}
    assert base["channel"]["flow_speed"] == 5.0
    merged["channel"]["half_width"] = 1.0
    assert base["channel"]["half_width"] == 0.125


def test_worker_count(monkeypatch):
    monkeypatch.setenv(THREADS_ENV_VAR, "3")
    assert worker_count() == 3
    assert worker_count(5) == 5
    monkeypatch.setenv(THREADS_ENV_VAR, "many")
    assert worker_count() >= 1
    monkeypatch.delenv(THREADS_ENV_VAR)
    assert worker_count() >= 1
