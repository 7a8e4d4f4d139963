import numpy as np
import pytest

from uav_isac.config import (
    ConfigError,
    build_config,
    load_config,
    parse_level,
    sweepable_parameters,
)


def _write(tmp_path, text):
    p = tmp_path / "cfg.yaml"
    p.write_text(text)
    return p


def test_empty_config_is_table1(tmp_path):
    cfg = load_config(_write(tmp_path, ""))
    assert (cfg.n_tx, cfg.n_ue, cfg.n_symbols) == (3, 20, 64)
    assert cfg.gamma == 1.0 and cfg.gamma_db == 0.0
    assert cfg.arrays.m_u == 256 and cfg.arrays.m_ub == 256 and cfg.arrays.m_bs == 256
    assert cfg.p_uav_w() == pytest.approx(1.0) and cfg.p_bs_w() == pytest.approx(1.0)
    assert cfg.pooled_w() == pytest.approx(4.0)
    assert cfg.d_min == 5.0
    assert cfg.swarm.swarm_size == 30


def test_fixed_positions_from_area():
    cfg = build_config({})
    np.testing.assert_array_equal(cfg.fixed_positions()[0], [250, 250, 125])
    np.testing.assert_array_equal(cfg.fixed_positions()[1], [250, 125, 125])
    np.testing.assert_array_equal(cfg.layout(0).target, [250, 375, 0])


def test_power_forms():
    a = build_config({"power": {"p_uav": 30, "p_bs": "30 dBm"}})
    assert a.p_uav_w() == pytest.approx(1.0) and a.p_bs_w() == pytest.approx(1.0)
    b = build_config({"power": {"total": "40 dBm"}})
    assert b.p_uav_w() == pytest.approx(2.5) and b.pooled_w() == pytest.approx(10.0)
    assert parse_level("-5 dB", "dB") == -5.0
    with pytest.raises(ValueError):
        parse_level("five", "dB")


def test_validation_errors():
    with pytest.raises(ConfigError) as info:
        build_config({"area": {"z_min": 300.0}, "network": {"n_tx": 0}})
    assert len(info.value.problems) >= 2
    with pytest.raises(ConfigError):
        build_config({"network": {"n_antennas": 4}})
    with pytest.raises(ConfigError):
        build_config({"profile": "huge"})
    with pytest.raises(ConfigError):
        build_config({"qos": {"gamma": "loud"}})


def test_yaml_error_has_location(tmp_path):
    with pytest.raises(ConfigError) as info:
        load_config(_write(tmp_path, "qos:\n  gamma: [0\n"))
    assert "line" in str(info.value)


def test_with_value_and_unknown_parameter():
    cfg = build_config({"profile": "desk"})
    bigger = cfg.with_value("area.length", 800.0)
    assert bigger.tree["area"]["dx"] == bigger.tree["area"]["dy"] == 800.0
    assert cfg.tree["area"]["dx"] == 500.0
    assert cfg.with_value("network.n_ue", 2).n_ue == 2
    with pytest.raises(ConfigError):
        cfg.with_value("network.bogus", 1)
    with pytest.raises(ConfigError):
        cfg.with_value("network", 1)
    assert "qos.gamma" in sweepable_parameters()


def test_ue_drops_nested_and_seeded():
    a = build_config({"profile": "desk", "network": {"n_ue": 2}}).ue_positions(4)
    b = build_config({"profile": "desk", "network": {"n_ue": 8}}).ue_positions(4)
    np.testing.assert_array_equal(a, b[:2])
    assert np.all((b[:, :2] >= 0) & (b[:, :2] <= 500))


def test_seeds_forms():
    assert build_config({"seeds": 3}).seeds == [0, 1, 2]
    assert build_config({"seeds": [7, 9]}).seeds == [7, 9]
    with pytest.raises(ConfigError):
        build_config({"seeds": 0})
