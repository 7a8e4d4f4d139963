import io

import numpy as np
import pytest

from uav_isac.cli import main
from uav_isac.config import build_config
from uav_isac.scenario import (
    CSV_COLUMNS,
    aggregate,
    emit_csv,
    read_csv,
    run_fixed,
    run_mobile,
    run_sweep,
    run_tethered,
)

DESK = {"profile": "desk", "power": {"total": "40 dBm"}, "qos": {"gamma": "0 dB"},
        "swarm": {"swarm_size": 8, "max_iter": 5}, "bcd": {"max_rounds": 1}}


def _cfg(**overrides):
    tree = {k: (dict(v) if isinstance(v, dict) else v) for k, v in DESK.items()}
    for key, val in overrides.items():
        tree[key] = dict(tree.get(key, {}), **val)
    return build_config(tree)


def _drop_wall(row):
    return {k: v for k, v in row.items() if k != "wall_ms"}


def _csv_lines(path):
    # every column but the trailing wall time, compared as raw text
    return [line.rsplit(",", 1)[0] for line in path.read_text().splitlines()]


def test_fixed_positions_pinned():
    cfg = _cfg()
    res = run_fixed(cfg, 0)
    np.testing.assert_array_equal(res.positions, cfg.fixed_positions())
    assert np.isfinite(res.gamma_t)
    if res.feasible:
        assert res.report.feasible


def test_fixed_gamma_t_ignores_bs_budget():
    lo = run_fixed(_cfg(power={"total": None, "p_uav": "34 dBm", "p_bs": "30 dBm"}), 1)
    hi = run_fixed(_cfg(power={"total": None, "p_uav": "34 dBm", "p_bs": "50 dBm"}), 1)
    assert hi.gamma_t == pytest.approx(lo.gamma_t, rel=1e-9)


def test_tethered_pooled_power():
    cfg = _cfg()
    res = run_tethered(cfg, 2)
    assert res.feasible
    assert res.report.power_used_w <= cfg.pooled_w() * (1 + 1e-6)
    assert res.report.backhaul_sinr.size == 0


def test_tethered_monotone_in_power():
    vals = [run_tethered(_cfg(power={"total": p}), 3).gamma_t for p in ("36 dBm", "40 dBm", "44 dBm")]
    assert vals[0] <= vals[1] <= vals[2]


def test_mobile_without_moves_equals_fixed():
    cfg = _cfg()
    fixed = run_fixed(cfg, 4)
    mob = run_mobile(cfg, 4, optimize_positions_flag=False)
    assert mob.gamma_t == pytest.approx(fixed.gamma_t, rel=1e-6)
    np.testing.assert_array_equal(mob.positions, fixed.positions)
    np.testing.assert_array_equal(mob.solution.W, fixed.solution.W)
    # outer_rounds counts placement rounds in mobile mode and backhaul rounds otherwise
    skip = {"mode", "outer_rounds", "wall_ms"}
    a, b = mob.row(), fixed.row()
    assert all(a[k] == b[k] or (np.isnan(a[k]) and np.isnan(b[k])) for k in a if k not in skip)


def test_mobile_rounds_monotone_and_positions_valid():
    cfg = _cfg()
    res = run_mobile(cfg, 5)
    trace = res.traces["bcd"]
    assert all(b >= a for a, b in zip(trace, trace[1:]))
    assert trace[0] == pytest.approx(run_fixed(cfg, 5).gamma_t, rel=1e-6)
    lay = cfg.layout(5)
    assert np.all(res.positions >= lay.r_min) and np.all(res.positions <= lay.r_max)
    assert lay.with_uavs(res.positions).min_uav_separation() >= cfg.d_min


def test_single_point_sweep_reproduces_run():
    cfg = _cfg()
    sweep = run_sweep(cfg, "qos.gamma", ["0 dB"], ["fixed", "tethered"], seeds=[6])
    direct = [run_fixed(cfg, 6).row("qos.gamma", "0 dB"), run_tethered(cfg, 6).row("qos.gamma", "0 dB")]
    assert [_drop_wall(r) for r in sweep.rows] == [_drop_wall(r) for r in direct]


def test_sweep_rejects_unknown_parameter():
    with pytest.raises(Exception):
        run_sweep(_cfg(), "network.bogus", [1], ["fixed"], seeds=[0])
    with pytest.raises(ValueError):
        run_sweep(_cfg(), "qos.gamma", [0], ["hovering"], seeds=[0])


def test_aggregate_recomputable():
    rows = run_sweep(_cfg(), "network.n_ue", [2], ["tethered"], seeds=[0, 1, 2]).rows
    agg = aggregate(rows)[0]
    g = [r["gamma_t_linear"] for r in rows if r["feasible"]]
    assert agg["n"] == 3 and agg["n_feasible"] == len(g)
    assert agg["median_gamma_t"] == pytest.approx(np.median(g), rel=1e-12)
    assert agg["mean_gamma_t"] == pytest.approx(np.mean(g), rel=1e-12)


def test_csv_round_trip_and_header(tmp_path):
    rows = run_sweep(_cfg(), "qos.gamma", [0, 5], ["fixed"], seeds=[0]).rows
    path = tmp_path / "out.csv"
    emit_csv(rows, path)
    back = read_csv(path)
    assert len(back) == len(rows)
    for a, b in zip(rows, back):
        for col in CSV_COLUMNS:
            if isinstance(a[col], float) and np.isnan(a[col]):
                assert np.isnan(b[col])
            else:
                assert a[col] == b[col]
    assert path.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)


def test_empty_csv_is_header_only():
    buf = io.StringIO()
    emit_csv([], buf)
    assert buf.getvalue() == ",".join(CSV_COLUMNS) + "\n"


def test_cli_run_and_sweep_deterministic(tmp_path, capsys):
    cfg = tmp_path / "desk.yaml"
    cfg.write_text("profile: desk\npower: {total: 40 dBm}\nseeds: 2\n")
    outs = []
    for i in range(2):
        out = tmp_path / f"sweep{i}.csv"
        assert main(["sweep", "--config", str(cfg), "--param", "qos.gamma", "--values=-5,0",
                     "--modes", "fixed,tethered", "--out", str(out)]) == 0
        outs.append(_csv_lines(out))
    assert outs[0] == outs[1] and len(outs[0]) == 9
    code = main(["run", "--config", str(cfg), "--mode", "tethered", "--seed", "1"])
    assert code == 0
    assert capsys.readouterr().out.splitlines()[-2] == ",".join(CSV_COLUMNS)


def test_cli_reports_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("network: {n_tx: 0}\n")
    assert main(["run", "--config", str(cfg), "--mode", "fixed", "--seed", "0"]) == 2
    assert "n_tx" in capsys.readouterr().err
