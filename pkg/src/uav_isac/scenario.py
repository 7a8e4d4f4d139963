"""Deployment pipelines, parameter sweeps and CSV output.

``run_fixed`` and ``run_tethered`` optimize precoders at the configured UAV
positions; ``run_mobile`` alternates swarm placement and precoder design,
starting from the fixed positions and keeping a new placement only when the
optimized sensing SINR improves.
"""

from __future__ import annotations

import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cccp import InfeasibleInstanceError, optimize_precoders_mobile, optimize_precoders_tethered
from .channels import TAG_PSO, realize_channels, stream
from .config import MODES, ScenarioConfig
from .pso import PositionProblem, optimize_positions
from .sinr import check_feasibility, generate_symbols, linear_to_db, sensing_sinr

log = logging.getLogger(__name__)

CSV_COLUMNS = ("param", "value", "mode", "seed", "gamma_t_linear", "gamma_t_db", "min_ue_sinr_db",
               "min_backhaul_sinr_db", "power_used_w", "feasible", "outer_rounds", "cccp_iters", "pso_iters",
               "wall_ms")


@dataclass
class RunResult:
    """Outcome of one (mode, seed) pipeline run.

    ``gamma_t`` is reported even for infeasible drops when an access-side
    solution exists (only the backhaul QoS fails); it is ``nan`` otherwise.
    The sensing SINR does not depend on the backhaul block, so such a value
    is what the drop reaches once the BS budget suffices. ``outer_rounds``
    counts placement rounds in mobile mode and backhaul/receiver rounds in
    the other modes.
    """

    mode: str
    seed: int
    positions: np.ndarray
    solution: object
    report: object
    gamma_t: float
    feasible: bool
    outer_rounds: int = 0
    cccp_iters: int = 0
    pso_iters: int = 0
    wall_ms: float = 0.0
    traces: dict = field(default_factory=dict)
    error: str = ""

    def row(self, param: str = "", value="") -> dict:
        rep = self.report
        return {
            "param": param,
            "value": value,
            "mode": self.mode,
            "seed": int(self.seed),
            "gamma_t_linear": float(self.gamma_t),
            "gamma_t_db": float(linear_to_db(self.gamma_t)) if np.isfinite(self.gamma_t) else float("nan"),
            "min_ue_sinr_db": float(rep.min_ue_sinr_db) if rep is not None else float("nan"),
            "min_backhaul_sinr_db": float(rep.min_backhaul_sinr_db) if rep is not None else float("nan"),
            "power_used_w": float(rep.power_used_w) if rep is not None else float("nan"),
            "feasible": bool(self.feasible),
            "outer_rounds": int(self.outer_rounds),
            "cccp_iters": int(self.cccp_iters),
            "pso_iters": int(self.pso_iters),
            "wall_ms": float(self.wall_ms),
        }


def _precoder_stage(config: ScenarioConfig, seed: int, uavs: np.ndarray, symbols: np.ndarray, mode: str):
    layout = config.layout(seed).with_uavs(uavs)
    tethered = mode == "tethered"
    ch = realize_channels(layout, config.propagation, config.arrays, seed, with_backhaul=not tethered)
    gamma = config.gamma
    rcs = config.propagation.rcs_variance
    try:
        if tethered:
            sol, state = optimize_precoders_tethered(ch, symbols, gamma, config.pooled_w(), config.optimizer,
                                                     rcs_variance=rcs)
            rep = check_feasibility(ch, sol, gamma, pooled_power=config.pooled_w(), symbols=symbols,
                                    rcs_variance=rcs)
        else:
            sol, state = optimize_precoders_mobile(ch, symbols, gamma, config.p_uav_w(), config.p_bs_w(),
                                                   config.optimizer, rcs_variance=rcs)
            rep = check_feasibility(ch, sol, gamma, config.p_uav_w(), config.p_bs_w(), symbols=symbols,
                                    rcs_variance=rcs)
    except InfeasibleInstanceError as err:
        log.info("seed %d (%s): infeasible drop: %s", seed, mode, err)
        if err.partial is None:
            return RunResult(mode, seed, uavs, None, None, float("nan"), False, error=str(err))
        sol, state = err.partial
        rep = check_feasibility(ch, sol, gamma, config.p_uav_w(), symbols=symbols, rcs_variance=rcs)
        return RunResult(mode, seed, uavs, sol, rep, rep.sensing_sinr, False, cccp_iters=state.iterations,
                         traces={"cccp": state.records, "gamma_t": list(state.trace)}, error=str(err))
    return RunResult(mode, seed, uavs, sol, rep, rep.sensing_sinr, rep.feasible, outer_rounds=state.outer_rounds,
                     cccp_iters=state.iterations, traces={"cccp": state.records, "gamma_t": list(state.trace)})


def run_fixed(config: ScenarioConfig, seed: int) -> RunResult:
    """Wireless backhaul, UAVs pinned at the configured positions."""
    t0 = time.perf_counter()
    symbols = generate_symbols(seed, config.n_ue, config.n_symbols)
    res = _precoder_stage(config, seed, config.fixed_positions(), symbols, "fixed")
    res.wall_ms = 1e3 * (time.perf_counter() - t0)
    return res


def run_tethered(config: ScenarioConfig, seed: int) -> RunResult:
    """Wired backhaul and pooled power ``P_b + N_Tx P_k``, UAVs pinned."""
    t0 = time.perf_counter()
    symbols = generate_symbols(seed, config.n_ue, config.n_symbols)
    res = _precoder_stage(config, seed, config.fixed_positions(), symbols, "tethered")
    res.wall_ms = 1e3 * (time.perf_counter() - t0)
    return res


def _level(res: RunResult) -> int:
    if res.feasible:
        return 2
    return 1 if np.isfinite(res.gamma_t) else 0


def run_mobile(config: ScenarioConfig, seed: int, optimize_positions_flag: bool | None = None) -> RunResult:
    """Alternate swarm placement and precoder design.

    Round 0 is the fixed deployment. Each later round runs the swarm from the
    current positions (with its own stream of ``seed``) and re-optimizes the
    precoders there; the move is kept only if it raises the sensing SINR
    without losing feasibility (a fully feasible drop stays fully feasible,
    a drop short only on backhaul QoS keeps its UE QoS). The loop ends on a
    rejected move, a relative gain below ``bcd.tol`` or after
    ``bcd.max_rounds`` rounds.
    """
    t0 = time.perf_counter()
    bcd = config.tree["bcd"]
    move = bcd["optimize_positions"] if optimize_positions_flag is None else optimize_positions_flag
    symbols = generate_symbols(seed, config.n_ue, config.n_symbols)
    best = _precoder_stage(config, seed, config.fixed_positions(), symbols, "mobile")
    trace = [best.gamma_t]
    swarm_traces = []
    pso_iters = 0
    cccp_iters = best.cccp_iters
    rounds = 0
    if _level(best) > 0 and move:
        base = config.layout(seed)
        for rounds in range(1, int(bcd["max_rounds"]) + 1):
            problem = PositionProblem(base.with_uavs(best.positions), config.propagation, config.arrays, seed,
                                      symbols, config.gamma, config.p_uav_w(), config.d_min,
                                      config.optimizer.sensing_fraction, bcd["qos_penalty"],
                                      config.propagation.rcs_variance,
                                      config.p_bs_w() if bcd["backhaul_penalty"] else None)
            swarm = optimize_positions(problem, config.swarm, stream(seed, TAG_PSO, rounds))
            pso_iters += swarm.iterations
            swarm_traces.append(swarm.trace)
            if np.array_equal(swarm.best, best.positions):
                break
            cand = _precoder_stage(config, seed, swarm.best, symbols, "mobile")
            cccp_iters += cand.cccp_iters
            if not (_level(cand) >= _level(best) and cand.gamma_t > best.gamma_t):
                trace.append(best.gamma_t)
                break
            gain = (cand.gamma_t - best.gamma_t) / best.gamma_t
            best = cand
            trace.append(best.gamma_t)
            if gain < bcd["tol"]:
                break
    best.outer_rounds = rounds
    best.pso_iters = pso_iters
    best.cccp_iters = cccp_iters
    best.traces = dict(best.traces, bcd=trace, swarm=swarm_traces)
    best.wall_ms = 1e3 * (time.perf_counter() - t0)
    return best


RUNNERS = {"mobile": run_mobile, "fixed": run_fixed, "tethered": run_tethered}


def run_mode(config: ScenarioConfig, mode: str, seed: int) -> RunResult:
    if mode not in RUNNERS:
        raise ValueError(f"mode must be one of {', '.join(MODES)}")
    return RUNNERS[mode](config, seed)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass
class SweepResult:
    rows: list = field(default_factory=list)
    aggregates: list = field(default_factory=list)


def aggregate(rows: list) -> list:
    """Per (param, value, mode) statistics of the linear sensing SINR.

    ``median_gamma_t``/``mean_gamma_t`` use fully feasible rows only; the
    ``*_access`` variants use every row with a sensing SINR, i.e. also drops
    that fail only the backhaul QoS.
    """
    cells = {}
    for r in rows:
        cells.setdefault((r["param"], _key(r["value"]), r["mode"]), (r["value"], []))[1].append(r)
    out = []
    for (param, _, mode), (value, rs) in cells.items():
        g = np.array([r["gamma_t_linear"] for r in rs if r["feasible"]])
        ga = np.array([r["gamma_t_linear"] for r in rs if np.isfinite(r["gamma_t_linear"])])
        out.append({"param": param, "value": value, "mode": mode, "n": len(rs), "n_feasible": int(g.size),
                    "median_gamma_t": float(np.median(g)) if g.size else float("nan"),
                    "mean_gamma_t": float(np.mean(g)) if g.size else float("nan"),
                    "n_access": int(ga.size),
                    "median_gamma_t_access": float(np.median(ga)) if ga.size else float("nan"),
                    "mean_gamma_t_access": float(np.mean(ga)) if ga.size else float("nan")})
    return out


def _key(value):
    return repr(value)


def _cell(args):
    config, param, value, mode, seed = args
    cfg = config.with_value(param, value) if param else config
    try:
        res = run_mode(cfg, mode, seed)
        return res.row(param, value)
    except Exception as err:  # a failed cell must not abort the sweep
        log.warning("cell %s=%r %s seed %d failed: %s", param, value, mode, seed, err)
        return RunResult(mode, seed, None, None, None, float("nan"), False, error=str(err)).row(param, value)


def run_sweep(config: ScenarioConfig, param: str, values, modes=("fixed",), seeds=None,
              workers: int = 1) -> SweepResult:
    """Run every (value, mode, seed) cell and collect one row per cell.

    ``param`` is a dotted config key (``qos.gamma``, ``power.total``,
    ``network.n_ue``, ``area.length``, ...). Invalid names or values fail
    before any cell runs. Rows are sorted by (grid position, mode, seed).
    """
    values = list(values)
    for v in values:
        config.with_value(param, v)  # validates name and value up front
    for m in modes:
        if m not in RUNNERS:
            raise ValueError(f"unknown mode {m!r}")
    seeds = config.seeds if seeds is None else list(seeds)
    jobs = [(config, param, v, m, s) for v in values for m in modes for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_cell, jobs))
    else:
        rows = [_cell(j) for j in jobs]
    order = {_key(v): i for i, v in enumerate(values)}
    rows.sort(key=lambda r: (order[_key(r["value"])], MODES.index(r["mode"]), r["seed"]))
    return SweepResult(rows, aggregate(rows))


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17e")
    return "" if value is None else str(value)


def _parse(text: str, column: str):
    if column in ("seed", "outer_rounds", "cccp_iters", "pso_iters"):
        return int(text)
    if column == "feasible":
        return text == "true"
    if column in ("param", "mode"):
        return text
    if column == "value":
        for conv in (int, float):
            try:
                return conv(text)
            except ValueError:
                pass
        return text
    return float(text)


def emit_csv(result, path) -> None:
    """Write the rows of ``result`` (a :class:`SweepResult` or list of rows) with the fixed column order.

    ``path`` may also be an open text stream.
    """
    rows = result.rows if isinstance(result, SweepResult) else result
    if hasattr(path, "write"):
        _write_rows(path, rows)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write_rows(fh, rows)


def _write_rows(fh, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in CSV_COLUMNS])


def read_csv(path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError("unexpected CSV header")
        return [{c: _parse(t, c) for c, t in zip(header, line)} for line in rd]
