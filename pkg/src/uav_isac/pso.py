"""Particle-swarm placement of the transmit UAVs.

Particles are candidate position sets of all transmit UAVs, flattened to a
``3 * N_Tx`` vector. The utility is the sensing SINR reached by the ZF
heuristic precoders at those positions, minus penalties for UAV pairs
closer than ``d_min``, for UEs below the SINR threshold and, when a BS
budget is given, for backhaul links below their threshold. Fading draws
come from the drop's seed, so only geometry moves between evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import ArrayShape, PropagationParams, realize_channels
from .geometry import NetworkLayout
from .precoders import (
    DegenerateDirectionError,
    dominant_receivers,
    effective_backhaul_channels,
    heuristic_power_allocation,
    zf_backhaul_direction,
)
from .sinr import backhaul_sinrs, backhaul_threshold, linear_to_db, sensing_sinr, ue_sinrs


@dataclass
class SwarmConfig:
    swarm_size: int = 30
    inertia: float = 0.7
    cognitive: float = 1.5
    social: float = 1.5
    vmax_fraction: float = 0.2
    max_iter: int = 50
    stall_window: int = 10
    stall_tol: float = 1e-6
    penalty: float = 1e3
    init_velocity: float = 0.0

    def __post_init__(self):
        if self.swarm_size < 1:
            raise ValueError("swarm_size must be >= 1")
        for name in ("inertia", "cognitive", "social", "vmax_fraction", "penalty"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iter < 0 or self.stall_window < 1:
            raise ValueError("max_iter must be >= 0 and stall_window >= 1")


@dataclass
class SwarmResult:
    """Best position found, its utility, and the best-so-far trace.

    ``trace[i]`` is the best feasible utility after iteration ``i``
    (``trace[0]`` is the initial swarm).
    """

    best: np.ndarray
    utility: float
    trace: list = field(default_factory=list)
    positions: list = field(default_factory=list)
    iterations: int = 0
    found_feasible: bool = True


@dataclass
class PositionProblem:
    """Everything the utility needs besides the candidate positions."""

    layout: NetworkLayout
    params: PropagationParams
    arrays: ArrayShape
    seed: int
    symbols: np.ndarray
    gamma: float
    p_uav: float
    d_min: float = 5.0
    sensing_fraction: float = 0.5
    qos_penalty: bool = True
    rcs_variance: float = 1.0
    p_bs: float | None = None


def project_to_box(position, r_min, r_max) -> np.ndarray:
    """Clamp every coordinate into ``[r_min, r_max]``.

    ``position`` may be one point or an ``(n, 3)`` array; the bounds broadcast.
    """
    return np.minimum(np.maximum(np.asarray(position, dtype=float), r_min), r_max)


def separation_shortfall(uavs: np.ndarray, d_min: float) -> float:
    """``sum over pairs of max(0, d_min - d_ki)``."""
    uavs = np.asarray(uavs, dtype=float).reshape(-1, 3)
    n = uavs.shape[0]
    if n < 2:
        return 0.0
    d = np.linalg.norm(uavs[:, None, :] - uavs[None, :, :], axis=-1)[np.triu_indices(n, 1)]
    return float(np.sum(np.maximum(0.0, d_min - d)))


def _zf_backhaul_sinr_db(ch, p_bs: float) -> np.ndarray:
    # ZF backhaul beams, equal split of the BS budget, dominant-mode receivers
    u = dominant_receivers(ch.backhaul)
    eff = effective_backhaul_channels(ch.backhaul, u)
    Wb = np.zeros((ch.n_tx, eff.shape[1]), dtype=complex)
    for k in range(ch.n_tx):
        try:
            d = zf_backhaul_direction(k, eff).vector
        except DegenerateDirectionError:
            return np.full(ch.n_tx, -np.inf)
        Wb[k] = np.sqrt(p_bs / ch.n_tx) * d
    return linear_to_db(backhaul_sinrs(ch.backhaul, Wb, u, ch.noise_backhaul))


def _evaluate(positions, problem: PositionProblem):
    uavs = np.asarray(positions, dtype=float).reshape(-1, 3)
    layout = problem.layout.with_uavs(uavs)
    with_bh = problem.p_bs is not None
    ch = realize_channels(layout, problem.params, problem.arrays, problem.seed, with_backhaul=with_bh)
    bh_db = _zf_backhaul_sinr_db(ch, problem.p_bs) if with_bh else np.zeros(0)
    try:
        W = heuristic_power_allocation(ch.access, ch.sensing.tx_steering, problem.p_uav, problem.sensing_fraction)
    except DegenerateDirectionError:
        return 0.0, np.full(ch.n_ue, -np.inf), bh_db
    gt = sensing_sinr(ch.sensing, W, problem.symbols, ch.noise_rx, problem.rcs_variance)
    return gt, linear_to_db(ue_sinrs(ch.access, W, ch.noise_ue)), bh_db


def _shortfall_db(values_db: np.ndarray, threshold: float) -> np.ndarray:
    short = np.maximum(0.0, linear_to_db(threshold) - values_db)
    return np.where(np.isfinite(short), short, 1e6)


def _qos_terms(problem: PositionProblem, ue_db, bh_db):
    """Total QoS shortfall in dB and whether the UE thresholds hold."""
    if not (problem.qos_penalty and problem.gamma > 0):
        return 0.0, True
    ue_short = _shortfall_db(ue_db, problem.gamma) if ue_db.size else np.zeros(0)
    total = float(np.sum(ue_short))
    if bh_db.size and ue_db.size:
        total += float(np.sum(_shortfall_db(bh_db, backhaul_threshold(problem.gamma, ue_db.size))))
    return total, not np.any(ue_short > 0)


def position_utility(positions, problem: PositionProblem, penalty: float = 1e3) -> float:
    """Penalized sensing SINR of the ZF heuristic at ``positions``.

    ``gamma_t - penalty * sum max(0, d_min - d_ki)
    - penalty * sum max(0, Gamma_dB - gamma_j,dB)``, plus the same dB
    shortfall term over backhaul links when ``problem.p_bs`` is set. The QoS
    terms are dropped when ``problem.qos_penalty`` is false.
    """
    gt, ue_db, bh_db = _evaluate(positions, problem)
    short, _ = _qos_terms(problem, ue_db, bh_db)
    return float(gt - penalty * (separation_shortfall(positions, problem.d_min) + short))


def position_feasible(positions, problem: PositionProblem) -> bool:
    """Exact separation check plus, with the QoS penalty on, the UE thresholds.

    Backhaul thresholds only enter the utility: at high ``gamma`` no placement
    may meet them, and the swarm must still return a position set.
    """
    if separation_shortfall(positions, problem.d_min) > 0:
        return False
    if problem.qos_penalty and problem.gamma > 0:
        _, ue_db, bh_db = _evaluate(positions, problem)
        return _qos_terms(problem, ue_db, bh_db)[1]
    return True


def particle_swarm(utility, lower, upper, config: SwarmConfig, rng: np.random.Generator, initial=None,
                   feasible=None) -> SwarmResult:
    """Maximize ``utility`` over the box ``[lower, upper]``.

    Velocities start at ``init_velocity * vmax`` times a uniform draw on
    [-1, 1] (zero by default) and are clipped to ``vmax = vmax_fraction`` of
    the box span per coordinate; positions are projected back into the box
    after each move and the clipped velocity components reset to zero. Only points passing ``feasible`` can become the returned best.
    The run stops after ``max_iter`` iterations or once the best value has
    improved by less than ``stall_tol`` (relative) over ``stall_window``
    iterations.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(lower > upper):
        raise ValueError("lower bound exceeds upper bound")
    dim = lower.size
    n = config.swarm_size
    vmax = config.vmax_fraction * (upper - lower)
    x = lower + rng.random((n, dim)) * (upper - lower)
    if initial is not None:
        x[0] = project_to_box(np.asarray(initial, dtype=float).ravel(), lower, upper)
    v = config.init_velocity * vmax * (2.0 * rng.random((n, dim)) - 1.0)
    feasible = feasible or (lambda p: True)

    vals = np.array([utility(p) for p in x])
    ok = np.array([feasible(p) for p in x])
    pbest, pval = x.copy(), np.where(ok, vals, -np.inf)
    if np.any(ok):
        i = int(np.argmax(pval))
        best, best_val, found = x[i].copy(), float(pval[i]), True
    else:
        best = x[0].copy() if initial is None else project_to_box(np.asarray(initial, dtype=float).ravel(),
                                                                  lower, upper)
        best_val, found = float(vals[0]), False
    result = SwarmResult(best.copy(), best_val, [best_val], [best.copy()], 0, found)
    last_gain = 0
    for it in range(1, config.max_iter + 1):
        r1 = rng.random((n, dim))
        r2 = rng.random((n, dim))
        guide = best if found else x[int(np.argmax(vals))]
        v = config.inertia * v + config.cognitive * r1 * (np.where(np.isfinite(pval)[:, None], pbest, x) - x) \
            + config.social * r2 * (guide - x)
        v = np.clip(v, -vmax, vmax)
        moved = x + v
        x = project_to_box(moved, lower, upper)
        v[moved != x] = 0.0  # absorbing walls
        vals = np.array([utility(p) for p in x])
        ok = np.array([feasible(p) for p in x])
        better = ok & (vals > pval)
        pbest[better] = x[better]
        pval[better] = vals[better]
        prev = best_val
        if np.any(ok) and pval.max() > (best_val if found else -np.inf):
            i = int(np.argmax(pval))
            best, best_val, found = pbest[i].copy(), float(pval[i]), True
        result.trace.append(best_val)
        result.positions.append(best.copy())
        result.iterations = it
        if best_val - prev > config.stall_tol * max(1.0, abs(prev)):
            last_gain = it
        elif it - last_gain >= config.stall_window:
            break
    result.best, result.utility, result.found_feasible = best, best_val, found
    return result


def optimize_positions(problem: PositionProblem, config: SwarmConfig = SwarmConfig(),
                       rng: np.random.Generator | None = None) -> SwarmResult:
    """Swarm search over the transmit-UAV positions of ``problem.layout``.

    Particle 0 starts at the current positions, so the result is never worse
    than them when they are feasible. ``best`` is returned as ``(N_Tx, 3)``.
    """
    rng = np.random.default_rng() if rng is None else rng
    lay = problem.layout
    lower = np.tile(lay.r_min, lay.n_tx)
    upper = np.tile(lay.r_max, lay.n_tx)
    cache = {}

    def score(p):
        key = p.tobytes()
        if key not in cache:
            gt, ue_db, bh_db = _evaluate(p, problem)
            sep = separation_shortfall(p, problem.d_min)
            short, ue_ok = _qos_terms(problem, ue_db, bh_db)
            u = gt - config.penalty * (sep + short)
            ok = sep == 0 and ue_ok
            cache[key] = (float(u), bool(ok))
        return cache[key]

    res = particle_swarm(lambda p: score(p)[0], lower, upper, config, rng, initial=lay.uavs.ravel(),
                         feasible=lambda p: score(p)[1])
    res.best = res.best.reshape(-1, 3)
    res.positions = [p.reshape(-1, 3) for p in res.positions]
    return res
