"""Sensing-SINR maximizing precoder design.

The sensing SINR is a convex quadratic in the UAV precoders, so maximizing it
is handled by the concave-convex procedure: at every iteration the objective
is replaced by its first-order Taylor expansion at the previous iterate (a
global minorant) and the resulting linear objective is maximized over the
convex feasible set. UE and backhaul SINR constraints enter as second-order
cones on the real part of each desired-signal term after a phase rotation.

The UE/sensing precoders and the BS backhaul precoders share no constraint
and the objective depends on the former only, so the two blocks are solved
separately: a CCCP run for ``W`` and an alternation between a minimum-power
cone program for ``W_b`` and MMSE receiver updates for ``u``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .channels import ChannelRealization, SensingGeometry
from .conic import (
    ConicProgram,
    InfeasibleProgramError,
    SocBlock,
    imag_part_row,
    lift,
    lift_vector,
    real_part_row,
    solve_conic,
    unlift,
)
from .precoders import (
    DegenerateDirectionError,
    canonical_phase,
    dominant_receivers,
    effective_backhaul_channels,
    heuristic_power_allocation,
    mmse_receiver,
    zf_backhaul_direction,
)
from .sinr import (
    PrecoderSolution,
    backhaul_sinrs,
    backhaul_threshold,
    check_feasibility,
    sensing_scale,
    sensing_sinr,
    ue_sinrs,
)

log = logging.getLogger(__name__)


class InfeasibleInstanceError(RuntimeError):
    """No precoder meets the QoS and power constraints of this drop."""

    def __init__(self, message: str, violated: tuple = ()):
        super().__init__(message)
        self.violated = tuple(violated)
        self.partial = None


@dataclass
class CccpConfig:
    inner_tol: float = 1e-4
    max_inner: int = 50
    outer_tol: float = 1e-3
    max_outer: int = 10
    sensing_fraction: float = 0.5
    random_receivers: bool = False
    solver_tol: float = 1e-9


@dataclass
class CccpState:
    """Iterate and diagnostics of one CCCP run.

    ``trace`` holds the true sensing SINR of every accepted iterate (starting
    with the initial point), ``surrogate`` the optimal value of each
    linearized subproblem.
    """

    iterate: PrecoderSolution
    trace: list = field(default_factory=list)
    surrogate: list = field(default_factory=list)
    records: list = field(default_factory=list)
    iterations: int = 0
    outer_rounds: int = 0
    converged: bool = False


@dataclass
class LinearObjective:
    """``L(W) = Re(sum(coef * W)) + const`` over ``W`` of shape ``(N_Tx, M_U, N_ue+1)``."""

    coef: np.ndarray
    const: float

    def __call__(self, W: np.ndarray) -> float:
        return float(np.real(np.sum(self.coef * W)) + self.const)

    def gradient(self) -> np.ndarray:
        """Gradient with respect to ``[Re W; Im W]`` (flattened C-order)."""
        return real_part_row(self.coef.ravel())


# ---------------------------------------------------------------------------
# problem pieces
# ---------------------------------------------------------------------------

def _stream_rows(h: np.ndarray, n_streams: int, scale: float) -> sp.csr_matrix:
    """Complex ``(S, n_tx*m*S)`` matrix mapping vec(W) to the row ``h W̃ * scale``."""
    h = np.asarray(h).reshape(-1)
    n = h.size
    rows = np.repeat(np.arange(n_streams), n)
    cols = (np.arange(n)[None, :] * n_streams + np.arange(n_streams)[:, None]).ravel()
    vals = np.tile(h * scale, n_streams)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n_streams, n * n_streams))


def build_ue_soc_constraint(j: int, access: np.ndarray, gamma: float, noise: float, phase: float = 0.0):
    """Cone and phase equality equivalent to ``gamma_j >= gamma``.

    Returns ``(block, eq_row)``: ``||[h_j W̃, sigma_j] / sigma_j|| <=
    sqrt(1 + 1/gamma) Re(e^{-i phase} h_j w_j) / sigma_j`` and
    ``eq_row @ x = 0`` pinning ``Im(e^{-i phase} h_j w_j) = 0``, over the
    lifted ``x`` of ``W`` (shape ``(N_Tx, M_U, N_ue+1)``, C-order). The UE
    SINR ignores the phase of ``h_j w_j``, so every ``phase`` gives an exact
    reformulation; the default pins the desired term to the real axis.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    n_streams = access.shape[0] + 1
    sigma = np.sqrt(noise)
    M = _stream_rows(access[j], n_streams, np.exp(-1j * phase) / sigma)
    A = sp.vstack([lift(M), sp.csr_matrix((1, 2 * M.shape[1]))])
    b = np.zeros(A.shape[0])
    b[-1] = 1.0
    mj = M.getrow(j).toarray().ravel()
    c = np.sqrt(1.0 + 1.0 / gamma) * real_part_row(mj)
    return SocBlock(A, b, c, 0.0, name=f"ue{j}"), imag_part_row(mj)


def build_backhaul_soc_constraint(k: int, H: np.ndarray, u: np.ndarray, gamma_b: float, noise: float,
                                  n_tx: int):
    """Cone and phase equality equivalent to ``gamma_k >= gamma_b``.

    Variables are the lifted backhaul precoders ``W_b`` of shape
    ``(N_Tx, M_BS)``. The noise entry is ``sigma_k ||u_k||``.
    """
    if not gamma_b > 0:
        raise ValueError("gamma_b must be positive")
    r = u.conj() @ H
    m_bs = r.size
    scale = 1.0 / (np.sqrt(noise) * np.linalg.norm(u))
    rows = np.repeat(np.arange(n_tx), m_bs)
    cols = np.arange(n_tx * m_bs)
    M = sp.csr_matrix((np.tile(r * scale, n_tx), (rows, cols)), shape=(n_tx, n_tx * m_bs))
    A = sp.vstack([lift(M), sp.csr_matrix((1, 2 * M.shape[1]))])
    b = np.zeros(A.shape[0])
    b[-1] = 1.0
    mk = M.getrow(k).toarray().ravel()
    c = np.sqrt(1.0 + 1.0 / gamma_b) * real_part_row(mk)
    return SocBlock(A, b, c, 0.0, name=f"backhaul{k}"), imag_part_row(mk)


def _power_block(index: np.ndarray, n_complex: int, budget: float, name: str) -> SocBlock:
    idx = np.concatenate([index, index + n_complex])
    A = sp.csr_matrix((np.ones(idx.size), (np.arange(idx.size), idx)), shape=(idx.size, 2 * n_complex))
    return SocBlock(A, np.zeros(idx.size), np.zeros(2 * n_complex), float(np.sqrt(budget)), name=name)


def _desired_phases(access: np.ndarray, W: np.ndarray) -> np.ndarray:
    n_ue = access.shape[0]
    return np.angle(np.einsum("jkm,kmj->j", access, W[:, :, :n_ue]))


def _precoder_constraints(channels: ChannelRealization, gamma: float, p_uav=None, pooled=None, phases=None,
                          pin_phase: bool = True):
    n_ue, n_tx, m_u = channels.access.shape
    n_streams = n_ue + 1
    n_c = n_tx * m_u * n_streams
    cones, eqs = [], []
    phases = np.zeros(n_ue) if phases is None else phases
    if gamma > 0:
        for j in range(n_ue):
            blk, eq = build_ue_soc_constraint(j, channels.access, gamma, channels.noise_ue, phases[j])
            cones.append(blk)
            if pin_phase:
                eqs.append(eq)
    if pooled is not None:
        cones.append(_power_block(np.arange(n_c), n_c, pooled, "power_pooled"))
    else:
        p = np.broadcast_to(np.asarray(p_uav, dtype=float), (n_tx,))
        per = m_u * n_streams
        for k in range(n_tx):
            cones.append(_power_block(np.arange(k * per, (k + 1) * per), n_c, p[k], f"power{k}"))
    eq_A = sp.csr_matrix(np.array(eqs)) if eqs else None
    eq_b = np.zeros(len(eqs)) if eqs else None
    return cones, eq_A, eq_b


def linearize_objective(W_prev: np.ndarray, symbols: np.ndarray, geom: SensingGeometry, noise_rx: float,
                        rcs_variance: float = 1.0) -> LinearObjective:
    """First-order expansion of the sensing SINR at ``W_prev``.

    With ``g_k[n] = a_k^T W_k s[n]`` the sensing SINR is
    ``sum_k c_k sum_n |g_k[n]|^2`` and its tangent is
    ``sum_k c_k sum_n (2 Re{conj(g0_k[n]) g_k[n]} - |g0_k[n]|^2)``, a global
    minorant that touches it at ``W_prev``.
    """
    if isinstance(W_prev, PrecoderSolution):
        W_prev = W_prev.W
    zeta = sensing_scale(geom, symbols.shape[1], noise_rx, rcs_variance)
    weight = zeta / geom.d_kt ** 2
    g0 = np.einsum("km,kms,sn->kn", geom.tx_steering, W_prev, symbols)
    bvec = np.einsum("sn,kn->ks", symbols, g0.conj())
    coef = 2.0 * weight[:, None, None] * geom.tx_steering[:, :, None] * bvec[:, None, :]
    const = -float(np.sum(weight * np.sum(np.abs(g0) ** 2, axis=1)))
    return LinearObjective(coef, const)


# ---------------------------------------------------------------------------
# CCCP
# ---------------------------------------------------------------------------

def _fit_budget(W: np.ndarray, p_uav=None, pooled=None) -> np.ndarray:
    """Shrink solver round-off that pushes a power constraint above its budget."""
    W = W.copy()
    if pooled is not None:
        tot = np.sum(np.abs(W) ** 2)
        if tot > pooled:
            W *= np.sqrt(pooled / tot)
        return W
    p = np.broadcast_to(np.asarray(p_uav, dtype=float), (W.shape[0],))
    for k in range(W.shape[0]):
        pk = np.sum(np.abs(W[k]) ** 2)
        if pk > p[k]:
            W[k] *= np.sqrt(p[k] / pk)
    return W


def run_cccp(W0: np.ndarray, channels: ChannelRealization, symbols: np.ndarray, gamma: float,
             p_uav=None, pooled=None, config: CccpConfig = CccpConfig(),
             rcs_variance: float = 1.0) -> CccpState:
    """CCCP over the UE/sensing precoders from a feasible ``W0``.

    Each subproblem writes the cone of UE ``j`` on the real part of
    ``h_j w_j`` rotated by its phase in the previous iterate. The real part
    bounds the magnitude from below, so the cones are a restriction of the
    true constraints that keeps the previous iterate feasible; the true
    sensing SINR therefore never decreases while the phases are free to drift.
    A step whose true value would drop (solver round-off) is rejected and
    ends the run, as does a relative surrogate gain below ``inner_tol``.
    """
    geom = channels.sensing
    shape = W0.shape
    W = np.asarray(W0, dtype=complex)
    value = sensing_sinr(geom, W, symbols, channels.noise_rx, rcs_variance)
    state = CccpState(PrecoderSolution(W), trace=[value])
    for it in range(1, config.max_inner + 1):
        lin = linearize_objective(W, symbols, geom, channels.noise_rx, rcs_variance)
        cones, eq_A, eq_b = _precoder_constraints(channels, gamma, p_uav, pooled,
                                                  _desired_phases(channels.access, W), pin_phase=False)
        prog = ConicProgram(lin.gradient(), cones, eq_A, eq_b, lin.const)
        sol = solve_conic(prog, tol=config.solver_tol)
        W_new = _fit_budget(unlift(sol.x).reshape(shape), p_uav, pooled)
        new_value = sensing_sinr(geom, W_new, symbols, channels.noise_rx, rcs_variance)
        state.iterations = it
        state.surrogate.append(sol.objective)
        state.records.append({"iteration": it, "surrogate": sol.objective, "gamma_t": new_value,
                              "max_residual": prog.max_residual(lift_vector(W_new))})
        if new_value < value:
            state.converged = True
            break
        improvement = (sol.objective - value) / max(abs(value), np.finfo(float).tiny)
        W, value = W_new, new_value
        state.trace.append(value)
        if improvement < config.inner_tol:
            state.converged = True
            break
    state.iterate = PrecoderSolution(W)
    return state


# ---------------------------------------------------------------------------
# initialization
# ---------------------------------------------------------------------------

def _ue_feasible(access, W, noise, gamma) -> bool:
    if gamma <= 0 or access.shape[0] == 0:
        return True
    return bool(np.all(ue_sinrs(access, W, noise) >= gamma))


def _min_power_precoders(channels: ChannelRealization, gamma: float, p_uav=None, pooled=None,
                         tol: float = 1e-9) -> np.ndarray:
    """Least total UAV power meeting every UE constraint, or raise if none exists."""
    n_ue, n_tx, m_u = channels.access.shape
    cones, eq_A, eq_b = _precoder_constraints(channels, gamma, p_uav, pooled)
    n_c = n_tx * m_u * (n_ue + 1)
    # epigraph variable t appended: minimize t s.t. ||x|| <= t
    cones = [SocBlock(sp.hstack([c.A, sp.csr_matrix((c.A.shape[0], 1))]), c.b, np.append(c.c, 0.0), c.d, c.name)
             for c in cones]
    cones.append(SocBlock(sp.hstack([sp.identity(2 * n_c), sp.csr_matrix((2 * n_c, 1))]),
                          np.zeros(2 * n_c), np.append(np.zeros(2 * n_c), 1.0), 0.0, "epigraph"))
    if eq_A is not None:
        eq_A = sp.hstack([eq_A, sp.csr_matrix((eq_A.shape[0], 1))])
    obj = np.zeros(2 * n_c + 1)
    obj[-1] = -1.0
    try:
        sol = solve_conic(ConicProgram(obj, cones, eq_A, eq_b), tol=tol)
    except InfeasibleProgramError as err:
        raise InfeasibleInstanceError("UE QoS cannot be met within the power budget",
                                      err.violated or ("ue",)) from err
    return _fit_budget(unlift(sol.x[:-1]).reshape(n_tx, m_u, n_ue + 1), p_uav, pooled)


def _init_ue_precoders(channels: ChannelRealization, gamma: float, p_uav=None, pooled=None,
                       sensing_fraction: float = 0.5):
    """ZF start with bisection on the sensing share; falls back to a cone program."""
    n_ue, n_tx, _ = channels.access.shape
    budgets = np.full(n_tx, pooled / n_tx) if pooled is not None else \
        np.broadcast_to(np.asarray(p_uav, dtype=float), (n_tx,))
    try:
        W = heuristic_power_allocation(channels.access, channels.sensing.tx_steering, budgets, sensing_fraction)
        if _ue_feasible(channels.access, W, channels.noise_ue, gamma):
            return W, "zf"
        lo, hi = 0.0, sensing_fraction
        W_lo = heuristic_power_allocation(channels.access, channels.sensing.tx_steering, budgets, 0.0)
        if _ue_feasible(channels.access, W_lo, channels.noise_ue, gamma):
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                W_mid = heuristic_power_allocation(channels.access, channels.sensing.tx_steering, budgets, mid)
                if _ue_feasible(channels.access, W_mid, channels.noise_ue, gamma):
                    lo, W_lo = mid, W_mid
                else:
                    hi = mid
            return W_lo, "zf-bisection"
    except DegenerateDirectionError:
        pass
    return _min_power_precoders(channels, gamma, p_uav, pooled), "cone-feasibility"


def _receivers_start(channels: ChannelRealization, random: bool, rng=None) -> np.ndarray:
    if not random:
        return dominant_receivers(channels.backhaul)
    rng = np.random.default_rng() if rng is None else rng
    m_ub = channels.backhaul[0].matrix.shape[0]
    u = rng.standard_normal((len(channels.backhaul), m_ub)) + 1j * rng.standard_normal((len(channels.backhaul), m_ub))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def _min_power_backhaul(channels: ChannelRealization, receivers: np.ndarray, gamma_b: float, p_bs: float,
                        tol: float = 1e-9) -> np.ndarray:
    n_tx = len(channels.backhaul)
    m_bs = channels.backhaul[0].matrix.shape[1]
    n_c = n_tx * m_bs
    cones, eqs = [], []
    for k, ch in enumerate(channels.backhaul):
        blk, eq = build_backhaul_soc_constraint(k, ch.matrix, receivers[k], gamma_b, channels.noise_backhaul, n_tx)
        cones.append(SocBlock(sp.hstack([blk.A, sp.csr_matrix((blk.A.shape[0], 1))]), blk.b,
                              np.append(blk.c, 0.0), blk.d, blk.name))
        eqs.append(np.append(eq, 0.0))
    cones.append(SocBlock(sp.hstack([sp.identity(2 * n_c), sp.csr_matrix((2 * n_c, 1))]), np.zeros(2 * n_c),
                          np.append(np.zeros(2 * n_c), 1.0), 0.0, "epigraph"))
    ones = np.zeros(2 * n_c + 1)
    ones[-1] = 1.0
    cones.append(SocBlock(sp.csr_matrix((1, 2 * n_c + 1)), np.zeros(1), -ones, np.sqrt(p_bs), "power_bs"))
    obj = -ones
    try:
        sol = solve_conic(ConicProgram(obj, cones, sp.csr_matrix(np.array(eqs)), np.zeros(len(eqs))), tol=tol)
    except InfeasibleProgramError as err:
        raise InfeasibleInstanceError("backhaul QoS cannot be met within the BS power budget",
                                      err.violated or ("backhaul",)) from err
    return unlift(sol.x[:-1]).reshape(n_tx, m_bs)


def _scale_to_budget(Wb: np.ndarray, p_bs: float) -> np.ndarray:
    # common scaling raises every backhaul SINR, so spend the whole budget
    tot = np.sum(np.abs(Wb) ** 2)
    return Wb * np.sqrt(p_bs / tot) if tot > 0 else Wb


def _init_backhaul(channels: ChannelRealization, gamma_b: float, p_bs: float, receivers: np.ndarray):
    eff = effective_backhaul_channels(channels.backhaul, receivers)
    n_tx = eff.shape[0]
    m_bs = eff.shape[1]
    try:
        Wb = np.zeros((n_tx, m_bs), dtype=complex)
        need = np.zeros(n_tx)
        for k in range(n_tx):
            v = zf_backhaul_direction(k, eff).vector
            g = np.vdot(eff[k], v)
            v = v * (abs(g) / g)
            Wb[k] = v
            need[k] = gamma_b * channels.noise_backhaul * np.vdot(receivers[k], receivers[k]).real / abs(g) ** 2
        if need.sum() <= p_bs:
            Wb *= np.sqrt(need)[:, None]
            return _scale_to_budget(Wb, p_bs), "zf"
    except DegenerateDirectionError:
        pass
    return _scale_to_budget(_min_power_backhaul(channels, receivers, gamma_b, p_bs), p_bs), "cone-feasibility"


def _initial_backhaul(channels: ChannelRealization, gamma: float, p_bs: float, config: CccpConfig, rng=None):
    receivers = _receivers_start(channels, config.random_receivers, rng)
    gamma_b = backhaul_threshold(gamma, channels.n_ue)
    if gamma_b > 0:
        Wb, method = _init_backhaul(channels, gamma_b, p_bs, receivers)
    else:
        eff = effective_backhaul_channels(channels.backhaul, receivers)
        Wb = np.sqrt(p_bs / len(eff)) * eff / np.linalg.norm(eff, axis=1, keepdims=True)
        method = "matched"
    return Wb, receivers, method


def initialize_feasible(channels: ChannelRealization, gamma: float, p_uav=None, p_bs: float | None = None,
                        pooled: float | None = None, config: CccpConfig = CccpConfig(),
                        rng: np.random.Generator | None = None) -> PrecoderSolution:
    """Feasible starting point for the CCCP.

    UE/sensing precoders: ZF directions with the default sensing share, then
    bisection on the share, then a minimum-power cone program. Backhaul
    (wireless deployments, ``p_bs`` given): ZF against the effective channels
    of the starting receivers, else a minimum-power cone program. The chosen
    routes and the UE SINR margin (dB) are stored in ``info``.
    """
    W, method = _init_ue_precoders(channels, gamma, p_uav, pooled, config.sensing_fraction)
    W = _cophase(channels.access, W)
    Wb = receivers = None
    bh_method = None
    if p_bs is not None and channels.backhaul:
        Wb, receivers, bh_method = _initial_backhaul(channels, gamma, p_bs, config, rng)
    sol = PrecoderSolution(W, Wb, receivers)
    rep = check_feasibility(channels, sol, gamma, p_uav, p_bs, pooled)
    if not rep.feasible:
        bad = [n for n, ok in (("ue", rep.feasible_ue), ("backhaul", rep.feasible_backhaul),
                               ("power", rep.feasible_power)) if not ok]
        raise InfeasibleInstanceError("no feasible starting point", bad)
    sol.info = {"method": method, "backhaul_method": bh_method,
                "ue_margin_db": rep.min_ue_sinr_db - 10 * np.log10(gamma) if gamma > 0 else np.inf}
    return sol


def _cophase(access: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Rotate each UE precoder so that ``h_j w_j`` is real and positive."""
    W = W.copy()
    n_ue = access.shape[0]
    if n_ue == 0:
        return W
    g = np.einsum("jkm,kmj->j", access, W[:, :, :n_ue])
    ph = np.where(np.abs(g) > 0, np.abs(g) / np.where(g == 0, 1, g), 1.0)
    W[:, :, :n_ue] *= ph[None, None, :]
    return W


# ---------------------------------------------------------------------------
# deployments
# ---------------------------------------------------------------------------

def optimize_backhaul(channels: ChannelRealization, solution: PrecoderSolution, gamma: float, p_bs: float,
                      config: CccpConfig = CccpConfig()):
    """Alternate minimum-power backhaul precoding and MMSE receivers.

    Returns ``(backhaul, receivers, rounds)``. The loop stops when the
    minimum power changes by less than ``config.outer_tol`` (relative).
    """
    gamma_b = backhaul_threshold(gamma, channels.n_ue)
    Wb, u = solution.backhaul, solution.receivers
    n_tx = len(channels.backhaul)
    prev = None
    rounds = 0
    for rounds in range(1, config.max_outer + 1):
        u = np.array([canonical_phase(mmse_receiver(k, channels.backhaul[k].matrix, Wb, channels.noise_backhaul))
                      for k in range(n_tx)])
        if gamma_b <= 0:
            break
        Wmin = _min_power_backhaul(channels, u, gamma_b, p_bs, config.solver_tol)
        pmin = float(np.sum(np.abs(Wmin) ** 2))
        Wb = _scale_to_budget(Wmin, p_bs)
        if prev is not None and abs(prev - pmin) <= config.outer_tol * prev:
            break
        prev = pmin
    u = np.array([canonical_phase(mmse_receiver(k, channels.backhaul[k].matrix, Wb, channels.noise_backhaul))
                  for k in range(n_tx)])
    return Wb, u, rounds


def optimize_precoders_mobile(channels: ChannelRealization, symbols: np.ndarray, gamma: float, p_uav, p_bs: float,
                              config: CccpConfig = CccpConfig(), init: PrecoderSolution | None = None,
                              rcs_variance: float = 1.0, rng: np.random.Generator | None = None):
    """Precoders of a wireless-backhaul deployment for fixed UAV positions.

    Per-UAV power budgets ``p_uav`` and BS budget ``p_bs`` in watts. Returns
    ``(solution, state)``. The access block is solved first; if the backhaul
    block is then infeasible the raised error carries the access result in
    ``partial``.
    """
    if init is None:
        W0, method = _init_ue_precoders(channels, gamma, p_uav, None, config.sensing_fraction)
        init = PrecoderSolution(_cophase(channels.access, W0))
        init.info = {"method": method}
    state = run_cccp(init.W, channels, symbols, gamma, p_uav=p_uav, config=config, rcs_variance=rcs_variance)
    try:
        if init.backhaul is None:
            Wb, u, bh_method = _initial_backhaul(channels, gamma, p_bs, config, rng)
            info = dict(init.info, backhaul_method=bh_method)
            init = PrecoderSolution(init.W, Wb, u)
            init.info = info
        Wb, u, rounds = optimize_backhaul(channels, init, gamma, p_bs, config)
    except InfeasibleInstanceError as err:
        err.partial = (state.iterate, state)
        raise
    state.outer_rounds = rounds
    sol = PrecoderSolution(state.iterate.W, Wb, u)
    sol.info = dict(init.info)
    state.iterate = sol
    return sol, state


def optimize_precoders_tethered(channels: ChannelRealization, symbols: np.ndarray, gamma: float, pooled: float,
                                config: CccpConfig = CccpConfig(), init: PrecoderSolution | None = None,
                                rcs_variance: float = 1.0):
    """Precoders of a wired deployment under one pooled power budget (W)."""
    start = init if init is not None else initialize_feasible(channels, gamma, pooled=pooled, config=config)
    state = run_cccp(start.W, channels, symbols, gamma, pooled=pooled, config=config, rcs_variance=rcs_variance)
    state.outer_rounds = 1
    sol = PrecoderSolution(state.iterate.W)
    sol.info = getattr(start, "info", {})
    state.iterate = sol
    return sol, state


def matched_beam_solution(geom: SensingGeometry, symbols: np.ndarray, p_uav=None, pooled: float | None = None,
                          noise_rx: float = 1.0, rcs_variance: float = 1.0):
    """Closed-form sensing optimum without QoS constraints.

    Each UAV beams ``sqrt(P_k / M_U) a_k^* v^H`` with ``v`` the principal
    eigenvector of the symbol Gram matrix ``S S^H``; with a pooled budget all
    power goes to the UAV closest to the target. Returns ``(W, gamma_t)``.
    """
    n_tx, m_u = geom.tx_steering.shape
    R = symbols @ symbols.conj().T
    evals, evecs = np.linalg.eigh(R)
    v = evecs[:, -1]
    if pooled is not None:
        p = np.zeros(n_tx)
        p[int(np.argmin(geom.d_kt))] = pooled
    else:
        p = np.broadcast_to(np.asarray(p_uav, dtype=float), (n_tx,))
    W = np.sqrt(p / m_u)[:, None, None] * geom.tx_steering.conj()[:, :, None] * v.conj()[None, None, :]
    zeta = sensing_scale(geom, symbols.shape[1], noise_rx, rcs_variance)
    gamma_t = float(zeta * np.sum(p * m_u * evals[-1] / geom.d_kt ** 2))
    return W, gamma_t
