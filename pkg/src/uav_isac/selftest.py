"""Quick oracle checks runnable from the command line.

Each check compares a closed form against an independent computation on a
small random instance and returns ``(name, passed, detail)``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .cccp import linearize_objective, matched_beam_solution, optimize_precoders_tethered
from .channels import ArrayShape, PropagationParams, realize_channels
from .conic import ConicProgram, SocBlock, solve_conic
from .geometry import NetworkLayout
from .precoders import mmse_receiver, zf_ue_direction
from .pso import SwarmConfig, particle_swarm
from .sinr import backhaul_sinr, generate_symbols, sensing_sinr, simulate_echo


def _instance(seed: int, n_tx: int = 3, n_ue: int = 4, upa=(4, 4)):
    rng = np.random.default_rng(seed)
    uavs = np.c_[rng.uniform(0, 500, (n_tx, 2)), rng.uniform(50, 200, n_tx)]
    ues = np.c_[rng.uniform(0, 500, (n_ue, 2)), np.zeros(n_ue)]
    layout = NetworkLayout([0, 0, 25], uavs, [125, 250, 125], ues, [250, 375, 0])
    arrays = ArrayShape(upa, 16, 16)
    ch = realize_channels(layout, PropagationParams(), arrays, seed)
    return ch, generate_symbols(seed, n_ue, 16), rng


def check_echo(seed: int = 0):
    ch, S, rng = _instance(seed)
    W = np.sqrt(1.0 / 80) * (rng.standard_normal(ch.access.shape[1:] + (S.shape[0],))
                             + 1j * rng.standard_normal(ch.access.shape[1:] + (S.shape[0],)))
    closed = sensing_sinr(ch.sensing, W, S, ch.noise_rx)
    est = simulate_echo(rng, ch.sensing, W, S, ch.noise_rx, trials=20_000).gamma
    rel = abs(est / closed - 1)
    return "sensing SINR vs echo simulation", rel < 0.05, f"relative gap {rel:.3%}"


def check_zf(seed: int = 1):
    ch, _, _ = _instance(seed)
    worst = 0.0
    for k in range(ch.n_tx):
        for j in range(ch.n_ue):
            v = zf_ue_direction(k, j, ch.access).vector
            for i in range(ch.n_ue):
                if i != j:
                    worst = max(worst, abs(ch.access[i, k] @ v) / np.linalg.norm(ch.access[i, k]))
    return "ZF null-space residual", worst < 1e-8, f"max {worst:.2e}"


def check_mmse(seed: int = 2):
    ch, _, rng = _instance(seed)
    Wb = rng.standard_normal((ch.n_tx, 16)) + 1j * rng.standard_normal((ch.n_tx, 16))
    H = ch.backhaul[0].matrix
    got = backhaul_sinr(0, H, Wb, mmse_receiver(0, H, Wb, ch.noise_backhaul), ch.noise_backhaul)
    a = H @ Wb[0]
    Hi = H @ Wb[1:].T
    C = Hi @ Hi.conj().T + ch.noise_backhaul * np.eye(H.shape[0])
    best = float(sla.eigh(np.outer(a, a.conj()), C, eigvals_only=True)[-1])
    rel = abs(got / best - 1)
    return "MMSE receiver vs generalized eigenvalue", rel < 1e-8, f"relative gap {rel:.2e}"


def check_cone(seed: int = 3):
    c = np.random.default_rng(seed).standard_normal(6)
    prog = ConicProgram(c, [SocBlock(np.eye(6), np.zeros(6), np.zeros(6), 1.0)])
    x = solve_conic(prog).x
    err = float(np.linalg.norm(x - c / np.linalg.norm(c)))
    return "conic solver on the unit ball", err < 1e-7, f"error {err:.2e}"


def check_gradient(seed: int = 4):
    ch, S, rng = _instance(seed)
    W = rng.standard_normal(ch.access.shape[1:] + (S.shape[0],)) + 1j * rng.standard_normal(
        ch.access.shape[1:] + (S.shape[0],))
    lin = linearize_objective(W, S, ch.sensing, ch.noise_rx)
    grad = lin.gradient()
    n = W.size
    h = 1e-4
    worst = 0.0
    for idx in rng.choice(2 * n, 12, replace=False):
        d = np.zeros(2 * n)
        d[idx] = h
        dW = (d[:n] + 1j * d[n:]).reshape(W.shape)
        fd = (sensing_sinr(ch.sensing, W + dW, S, ch.noise_rx)
              - sensing_sinr(ch.sensing, W - dW, S, ch.noise_rx)) / (2 * h)
        worst = max(worst, abs(fd - grad[idx]) / max(abs(grad[idx]), 1e-12 * np.abs(grad).max()))
    return "linearization gradient vs finite differences", worst < 1e-5, f"max relative {worst:.2e}"


def check_matched_beam(seed: int = 5):
    ch, S, _ = _instance(seed, n_tx=1, n_ue=0)
    sol, _ = optimize_precoders_tethered(ch, S, 0.0, 1.0)
    _, ref = matched_beam_solution(ch.sensing, S, pooled=1.0, noise_rx=ch.noise_rx)
    got = sensing_sinr(ch.sensing, sol.W, S, ch.noise_rx)
    rel = abs(got / ref - 1)
    return "single-UAV optimum vs matched beam", rel < 0.01, f"relative gap {rel:.2e}"


def check_swarm(seed: int = 6):
    lo, hi = np.array([0.0, 0.0, 20.0]), np.array([500.0, 500.0, 200.0])
    target = lo + np.random.default_rng(100 + seed).random(3) * (hi - lo)
    res = particle_swarm(lambda p: -float(np.sum((p - target) ** 2)), lo, hi, SwarmConfig(),
                         np.random.default_rng(seed))
    err = float(np.linalg.norm(res.best - target))
    return "swarm on the sphere function", err < 1.0, f"distance {err:.3f} m"


CHECKS = (check_echo, check_zf, check_mmse, check_cone, check_gradient, check_matched_beam, check_swarm)


def run_selftest(verbose: bool = True) -> bool:
    ok = True
    for check in CHECKS:
        name, passed, detail = check()
        ok &= passed
        if verbose:
            print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    return ok

