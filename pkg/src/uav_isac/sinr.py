"""SINR evaluation for UEs, backhaul links and the bistatic sensing receiver.

Closed forms live next to Monte-Carlo estimators that simulate the
underlying received signals, which the test-suite uses as independent
oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import (
    TAG_SENSING_SYMBOLS,
    TAG_SYMBOLS,
    SensingGeometry,
    complex_normal,
    stream,
)

# feasibility tolerances
POWER_RTOL = 1e-6
SINR_DB_TOL = 1e-4


def dbm_to_watts(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    return 10.0 * np.log10(p_w) + 30.0


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x) -> float:
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


def backhaul_threshold(gamma: float, n_ue: int) -> float:
    """Per-UAV backhaul SINR needed to carry ``n_ue`` streams at SINR ``gamma``.

    ``log2(1 + gamma_b) = n_ue * log2(1 + gamma)``.
    """
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    return (1.0 + gamma) ** n_ue - 1.0


@dataclass
class PrecoderSolution:
    """Transmit precoders of all UAVs plus the BS backhaul side.

    ``W[k]`` is the ``M_U x (N_ue + 1)`` matrix of UAV ``k``: columns ``0..N_ue-1``
    are the UE precoders ``w_{j,k}`` and the last column is the sensing
    precoder ``w_{t,k}``. ``backhaul[k]`` is ``w_{b,k}`` (length ``M_BS``) and
    ``receivers[k]`` the backhaul receive beamformer ``u_k`` (length ``M_UB``).
    Both are ``None`` for wired deployments.
    """

    W: np.ndarray
    backhaul: np.ndarray | None = None
    receivers: np.ndarray | None = None
    info: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=complex)
        if self.W.ndim != 3:
            raise ValueError("W must have shape (n_tx, m_u, n_ue + 1)")
        for arr in (self.W, self.backhaul, self.receivers):
            if arr is not None and not np.all(np.isfinite(arr)):
                raise ValueError("precoders must be finite")

    @property
    def n_tx(self) -> int:
        return self.W.shape[0]

    @property
    def n_ue(self) -> int:
        return self.W.shape[2] - 1

    @property
    def ue_precoders(self) -> np.ndarray:
        return self.W[:, :, :-1]

    @property
    def sensing_precoders(self) -> np.ndarray:
        return self.W[:, :, -1]

    def stacked(self) -> np.ndarray:
        """``(N_Tx*M_U, N_ue+1)`` matrix whose column j is ``w_j = [w_{j,1}; ...; w_{j,N_Tx}]``."""
        return self.W.reshape(-1, self.W.shape[2])

    def uav_power(self) -> np.ndarray:
        return np.sum(np.abs(self.W) ** 2, axis=(1, 2))

    def backhaul_power(self) -> float:
        return 0.0 if self.backhaul is None else float(np.sum(np.abs(self.backhaul) ** 2))

    def total_power(self) -> float:
        return float(self.uav_power().sum()) + self.backhaul_power()

    def with_W(self, W) -> "PrecoderSolution":
        return PrecoderSolution(W, self.backhaul, self.receivers)


def generate_symbols(seed: int, n_ue: int, n_symbols: int) -> np.ndarray:
    """Unit-power Gaussian symbol block of shape ``(N_ue + 1, N - 1)``.

    Data stream ``j`` and the sensing stream each come from their own seeded
    stream, so the block for ``N_ue`` UEs is a sub-block of the one for more UEs.
    """
    if n_symbols < 2:
        raise ValueError("need N >= 2 symbols")
    rows = [complex_normal(stream(seed, TAG_SYMBOLS, j), n_symbols - 1) for j in range(n_ue)]
    rows.append(complex_normal(stream(seed, TAG_SENSING_SYMBOLS), n_symbols - 1))
    return np.array(rows)


# ---------------------------------------------------------------------------
# UE and backhaul SINR
# ---------------------------------------------------------------------------

def ue_sinrs(access: np.ndarray, W: np.ndarray, noise: float) -> np.ndarray:
    """SINR of every UE. ``access`` is ``(N_ue, N_Tx, M_U)``, ``W`` ``(N_Tx, M_U, N_ue+1)``."""
    n_ue = access.shape[0]
    if n_ue == 0:
        return np.zeros(0)
    g = access.reshape(n_ue, -1) @ W.reshape(-1, W.shape[2])
    p = np.abs(g) ** 2
    sig = p[np.arange(n_ue), np.arange(n_ue)]
    return sig / (p.sum(axis=1) - sig + noise)


def ue_sinr(j: int, access: np.ndarray, solution: PrecoderSolution, noise: float) -> float:
    h = access[j].reshape(-1)
    g = h @ solution.stacked()
    p = np.abs(g) ** 2
    return float(p[j] / (p.sum() - p[j] + noise))


def backhaul_sinr(k: int, H: np.ndarray, backhaul: np.ndarray, u: np.ndarray, noise: float) -> float:
    """SINR of backhaul link ``k``: ``H`` is ``H_{b,k}``, ``backhaul[l] = w_{b,l}``."""
    nu = float(np.vdot(u, u).real)
    if nu == 0.0:
        raise ValueError("receive beamformer must be nonzero")
    g = (u.conj() @ H) @ backhaul.T
    p = np.abs(g) ** 2
    return float(p[k] / (p.sum() - p[k] + noise * nu))


def backhaul_sinrs(backhaul_channels, backhaul: np.ndarray, receivers: np.ndarray, noise: float) -> np.ndarray:
    return np.array([backhaul_sinr(k, ch.matrix, backhaul, receivers[k], noise)
                     for k, ch in enumerate(backhaul_channels)])


def simulate_ue_link(rng: np.random.Generator, access: np.ndarray, W: np.ndarray, noise: float, j: int,
                     n_draws: int = 100_000) -> float:
    """Monte-Carlo SINR of UE ``j`` from simulated received samples.

    Symbols and noise are drawn per time instant; the desired component is
    separated from the rest of the received sample.
    """
    h = access[j].reshape(-1)
    s = complex_normal(rng, (W.shape[2], n_draws))
    n = complex_normal(rng, n_draws, noise)
    x = W.reshape(-1, W.shape[2]) @ s
    y = h @ x + n
    desired = (h @ W.reshape(-1, W.shape[2])[:, j]) * s[j]
    return float(np.mean(np.abs(desired) ** 2) / np.mean(np.abs(y - desired) ** 2))


def simulate_backhaul_link(rng: np.random.Generator, H: np.ndarray, backhaul: np.ndarray, u: np.ndarray,
                           noise: float, k: int, n_draws: int = 100_000) -> float:
    """Monte-Carlo SINR of backhaul link ``k`` from simulated samples."""
    n_tx = backhaul.shape[0]
    s = complex_normal(rng, (n_tx, n_draws))
    nv = complex_normal(rng, (H.shape[0], n_draws), noise)
    y = u.conj() @ (H @ (backhaul.T @ s) + nv)
    desired = (u.conj() @ H @ backhaul[k]) * s[k]
    return float(np.mean(np.abs(desired) ** 2) / np.mean(np.abs(y - desired) ** 2))


# ---------------------------------------------------------------------------
# sensing
# ---------------------------------------------------------------------------

def sensing_scale(geom: SensingGeometry, n_slots: int, noise_rx: float, rcs_variance: float) -> float:
    """Prefactor ``lambda^2 sigma_rcs^2 / ((N-1) (4 pi)^3 sigma_r^2 d_rt^2)``; ``n_slots = N - 1``."""
    return geom.wavelength ** 2 * rcs_variance / (n_slots * (4 * np.pi) ** 3 * noise_rx * geom.d_rt ** 2)


def beam_outputs(geom: SensingGeometry, W: np.ndarray, symbols: np.ndarray) -> np.ndarray:
    """``c[k, n] = a_k^T W_k s[n]``, the target-direction output of UAV ``k``."""
    return np.einsum("km,kms,sn->kn", geom.tx_steering, W, symbols)


def sensing_sinr(geom: SensingGeometry, W: np.ndarray, symbols: np.ndarray, noise_rx: float,
                 rcs_variance: float = 1.0) -> float:
    """Sensing SINR accumulated over the ``N - 1`` symbol slots of ``symbols``."""
    if isinstance(W, PrecoderSolution):
        W = W.W
    c = beam_outputs(geom, W, symbols)
    zeta = sensing_scale(geom, symbols.shape[1], noise_rx, rcs_variance)
    return float(zeta * np.sum(np.sum(np.abs(c) ** 2, axis=1) / geom.d_kt ** 2))


@dataclass
class EchoEstimate:
    gamma: float
    target_power: float
    noise_power: float
    trials: int


def simulate_echo(rng: np.random.Generator, geom: SensingGeometry, W: np.ndarray, symbols: np.ndarray,
                  noise_rx: float, rcs_variance: float = 1.0, trials: int = 100_000,
                  batch: int = 2_000) -> EchoEstimate:
    """Monte-Carlo estimate of the sensing SINR from simulated echoes.

    Each trial draws one Swerling-I RCS per transmit UAV (constant over the
    symbol block) and receiver noise, forms the array snapshots
    ``y_r[n] = sum_k beta_k sqrt(g_k) a_r a_k^T x_k[n] + n_r[n]`` and combines
    them with the matched filter ``a_r^H / M_U``. The target-return power is
    the mean power of the combined echo; the noise power is the mean
    per-element power of the raw noise snapshots. The matched filter is
    unit-gain on the echo, so the ratio is the per-element echo SNR.
    """
    if isinstance(W, PrecoderSolution):
        W = W.W
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n_tx, m_u = geom.tx_steering.shape
    n_slots = symbols.shape[1]
    x = np.einsum("kms,sn->kmn", W, symbols)  # x_k[n]
    ar = geom.rx_steering
    sqrt_g = np.sqrt(geom.path_gain)
    # a_r a_k^T x_k[n] collapses to a_r times the scalar a_k^T x_k[n]
    at_x = np.einsum("km,kmn->kn", geom.tx_steering, x)
    batch = max(1, min(batch, 4_000_000 // (m_u * n_slots)))
    sig_acc = 0.0
    noise_acc = 0.0
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        beta = complex_normal(rng, (b, n_tx), rcs_variance)
        noise = complex_normal(rng, (b, m_u, n_slots), noise_rx)
        amp = np.einsum("bk,k,kn->bn", beta, sqrt_g, at_x)
        echo = amp[:, None, :] * ar[None, :, None]
        y = echo + noise
        z_echo = np.einsum("m,bmn->bn", ar.conj(), y - noise) / m_u
        sig_acc += float(np.sum(np.abs(z_echo) ** 2))
        noise_acc += float(np.sum(np.abs(noise) ** 2)) / m_u
        done += b
    target_power = sig_acc / (trials * n_slots)
    noise_power = noise_acc / (trials * n_slots)
    return EchoEstimate(target_power / noise_power, target_power, noise_power, trials)


# ---------------------------------------------------------------------------
# feasibility
# ---------------------------------------------------------------------------

@dataclass
class SinrReport:
    ue_sinr: np.ndarray
    backhaul_sinr: np.ndarray
    sensing_sinr: float
    uav_power: np.ndarray
    backhaul_power: float
    feasible_ue: bool
    feasible_backhaul: bool
    feasible_power: bool

    @property
    def feasible(self) -> bool:
        return self.feasible_ue and self.feasible_backhaul and self.feasible_power

    @property
    def power_used_w(self) -> float:
        return float(self.uav_power.sum()) + self.backhaul_power

    @property
    def min_ue_sinr_db(self) -> float:
        return float(linear_to_db(self.ue_sinr.min())) if self.ue_sinr.size else np.inf

    @property
    def min_backhaul_sinr_db(self) -> float:
        return float(linear_to_db(self.backhaul_sinr.min())) if self.backhaul_sinr.size else np.nan


def _meets(values: np.ndarray, threshold: float) -> bool:
    if values.size == 0 or threshold <= 0:
        return True
    return bool(np.all(values >= threshold * 10.0 ** (-SINR_DB_TOL / 10.0)))


def check_feasibility(channels, solution: PrecoderSolution, gamma: float, p_uav: float | None = None,
                      p_bs: float | None = None, pooled_power: float | None = None,
                      symbols: np.ndarray | None = None, rcs_variance: float = 1.0) -> SinrReport:
    """Evaluate every SINR and flag each constraint.

    Give ``p_uav`` (per-UAV budget, W) for wireless deployments and
    ``pooled_power`` for wired ones. Backhaul SINRs are checked against the
    rate-matched threshold whenever the solution carries backhaul precoders.
    """
    g_ue = ue_sinrs(channels.access, solution.W, channels.noise_ue)
    if solution.backhaul is not None and channels.backhaul:
        g_bh = backhaul_sinrs(channels.backhaul, solution.backhaul, solution.receivers, channels.noise_backhaul)
    else:
        g_bh = np.zeros(0)
    gt = sensing_sinr(channels.sensing, solution.W, symbols, channels.noise_rx, rcs_variance) \
        if symbols is not None else np.nan
    pw = solution.uav_power()
    pb = solution.backhaul_power()
    ok_power = True
    if p_uav is not None:
        ok_power &= bool(np.all(pw <= p_uav * (1 + POWER_RTOL)))
    if p_bs is not None and solution.backhaul is not None:
        ok_power &= pb <= p_bs * (1 + POWER_RTOL)
    if pooled_power is not None:
        ok_power &= float(pw.sum()) <= pooled_power * (1 + POWER_RTOL)
    gamma_b = backhaul_threshold(gamma, channels.n_ue)
    return SinrReport(g_ue, g_bh, gt, pw, pb, _meets(g_ue, gamma), _meets(g_bh, gamma_b), bool(ok_power))
