"""Seeded stochastic channel generation.

Three link families are modelled:

* mmWave backhaul BS -> transmit UAV (Saleh-Valenzuela sum of paths between
  two ULAs, log-distance path loss with shadowing per link type),
* air-to-ground access UAV -> UE (Rician fading on the UAV's downward UPA,
  elevation-dependent LoS probability and Rician factor),
* bistatic sensing UAV -> target -> receive UAV (deterministic steering
  vectors and radar-equation path gain, Swerling-I RCS).

Every random draw comes from an explicit ``numpy.random.Generator``. Drop-level
realizations derive one independent stream per link from ``(seed, tag, ...)``
so that moving a UAV only changes the geometry-dependent terms of its links
while the fading draws stay put.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    AngleSet,
    NetworkLayout,
    angles_between,
    distance,
    ground_range,
    ula_angle,
    ula_steering,
    upa_steering,
)

# stream tags for SeedSequence spawn keys
TAG_ACCESS = 1
TAG_BACKHAUL = 2
TAG_UE_DROP = 3
TAG_SYMBOLS = 4
TAG_SENSING_SYMBOLS = 5
TAG_PSO = 6
TAG_ECHO = 7
TAG_INIT = 8


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``seed`` and a tuple of integer stream ids."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def complex_normal(rng: np.random.Generator, size, variance: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with the given variance."""
    scale = np.sqrt(variance / 2.0)
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return scale * (re + 1j * im)


@dataclass(frozen=True)
class PropagationParams:
    """Propagation constants for all three link families.

    Attenuation factors ``eta_*`` are given in dB. Noise powers are derived
    from the thermal density and the per-link bandwidth.
    """

    wavelength_access: float = 0.125
    backhaul_carrier_hz: float = 28e9
    pathloss_exponent: float = 2.0
    eta_los_db: float = 1.0
    eta_nlos_db: float = 20.0
    los_rho: float = 9.61
    los_omega: float = 0.16
    rician_a1: float = 1.0
    rician_a2: float = 2.0 / np.pi * np.log(1000.0)
    mmw_a_los: float = 61.4
    mmw_b_los: float = 2.0
    mmw_sigma_los: float = 5.8
    mmw_a_nlos: float = 72.0
    mmw_b_nlos: float = 2.92
    mmw_sigma_nlos: float = 8.7
    n_nlos_paths: int = 4
    noise_density_dbm_hz: float = -174.0
    bandwidth_access_hz: float = 10e6
    bandwidth_backhaul_hz: float = 100e6
    rcs_variance: float = 1.0

    def __post_init__(self):
        positive = ["wavelength_access", "backhaul_carrier_hz", "pathloss_exponent", "los_rho",
                    "los_omega", "rician_a1", "bandwidth_access_hz", "bandwidth_backhaul_hz",
                    "rcs_variance"]
        bad = [name for name in positive if not getattr(self, name) > 0]
        if self.n_nlos_paths < 0:
            bad.append("n_nlos_paths")
        if self.mmw_sigma_los < 0 or self.mmw_sigma_nlos < 0:
            bad.append("mmw_sigma")
        if bad:
            raise ValueError(f"invalid propagation parameters: {', '.join(bad)}")

    @property
    def eta_los(self) -> float:
        return 10.0 ** (self.eta_los_db / 10.0)

    @property
    def eta_nlos(self) -> float:
        return 10.0 ** (self.eta_nlos_db / 10.0)

    @property
    def noise_access_w(self) -> float:
        return 10.0 ** ((self.noise_density_dbm_hz - 30.0) / 10.0) * self.bandwidth_access_hz

    @property
    def noise_backhaul_w(self) -> float:
        return 10.0 ** ((self.noise_density_dbm_hz - 30.0) / 10.0) * self.bandwidth_backhaul_hz


@dataclass(frozen=True)
class ArrayShape:
    """Antenna counts: the UAV UPA is ``upa[0] x upa[1]``; ULAs at UAV and BS."""

    upa: tuple = (16, 16)
    m_ub: int = 256
    m_bs: int = 256

    @property
    def m_u(self) -> int:
        return int(self.upa[0] * self.upa[1])


# ---------------------------------------------------------------------------
# air-to-ground access link
# ---------------------------------------------------------------------------

def los_probability(uav_z: float, ground_dist: float, rho: float = 9.61, omega: float = 0.16) -> float:
    """Sigmoid LoS probability in the elevation angle (degrees)."""
    theta_deg = np.degrees(np.arctan2(uav_z, ground_dist))
    return float(1.0 / (1.0 + rho * np.exp(-omega * (theta_deg - rho))))


def a2g_path_loss(d: float, p_los: float, wavelength: float, exponent: float = 2.0,
                  eta_los: float = 1.0, eta_nlos: float = 1.0) -> float:
    """Average air-to-ground attenuation (linear, >= 1 in the far field).

    ``eta_los``/``eta_nlos`` are linear factors. The channel amplitude is
    scaled by ``1/sqrt(alpha)``.
    """
    if not d > 0:
        raise ValueError("distance must be positive")
    fspl = (4.0 * np.pi * d / wavelength) ** exponent
    return float(fspl * (p_los * eta_los + (1.0 - p_los) * eta_nlos))


def rician_factor(elevation: float, a1: float = 1.0, a2: float = 2.0 / np.pi * np.log(1000.0)) -> float:
    return float(a1 * np.exp(a2 * elevation))


@dataclass
class AccessChannel:
    vector: np.ndarray
    small_scale: np.ndarray
    path_loss_linear: float
    rician_k: float
    los_prob: float


def access_channel_from_draw(nlos: np.ndarray, uav, ue, params: PropagationParams,
                             upa: tuple) -> AccessChannel:
    """Deterministic part of the access channel given a fixed NLoS draw."""
    ang = angles_between(ue, uav)
    p_los = los_probability(float(np.asarray(uav)[2]) - float(np.asarray(ue)[2]), ground_range(uav, ue),
                            params.los_rho, params.los_omega)
    alpha = a2g_path_loss(distance(uav, ue), p_los, params.wavelength_access, params.pathloss_exponent,
                          params.eta_los, params.eta_nlos)
    k = rician_factor(max(ang.elevation, 0.0), params.rician_a1, params.rician_a2)
    if np.isinf(k):
        hbar = upa_steering(upa[0], upa[1], ang).astype(complex)
    else:
        hbar = np.sqrt(k / (k + 1.0)) * upa_steering(upa[0], upa[1], ang) + np.sqrt(1.0 / (k + 1.0)) * nlos
    return AccessChannel(hbar / np.sqrt(alpha), hbar, alpha, k, p_los)


def sample_access_channel(rng: np.random.Generator, uav, ue, params: PropagationParams,
                          upa: tuple = (16, 16)) -> AccessChannel:
    """Rician access channel from a UAV's UPA to a single-antenna UE.

    The LoS component is the UPA steering vector toward the UE and the NLoS
    entries are i.i.d. CN(0, 1); the row vector ``h`` acts on a precoder as
    ``h @ w``.
    """
    nlos = complex_normal(rng, upa[0] * upa[1])
    return access_channel_from_draw(nlos, uav, ue, params, upa)


# ---------------------------------------------------------------------------
# mmWave backhaul
# ---------------------------------------------------------------------------

def mmwave_path_loss_db(rng: np.random.Generator | None, d: float, link: str,
                        params: PropagationParams = PropagationParams(), shadowing: float | None = None) -> float:
    """Log-distance path loss in dB with Gaussian shadowing.

    ``link`` is ``"los"`` or ``"nlos"``. A standard-normal ``shadowing`` value
    can be supplied instead of drawing one from ``rng``.
    """
    if not d > 0:
        raise ValueError("distance must be positive")
    if link == "los":
        a, b, sigma = params.mmw_a_los, params.mmw_b_los, params.mmw_sigma_los
    elif link == "nlos":
        a, b, sigma = params.mmw_a_nlos, params.mmw_b_nlos, params.mmw_sigma_nlos
    else:
        raise ValueError(f"unknown link type {link!r}")
    if shadowing is None:
        shadowing = rng.standard_normal() if rng is not None else 0.0
    return float(a + 10.0 * b * np.log10(d) + sigma * shadowing)


@dataclass
class BackhaulChannel:
    """Saleh-Valenzuela backhaul matrix (M_UB x M_BS) and the paths it is built from.

    Path 0 is the LoS path. ``aoa``/``aod`` are ULA angles at the UAV and the
    BS respectively.
    """

    matrix: np.ndarray
    gains: np.ndarray
    aoa: np.ndarray
    aod: np.ndarray
    path_loss_db: np.ndarray

    @property
    def n_paths(self) -> int:
        return len(self.gains)

    def reconstruct(self) -> np.ndarray:
        return sv_matrix(self.gains, self.aoa, self.aod, self.matrix.shape[0], self.matrix.shape[1])


def sv_matrix(gains, aoa, aod, m_ub: int, m_bs: int) -> np.ndarray:
    # normalized steering vectors and 1/(L+1) so that E||H||_F^2 = M_UB M_BS mean(path power)
    n_paths = len(gains)
    h = np.zeros((m_ub, m_bs), dtype=complex)
    for g, phi, varphi in zip(gains, aoa, aod):
        ar = ula_steering(m_ub, phi) / np.sqrt(m_ub)
        at = ula_steering(m_bs, varphi) / np.sqrt(m_bs)
        h += g * np.outer(ar, at.conj())
    return np.sqrt(m_ub * m_bs / n_paths) * h


def backhaul_channel_from_draw(draw: dict, bs, uav, params: PropagationParams,
                               m_ub: int, m_bs: int) -> BackhaulChannel:
    d = distance(bs, uav)
    n_nlos = len(draw["aoa"])
    pl = np.empty(n_nlos + 1)
    pl[0] = mmwave_path_loss_db(None, d, "los", params, draw["shadowing"][0])
    pl[1:] = mmwave_path_loss_db(None, d, "nlos", params, draw["shadowing"][1])
    gains = draw["gains"] * np.sqrt(10.0 ** (-pl / 10.0))
    aoa = np.concatenate([[ula_angle(uav, bs)], draw["aoa"]])
    aod = np.concatenate([[ula_angle(bs, uav)], draw["aod"]])
    return BackhaulChannel(sv_matrix(gains, aoa, aod, m_ub, m_bs), gains, aoa, aod, pl)


def draw_backhaul(rng: np.random.Generator, n_nlos: int) -> dict:
    shadowing = rng.standard_normal(2)
    gains = complex_normal(rng, n_nlos + 1)
    aoa = np.pi - 2.0 * np.pi * rng.random(n_nlos)
    aod = np.pi - 2.0 * np.pi * rng.random(n_nlos)
    return {"shadowing": shadowing, "gains": gains, "aoa": aoa, "aod": aod}


def sample_backhaul_channel(rng: np.random.Generator, bs, uav, params: PropagationParams,
                            m_ub: int = 256, m_bs: int = 256) -> BackhaulChannel:
    """One Saleh-Valenzuela draw with ``params.n_nlos_paths`` NLoS paths.

    Path gains are CN(0, 10^(-PL_p/10)); the LoS path uses the geometric
    angles, NLoS angles are uniform over (-pi, pi].
    """
    return backhaul_channel_from_draw(draw_backhaul(rng, params.n_nlos_paths), bs, uav, params, m_ub, m_bs)


# ---------------------------------------------------------------------------
# sensing
# ---------------------------------------------------------------------------

def sensing_path_gain(d_tk: float, d_rt: float, wavelength: float) -> float:
    """Bistatic radar-equation gain ``lambda^2 / ((4 pi)^3 d_tk^2 d_rt^2)``."""
    if not (d_tk > 0 and d_rt > 0):
        raise ValueError("distances must be positive")
    return float(wavelength ** 2 / ((4.0 * np.pi) ** 3 * d_tk ** 2 * d_rt ** 2))


def sample_rcs(rng: np.random.Generator, variance: float = 1.0, size=None):
    """Swerling-I radar cross-section draw, CN(0, variance)."""
    if not variance > 0:
        raise ValueError("RCS variance must be positive")
    out = complex_normal(rng, 1 if size is None else size, variance)
    return complex(out[0]) if size is None else out


@dataclass
class SensingGeometry:
    """Target-facing steering vectors, distances and bistatic gains.

    ``tx_steering[k]`` is the UPA response of transmit UAV ``k`` toward the
    target, ``rx_steering`` the response of the receive UAV.
    """

    tx_steering: np.ndarray
    rx_steering: np.ndarray
    path_gain: np.ndarray
    d_kt: np.ndarray
    d_rt: float
    wavelength: float

    @property
    def n_tx(self) -> int:
        return self.tx_steering.shape[0]


def sensing_geometry(layout: NetworkLayout, upa: tuple, wavelength: float) -> SensingGeometry:
    tx = np.array([upa_steering(upa[0], upa[1], angles_between(layout.target, r)) for r in layout.uavs])
    rx = upa_steering(upa[0], upa[1], angles_between(layout.target, layout.rx_uav))
    d_kt = np.array([distance(r, layout.target) for r in layout.uavs])
    d_rt = distance(layout.rx_uav, layout.target)
    gain = np.array([sensing_path_gain(d, d_rt, wavelength) for d in d_kt])
    return SensingGeometry(tx.reshape(layout.n_tx, -1), rx, gain, d_kt, d_rt, wavelength)


# ---------------------------------------------------------------------------
# full drop
# ---------------------------------------------------------------------------

@dataclass
class ChannelRealization:
    """All channels of one drop.

    ``access[j, k]`` is the row vector from UAV ``k`` to UE ``j``; ``backhaul``
    is empty for wired (tethered) deployments.
    """

    access: np.ndarray
    access_pathloss: np.ndarray
    rician_k: np.ndarray
    los_prob: np.ndarray
    backhaul: list
    sensing: SensingGeometry
    noise_ue: float
    noise_backhaul: float
    noise_rx: float
    arrays: ArrayShape = field(default_factory=ArrayShape)

    @property
    def n_tx(self) -> int:
        return self.access.shape[1]

    @property
    def n_ue(self) -> int:
        return self.access.shape[0]

    @property
    def m_u(self) -> int:
        return self.access.shape[2]

    def stacked_access(self) -> np.ndarray:
        """``(n_ue, n_tx*m_u)`` matrix whose row j is ``[h_{j,1}, ..., h_{j,N_Tx}]``."""
        return self.access.reshape(self.n_ue, -1)


def realize_channels(layout: NetworkLayout, params: PropagationParams, arrays: ArrayShape, seed: int,
                     with_backhaul: bool = True) -> ChannelRealization:
    """Generate every channel of a drop from per-link streams of ``seed``.

    Access link ``(j, k)`` uses stream ``(TAG_ACCESS, j, k)`` and backhaul link
    ``k`` stream ``(TAG_BACKHAUL, k)``, so re-running with moved UAVs reuses
    the same fading draws.
    """
    n_tx, n_ue, m_u = layout.n_tx, layout.n_ue, arrays.m_u
    access = np.zeros((n_ue, n_tx, m_u), dtype=complex)
    pl = np.zeros((n_ue, n_tx))
    kf = np.zeros((n_ue, n_tx))
    plos = np.zeros((n_ue, n_tx))
    for j in range(n_ue):
        for k in range(n_tx):
            ch = sample_access_channel(stream(seed, TAG_ACCESS, j, k), layout.uavs[k], layout.ues[j],
                                       params, arrays.upa)
            access[j, k] = ch.vector
            pl[j, k], kf[j, k], plos[j, k] = ch.path_loss_linear, ch.rician_k, ch.los_prob
    backhaul = []
    if with_backhaul:
        backhaul = [sample_backhaul_channel(stream(seed, TAG_BACKHAUL, k), layout.bs, layout.uavs[k], params,
                                            arrays.m_ub, arrays.m_bs) for k in range(n_tx)]
    sensing = sensing_geometry(layout, arrays.upa, params.wavelength_access)
    return ChannelRealization(access, pl, kf, plos, backhaul, sensing, params.noise_access_w,
                              params.noise_backhaul_w, params.noise_access_w, arrays)

