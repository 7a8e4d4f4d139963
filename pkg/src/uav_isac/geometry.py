"""Positions, angles and antenna-array steering vectors.

Positions are plain ``numpy`` arrays of shape ``(3,)`` holding ``(x, y, z)``
in meters. Steering vectors carry unit-magnitude entries; any array-gain
normalization is applied by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class AngleSet(NamedTuple):
    """Azimuth in (-pi, pi] and elevation in [-pi/2, pi/2], radians."""

    azimuth: float
    elevation: float


class CoincidentPointsError(ValueError):
    """Raised when a direction is requested between two identical points."""


def as_position(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float).reshape(3)
    return arr


def distance(p, q) -> float:
    """Euclidean distance between two 3D points."""
    return float(np.linalg.norm(as_position(p) - as_position(q)))


def ground_range(uav, ue) -> float:
    """Horizontal distance between ``ue`` and the ground projection of ``uav``."""
    d = as_position(uav)[:2] - as_position(ue)[:2]
    return float(np.hypot(d[0], d[1]))


def angles_between(src, dst) -> AngleSet:
    """Azimuth/elevation of ``dst`` as seen from ``src``.

    The azimuth of a point straight above (or below) ``src`` is 0.
    """
    delta = as_position(dst) - as_position(src)
    rho = float(np.hypot(delta[0], delta[1]))
    if rho == 0.0 and delta[2] == 0.0:
        raise CoincidentPointsError("angles undefined between coincident points")
    azimuth = float(np.arctan2(delta[1], delta[0])) if rho > 0.0 else 0.0
    if azimuth == -np.pi:
        azimuth = np.pi
    elevation = float(np.arctan2(delta[2], rho))
    return AngleSet(azimuth, elevation)


def direction_from_angles(a: AngleSet) -> np.ndarray:
    """Unit vector pointing along ``a``."""
    ce = np.cos(a.elevation)
    return np.array([ce * np.cos(a.azimuth), ce * np.sin(a.azimuth), np.sin(a.elevation)])


def ula_steering(m_elems: int, angle: float) -> np.ndarray:
    """Half-wavelength ULA response, ``exp(i*pi*m*sin(angle))`` for m = 0..M-1."""
    if m_elems < 1:
        raise ValueError("m_elems must be >= 1")
    m = np.arange(m_elems)
    return np.exp(1j * np.pi * m * np.sin(angle))


def upa_steering(mx: int, my: int, a: AngleSet) -> np.ndarray:
    """Half-wavelength square/rectangular UPA response for a downward-facing array.

    Element ``(p, q)`` has phase ``pi*(p*u + q*v)`` with direction cosines
    ``u = cos(el)cos(az)`` and ``v = cos(el)sin(az)``. The returned vector is
    flattened with the x-index ``p`` running fastest, i.e. entry ``q*mx + p``.
    """
    if mx < 1 or my < 1:
        raise ValueError("array dimensions must be >= 1")
    u = np.cos(a.elevation) * np.cos(a.azimuth)
    v = np.cos(a.elevation) * np.sin(a.azimuth)
    p = np.arange(mx)
    q = np.arange(my)
    phase = np.pi * (p[None, :] * u + q[:, None] * v)
    return np.exp(1j * phase).reshape(-1)


def ula_angle(src, dst) -> float:
    """Angle off broadside of ``dst`` seen by an x-axis ULA located at ``src``.

    Returned so that ``sin(angle)`` equals the direction cosine along the
    array axis, which is what :func:`ula_steering` expects.
    """
    delta = as_position(dst) - as_position(src)
    norm = np.linalg.norm(delta)
    if norm == 0.0:
        raise CoincidentPointsError("angles undefined between coincident points")
    return float(np.arcsin(np.clip(delta[0] / norm, -1.0, 1.0)))


@dataclass
class NetworkLayout:
    """Node coordinates of one deployment.

    ``uavs`` has shape ``(n_tx, 3)`` and ``ues`` shape ``(n_ue, 3)``.
    ``r_min``/``r_max`` bound the transmit-UAV positions component-wise.
    """

    bs: np.ndarray
    uavs: np.ndarray
    rx_uav: np.ndarray
    ues: np.ndarray
    target: np.ndarray
    r_min: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 20.0]))
    r_max: np.ndarray = field(default_factory=lambda: np.array([500.0, 500.0, 200.0]))

    def __post_init__(self):
        self.bs = as_position(self.bs)
        self.rx_uav = as_position(self.rx_uav)
        self.target = as_position(self.target)
        self.uavs = np.asarray(self.uavs, dtype=float).reshape(-1, 3)
        self.ues = np.asarray(self.ues, dtype=float).reshape(-1, 3)
        self.r_min = as_position(self.r_min)
        self.r_max = as_position(self.r_max)
        nodes = np.vstack([self.bs, self.uavs, self.rx_uav, self.ues, self.target])
        if np.any(nodes[:, 2] < 0):
            raise ValueError("all nodes must have z >= 0")

    @property
    def n_tx(self) -> int:
        return self.uavs.shape[0]

    @property
    def n_ue(self) -> int:
        return self.ues.shape[0]

    def with_uavs(self, uavs) -> "NetworkLayout":
        return NetworkLayout(self.bs, np.array(uavs, dtype=float).reshape(-1, 3), self.rx_uav,
                             self.ues, self.target, self.r_min, self.r_max)

    def min_uav_separation(self) -> float:
        if self.n_tx < 2:
            return np.inf
        diff = self.uavs[:, None, :] - self.uavs[None, :, :]
        d = np.linalg.norm(diff, axis=-1)
        return float(d[np.triu_indices(self.n_tx, 1)].min())
