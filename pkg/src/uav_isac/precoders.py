"""Closed-form linear precoders and receivers.

Zero-forcing directions project a desired response onto the orthogonal
complement of the channels to be nulled. Channels are row vectors acting as
``h @ w``, so nulling ``h`` means ``w`` orthogonal to ``conj(h)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RANK_RTOL = 1e-10


class DegenerateDirectionError(ValueError):
    """The desired response lies (numerically) inside the nulled subspace."""


@dataclass
class ZfDirection:
    vector: np.ndarray
    nulled: tuple = ()


def null_basis(columns: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the column span, dropping singular values below ``RANK_RTOL * max``."""
    if columns.size == 0 or columns.shape[1] == 0:
        return np.zeros((columns.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(columns, full_matrices=False)
    if s[0] == 0:
        return np.zeros((columns.shape[0], 0), dtype=complex)
    return U[:, s > RANK_RTOL * s[0]]


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so that its first nonzero entry is real and positive."""
    nz = np.flatnonzero(np.abs(v) > 1e-14 * np.abs(v).max())
    if nz.size == 0:
        return v
    a = v[nz[0]]
    return v * (abs(a) / a)


def project_out(desired: np.ndarray, nulled_columns: np.ndarray) -> np.ndarray:
    Q = null_basis(nulled_columns)
    r = desired - Q @ (Q.conj().T @ desired)
    nr = np.linalg.norm(r)
    if nr <= 1e-10 * max(np.linalg.norm(desired), np.finfo(float).tiny):
        raise DegenerateDirectionError("desired response lies in the nulled subspace")
    return canonical_phase(r / nr)


def zf_ue_direction(k: int, j: int, access: np.ndarray) -> ZfDirection:
    """ZF direction from UAV ``k`` toward UE ``j`` nulling every other UE.

    ``access`` is the ``(N_ue, N_Tx, M_U)`` channel array.
    """
    others = [i for i in range(access.shape[0]) if i != j]
    C = access[others, k].conj().T
    return ZfDirection(project_out(access[j, k].conj(), C), tuple(("ue", i) for i in others))


def zf_target_direction(k: int, access: np.ndarray, target_steering: np.ndarray) -> ZfDirection:
    """ZF direction from UAV ``k`` toward the target nulling all UEs.

    ``target_steering`` is ``a(phi_{k,t}, theta_{k,t})``; the sensing output is
    ``a^T w`` so the desired response is its conjugate.
    """
    C = access[:, k].conj().T
    return ZfDirection(project_out(np.asarray(target_steering).conj(), C),
                       tuple(("ue", i) for i in range(access.shape[0])))


def effective_backhaul_channels(backhaul_channels, receivers: np.ndarray) -> np.ndarray:
    """Rows ``h_{k,b} = H_{b,k}^H u_k`` (``N_Tx x M_BS``); link k sees ``h_{k,b}^H w``."""
    return np.array([ch.matrix.conj().T @ u for ch, u in zip(backhaul_channels, receivers)])


def zf_backhaul_direction(k: int, effective: np.ndarray) -> ZfDirection:
    """ZF backhaul precoder for UAV ``k`` against the other UAVs' effective channels."""
    others = [i for i in range(effective.shape[0]) if i != k]
    C = effective[others].T
    return ZfDirection(project_out(effective[k], C), tuple(("uav", i) for i in others))


def dominant_receivers(backhaul_channels) -> np.ndarray:
    """Dominant left singular vector of each ``H_{b,k}``, a deterministic receiver start."""
    out = []
    for ch in backhaul_channels:
        U, _, _ = np.linalg.svd(ch.matrix, full_matrices=False)
        out.append(canonical_phase(U[:, 0]))
    return np.array(out)


def mmse_receiver(k: int, H: np.ndarray, backhaul: np.ndarray, noise: float) -> np.ndarray:
    """MMSE receive beamformer of backhaul link ``k``.

    ``u_k = (H Q_k H^H + noise I)^{-1} H w_{b,k}`` with ``Q_k`` the covariance of
    the precoders intended for the other UAVs.
    """
    if not noise > 0:
        raise ValueError("noise power must be positive")
    others = np.delete(backhaul, k, axis=0)
    Hw = H @ others.T
    C = Hw @ Hw.conj().T + noise * np.eye(H.shape[0])
    return np.linalg.solve(C, H @ backhaul[k])


def heuristic_power_allocation(access: np.ndarray, target_steering: np.ndarray, p_uav,
                               sensing_fraction: float = 0.5) -> np.ndarray:
    """ZF precoders with a fixed power split; returns ``W`` of shape ``(N_Tx, M_U, N_ue+1)``.

    Each UAV gives ``sensing_fraction * P_k`` to its target beam and splits the
    rest equally over its UE beams (all of ``P_k`` to sensing when there are
    no UEs). UE beams are co-phased across UAVs so that every ``h_{j,k} w_{j,k}``
    is real and positive.
    """
    if not 0.0 <= sensing_fraction < 1.0:
        raise ValueError("sensing_fraction must lie in [0, 1)")
    n_ue, n_tx, m_u = access.shape
    p = np.broadcast_to(np.asarray(p_uav, dtype=float), (n_tx,))
    if np.any(p <= 0):
        raise ValueError("power budgets must be positive")
    W = np.zeros((n_tx, m_u, n_ue + 1), dtype=complex)
    for k in range(n_tx):
        p_sense = p[k] if n_ue == 0 else sensing_fraction * p[k]
        p_ue = 0.0 if n_ue == 0 else (p[k] - p_sense) / n_ue
        for j in range(n_ue):
            v = zf_ue_direction(k, j, access).vector
            g = access[j, k] @ v
            if abs(g) > 0:
                v = v * (abs(g) / g)
            W[k, :, j] = np.sqrt(p_ue) * v
        W[k, :, n_ue] = np.sqrt(p_sense) * zf_target_direction(k, access, target_steering[k]).vector
    return W
