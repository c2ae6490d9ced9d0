"""Reconstruction and link metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import PreconditionError, ShapeError


@dataclass(frozen=True)
class PowerAllocation:
    powers: np.ndarray
    total: float


def mse(u, u_hat) -> float:
    """Per-entry squared error ``||U - U_hat||_F^2 / N^2``."""
    u = np.asarray(u, dtype=np.complex128)
    u_hat = np.asarray(u_hat, dtype=np.complex128)
    if u.shape != u_hat.shape:
        raise ShapeError(f"shape mismatch {u.shape} vs {u_hat.shape}")
    return float(np.sum(np.abs(u - u_hat) ** 2) / u.size)


def fidelity(u, u_hat, tol: float = 1e-8) -> float:
    """Phase-insensitive overlap ``|trace(U^H U_hat)| / N`` of two unitaries."""
    u = linalg.as_matrix(u)
    u_hat = linalg.as_matrix(u_hat)
    if u.shape != u_hat.shape:
        raise ShapeError(f"shape mismatch {u.shape} vs {u_hat.shape}")
    n = u.shape[0]
    for m in (u, u_hat):
        if linalg.unitarity_defect(m) > tol * n:
            raise PreconditionError("fidelity is only defined for unitary matrices")
    f = abs(np.vdot(u, u_hat)) / n
    return float(min(f, 1.0))


def waterfilling(gains, total_power: float) -> PowerAllocation:
    """Capacity-optimal powers for parallel channels with gains ``sigma_i^2``.

    Streams are sorted by gain and the weakest is dropped while it would get
    negative power; the water level then follows in closed form.
    """
    g = np.asarray(gains, dtype=np.float64).reshape(-1)
    if g.size == 0:
        raise ValueError("need at least one channel gain")
    if np.any(g <= 0) or total_power <= 0:
        raise ValueError("gains and total power must be positive")
    order = np.argsort(-g, kind="stable")
    inv = 1.0 / g[order]
    active = g.size
    while True:
        level = (total_power + inv[:active].sum()) / active
        if level - inv[active - 1] >= 0 or active == 1:
            break
        active -= 1
    p_sorted = np.zeros_like(g)
    p_sorted[:active] = np.maximum(level - inv[:active], 0.0)
    # remove the rounding drift so the budget is met exactly
    p_sorted[:active] *= total_power / p_sorted[:active].sum()
    powers = np.empty_like(g)
    powers[order] = p_sorted
    return PowerAllocation(powers, float(total_power))


def logdet_capacity(h, snr: float) -> float:
    """``log2 det(I + snr H H^H)`` in bits per channel use."""
    s = np.linalg.svd(np.asarray(h, dtype=np.complex128), compute_uv=False)
    return float(np.sum(np.log2(1.0 + snr * s * s)))


def stream_sinr_rate(h, u_left, v_hat, powers) -> float:
    """Sum of per-stream ``log2(1 + SINR)`` with equalizer ``u_left^H`` and
    precoder ``v_hat diag(sqrt(p))``; off-diagonal terms are interference."""
    h = np.asarray(h, dtype=np.complex128)
    u_left = np.asarray(u_left, dtype=np.complex128)
    v_hat = np.asarray(v_hat, dtype=np.complex128)
    p = np.asarray(powers.powers if isinstance(powers, PowerAllocation) else powers,
                   dtype=np.float64)
    if u_left.shape[0] != h.shape[0] or v_hat.shape[0] != h.shape[1] or v_hat.shape[1] != p.size:
        raise ShapeError("inconsistent dimensions for SINR computation")
    g = u_left.conj().T @ h @ v_hat * np.sqrt(np.maximum(p, 0.0))
    mag = np.abs(g) ** 2
    signal = np.diagonal(mag)
    interference = mag.sum(axis=1) - signal
    return float(np.sum(np.log2(1.0 + signal / (1.0 + interference))))
