"""Givens-rotation parametrization of unitary matrices (baseline codec).

Column ``c = 0 .. N-2`` is processed by

1. removing the phases of entries ``(r, c)``, ``r >= c``, with a diagonal
   phase matrix so the column becomes real and non-negative, then
2. zeroing entries ``(r, c)``, ``r > c``, with real plane rotations of
   angle ``psi = atan2(M[r, c], M[c, c])`` in ``[0, pi/2]``.

Stored quantities are the amplitudes ``cos(psi)`` in ``[0, 1]``, the phases of
rows ``r > c`` (``N(N-1)/2`` rotation phases) and ``N`` diagonal phases: the
phase removed from entry ``(c, c)`` for every column plus the phase left on
the last diagonal entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import PreconditionError, ShapeError


@dataclass
class GivensParams:
    n: int
    amplitudes: np.ndarray = field(repr=False)
    rotation_phases: np.ndarray = field(repr=False)
    diagonal_phases: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = self.n * (self.n - 1) // 2
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.float64).reshape(-1)
        self.rotation_phases = np.asarray(self.rotation_phases, dtype=np.float64).reshape(-1)
        self.diagonal_phases = np.asarray(self.diagonal_phases, dtype=np.float64).reshape(-1)
        if (self.amplitudes.size, self.rotation_phases.size, self.diagonal_phases.size) != (m, m, self.n):
            raise ShapeError(f"Givens parameters for N={self.n} need lengths ({m}, {m}, {self.n})")

    def to_vector(self) -> np.ndarray:
        """Flatten as ``[amplitudes, rotation phases, diagonal phases]`` (N^2 reals)."""
        return np.concatenate([self.amplitudes, self.rotation_phases, self.diagonal_phases])

    @classmethod
    def from_vector(cls, v, n: int) -> "GivensParams":
        v = np.asarray(v, dtype=np.float64).reshape(-1)
        if v.size != n * n:
            raise ShapeError(f"Givens vector for N={n} needs {n * n} values")
        m = n * (n - 1) // 2
        return cls(n, v[:m], v[m:2 * m], v[2 * m:])


def wrap_phase(x):
    """Wrap angles into (-pi, pi]."""
    w = np.mod(np.asarray(x, dtype=np.float64) + np.pi, 2 * np.pi) - np.pi
    return np.where(w <= -np.pi, np.pi, w)


def givens_encode(u, tol: float = 1e-8) -> GivensParams:
    u = linalg.as_matrix(u)
    n = u.shape[0]
    if u.shape != (n, n):
        raise ShapeError(f"expected a square matrix, got shape {u.shape}")
    if linalg.unitarity_defect(u) > tol * n:
        raise PreconditionError("matrix is not unitary")
    m = u.copy()
    amps, rphases, dphases = [], [], []
    for c in range(n - 1):
        ph = np.angle(m[c:, c])
        m[c:] *= np.exp(-1j * ph)[:, None]
        m[c:, c] = np.abs(m[c:, c])
        dphases.append(ph[0])
        rphases.extend(ph[1:])
        for r in range(c + 1, n):
            psi = np.arctan2(m[r, c].real, m[c, c].real)
            cs, sn = np.cos(psi), np.sin(psi)
            rc, rr = m[c].copy(), m[r].copy()
            m[c] = cs * rc + sn * rr
            m[r] = -sn * rc + cs * rr
            m[r, c] = 0.0
            amps.append(cs)
    dphases.append(np.angle(m[n - 1, n - 1]))
    return GivensParams(n, amps, wrap_phase(rphases), wrap_phase(dphases))


def givens_decode(p: GivensParams) -> np.ndarray:
    """Rebuild the unitary matrix; amplitudes are clamped to [0, 1] and phases
    wrapped first, so any finite input yields a unitary output."""
    n = p.n
    amps = np.clip(p.amplitudes, 0.0, 1.0)
    rph = wrap_phase(p.rotation_phases)
    dph = wrap_phase(p.diagonal_phases)
    m = np.eye(n, dtype=np.complex128)
    m[n - 1, n - 1] = np.exp(1j * dph[n - 1])
    a = len(amps)
    rp = len(rph)
    for c in range(n - 2, -1, -1):
        k = n - 1 - c
        col_amps = amps[a - k:a]
        col_ph = rph[rp - k:rp]
        a -= k
        rp -= k
        for r in range(n - 1, c, -1):
            cs = col_amps[r - c - 1]
            sn = np.sqrt(max(0.0, 1.0 - cs * cs))
            rc, rr = m[c].copy(), m[r].copy()
            m[c] = cs * rc - sn * rr
            m[r] = sn * rc + cs * rr
        phases = np.concatenate([[dph[c]], col_ph])
        m[c:] *= np.exp(1j * phases)[:, None]
    return m
