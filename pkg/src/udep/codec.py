"""Log-map codec: unitary matrix <-> bounded real coordinate vector.

``encode`` takes the principal logarithm of U and reads off its coordinates
in the orthonormal u(N) basis; ``decode`` rebuilds the skew-Hermitian matrix
and exponentiates it. With the principal branch every coordinate of a
FULL encoding lies in ``[-sqrt(N) pi, sqrt(N) pi]``.

Also hosts the naive ``2 N^2`` real-entry baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .basis import (
    FULL,
    ROTATION,
    CoordVector,
    Kind,
    Variant,
    _block_slices,
    coords_from_skew,
    skew_from_coords,
)
from .errors import BranchDegeneracyError, PreconditionError, ShapeError, StructureError

UNITARY_TOL = 1e-8
STRUCTURE_TOL = 1e-8
BLOCK_TOL = 1e-10


def coefficient_bound(n: int) -> float:
    """Largest possible magnitude of any FULL coordinate: ``sqrt(N) * pi``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(np.sqrt(n) * np.pi)


def _traceless_log(u: np.ndarray) -> np.ndarray:
    """Logarithm of a determinant-one matrix shifted onto a zero-trace branch.

    The principal phases of an SU(N) element sum to ``2 pi m``; moving ``m``
    of the largest phases down by ``2 pi`` (or the smallest up) makes the
    log traceless so that dropping the identity coordinate loses nothing.
    """
    e = linalg.unitary_eig(u, tol=UNITARY_TOL)
    phases = e.phases.copy()
    m = int(np.rint(phases.sum() / (2 * np.pi)))
    order = np.argsort(phases)
    if m > 0:
        phases[order[-m:]] -= 2 * np.pi
    elif m < 0:
        phases[order[:-m]] += 2 * np.pi
    return _log_from_eig(phases, e.eigenvectors)


def _log_from_eig(phases: np.ndarray, v: np.ndarray) -> np.ndarray:
    x = (v * (1j * phases)) @ v.conj().T
    return 0.5 * (x - x.conj().T)


def _check_structure(u: np.ndarray, variant: Variant) -> None:
    kind = variant.kind
    if kind is Kind.SYMMETRIC and np.abs(u - u.T).max() > STRUCTURE_TOL:
        raise StructureError("symmetric variant needs U = U^T")
    if kind is Kind.ROTATION and np.abs(u.imag).max() > STRUCTURE_TOL:
        raise StructureError("rotation variant needs a real matrix")
    if kind is Kind.BLOCK_DIAGONAL:
        n = u.shape[0]
        if sum(variant.blocks) != n:
            raise ShapeError(f"block sizes {variant.blocks} do not sum to {n}")
        mask = np.ones((n, n), dtype=bool)
        for s in _block_slices(variant.blocks):
            mask[s, s] = False
        if mask.any() and np.abs(u[mask]).max() > BLOCK_TOL:
            raise StructureError("matrix has non-zero entries outside its blocks")


def encode(u, variant: Variant = FULL, tol: float = UNITARY_TOL) -> CoordVector:
    """Coordinates of unitary ``u`` under ``variant``.

    SPECIAL_UNITARY first divides out ``det(U)^(1/N)`` (principal root), so
    it reconstructs U only up to that global phase.
    """
    u = linalg.as_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {u.shape}")
    n = u.shape[0]
    defect = linalg.unitarity_defect(u)
    if defect > tol * n:
        raise PreconditionError(f"matrix is not unitary: ||U^H U - I||_F = {defect:.3e}")
    _check_structure(u, variant)
    kind = variant.kind

    if kind is Kind.BLOCK_DIAGONAL:
        parts = [encode(u[s, s], FULL, tol).coords for s in _block_slices(variant.blocks)]
        return CoordVector(n, variant, np.concatenate(parts))

    if kind is Kind.SPECIAL_UNITARY:
        det_phase = np.angle(np.linalg.det(u))
        x = _traceless_log(u * np.exp(-1j * det_phase / n))
        return coords_from_skew(x, variant)

    if kind is Kind.ROTATION:
        e = linalg.unitary_eig(u, tol=tol)
        if np.any(np.abs(e.phases) > np.pi - 1e-9):
            raise BranchDegeneracyError("rotation has an eigenvalue at -1")
        x = _log_from_eig(e.phases, e.eigenvectors)
        return coords_from_skew(x.real.astype(np.complex128), variant)

    x = linalg.matrix_log_unitary(u, tol=tol)
    if kind is Kind.SYMMETRIC:
        # the log of a symmetric unitary is purely imaginary; drop rounding
        if np.abs(x.real).max() > STRUCTURE_TOL:
            raise StructureError("logarithm of input is not purely imaginary")
        x = 1j * x.imag
    return coords_from_skew(x, variant)


def decode(alpha: CoordVector) -> np.ndarray:
    """Unitary matrix for any finite coordinate vector (unitary by construction)."""
    if not np.all(np.isfinite(alpha.coords)):
        raise PreconditionError("coordinates must be finite")
    x = skew_from_coords(alpha)
    if alpha.variant.kind is Kind.BLOCK_DIAGONAL:
        # exp of a block-diagonal matrix, one block at a time keeps the
        # off-block entries exactly zero
        u = np.zeros_like(x)
        for s in _block_slices(alpha.variant.blocks):
            u[s, s] = linalg.matrix_exp_skew(x[s, s])
        return u
    u = linalg.matrix_exp_skew(x)
    if alpha.variant.kind is Kind.ROTATION:
        return u.real.astype(np.complex128)
    return u


@dataclass(frozen=True)
class RotationCode:
    coords: CoordVector
    det_sign: int  # +1 or -1

    def __post_init__(self):
        if self.det_sign not in (1, -1):
            raise ValueError("det_sign must be +1 or -1")


def encode_rotation(o, tol: float = UNITARY_TOL) -> RotationCode:
    """Encode a real orthogonal matrix as rotation coordinates plus a sign bit."""
    o = linalg.as_matrix(o)
    if np.abs(o.imag).max() > 1e-9:
        raise StructureError("orthogonal matrix must be real")
    r = o.real.copy()
    sign = 1 if np.linalg.det(r) > 0 else -1
    if sign < 0:
        r[-1] *= -1
    return RotationCode(encode(r, ROTATION, tol), sign)


def decode_rotation(code: RotationCode) -> np.ndarray:
    u = decode(code.coords)
    if code.det_sign < 0:
        u[-1] *= -1
    return u


def naive_encode(u) -> np.ndarray:
    """Interleaved ``re, im`` entries in row-major order (``2 N^2`` reals)."""
    u = linalg.as_matrix(u)
    return np.stack([u.real, u.imag], axis=-1).reshape(-1)


def naive_decode(v, n: int | None = None, project: bool = False) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if n is None:
        n = int(round(np.sqrt(v.size / 2)))
    if v.size != 2 * n * n:
        raise ShapeError(f"naive payload for N={n} needs {2 * n * n} values")
    u = (v[0::2] + 1j * v[1::2]).reshape(n, n)
    if project:
        return linalg.nearest_unitary(u)
    return u
