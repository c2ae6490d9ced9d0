"""Dense complex linear algebra for unitary and skew-Hermitian matrices.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
The only genuinely iterative pieces are the Hermitian eigensolvers; the
unitary-specific routines (eigendecomposition, logarithm, exponential) are
built on top of :func:`hermitian_eig`. When the joint diagonalization of a
unitary leaves a residual above ``SCHUR_FALLBACK_TOL * N`` (near-degenerate
spectra), :func:`unitary_eig` falls back to a complex Schur form, which is
diagonal for a normal matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceError,
    DegenerateProjectionError,
    PreconditionError,
    ShapeError,
)

#: Eigenvalues of ``(U + U^H)/2`` closer than this are treated as one cluster.
EIG_CLUSTER_TOL = 1e-8

#: Residual (per unit of N) above which unitary_eig switches to a Schur form.
SCHUR_FALLBACK_TOL = 1e-12

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 40


@dataclass(frozen=True)
class HermitianEig:
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # columns


@dataclass(frozen=True)
class UnitaryEig:
    phases: np.ndarray  # each in (-pi, pi]
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class SvdResult:
    left: np.ndarray
    singulars: np.ndarray  # non-increasing
    right: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-D complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise PreconditionError("matrix has non-finite entries")
    return m


def _square(a) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    return m


def unitarity_defect(a) -> float:
    """Frobenius norm of ``A^H A - I``."""
    m = _square(a)
    return float(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0])))


def _check_unitary(u: np.ndarray, tol: float) -> None:
    defect = unitarity_defect(u)
    if defect > tol * u.shape[0]:
        raise PreconditionError(
            f"matrix is not unitary: ||U^H U - I||_F = {defect:.3e}"
        )


def jacobi_eigh(a, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Each 2x2 pivot block is first made real symmetric by a diagonal phase
    and then annihilated with a real plane rotation. Returns
    ``(eigenvalues, eigenvectors)`` with eigenvalues ascending.
    """
    a = np.array(a, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        w = a.diagonal().real.copy()
        order = np.argsort(w, kind="stable")
        return w[order], v[:, order]

    def off_norm():
        return np.linalg.norm(a - np.diag(a.diagonal()))

    for _ in range(max_sweeps):
        if off_norm() <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                c = a[p, q]
                r = abs(c)
                if r <= 1e-300:
                    continue
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                cs = 1.0 / np.hypot(1.0, t)
                sn = t * cs
                ph = c / r
                # W = diag(1, conj(ph)) @ [[cs, sn], [-sn, cs]]
                w = np.array([[cs, sn], [-sn * np.conj(ph), cs * np.conj(ph)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ w
                a[idx, :] = w.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ w
    else:
        if off_norm() > tol * scale:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")

    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_eig(a, method: str = "lapack") -> HermitianEig:
    """Spectral decomposition of a Hermitian matrix, eigenvalues ascending.

    ``method`` is ``"lapack"`` (``numpy.linalg.eigh``) or ``"jacobi"``.
    """
    m = _square(a)
    scale = np.linalg.norm(m)
    if np.linalg.norm(m - m.conj().T) > 1e-10 * scale:
        raise PreconditionError("matrix is not Hermitian")
    if method == "lapack":
        w, v = np.linalg.eigh(m)
    elif method == "jacobi":
        w, v = jacobi_eigh(m)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return HermitianEig(w, v)


def _clusters(values: np.ndarray, tol: float):
    """Split sorted ``values`` into runs whose consecutive gaps are <= tol."""
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            yield start, i
            start = i


def _refine_clusters(vecs, values, mats, tol, method) -> None:
    """Rotate ``vecs`` in place inside every cluster of ``values``.

    Each cluster's columns are re-diagonalized against ``mats[0]``; the
    resulting sub-clusters recurse on ``mats[1:]``. This separates conjugate
    pairs (equal cosine) and then pairs straddling +-pi/2 (equal sine).
    """
    if not mats:
        return
    for lo, hi in _clusters(values, tol):
        if hi - lo == 1:
            continue
        block = vecs[:, lo:hi]
        mb = block.conj().T @ mats[0] @ block
        e = hermitian_eig(0.5 * (mb + mb.conj().T), method)
        sub = block @ e.eigenvectors
        _refine_clusters(sub, e.eigenvalues, mats[1:], tol, method)
        vecs[:, lo:hi] = sub


def unitary_eig(u, tol: float = 1e-8, cluster_tol: float = EIG_CLUSTER_TOL,
                method: str = "lapack") -> UnitaryEig:
    """Eigendecomposition ``U = V diag(exp(j*phases)) V^H`` of a unitary matrix.

    Uses the commuting Hermitian pair ``H = (U + U^H)/2`` and
    ``K = (U - U^H)/(2j)``: ``H`` is diagonalized, and inside every cluster
    of (nearly) equal eigenvalues of ``H`` the compressed ``K`` block is
    diagonalized to separate conjugate eigenvalue pairs. Phases lie in the
    principal interval (-pi, pi]; an eigenvalue of -1 gives +pi.
    """
    u = _square(u)
    _check_unitary(u, tol)
    h = 0.5 * (u + u.conj().T)
    k = -0.5j * (u - u.conj().T)
    eh = hermitian_eig(h, method)
    vecs = eh.eigenvectors.copy()
    _refine_clusters(vecs, eh.eigenvalues, [k, h], cluster_tol, method)
    # Rayleigh quotients give the phases of the joint eigenvectors.
    z = np.einsum("ij,ik,kj->j", vecs.conj(), u, vecs)
    phases = np.angle(z)
    residual = np.linalg.norm((vecs * np.exp(1j * phases)) @ vecs.conj().T - u)
    if residual > SCHUR_FALLBACK_TOL * u.shape[0]:
        # Near-flat points of cos/sin (eigenvalues close to +-1 or +-j in
        # mirrored pairs) leave the Hermitian pair ill-conditioned there.
        t, vecs = scipy.linalg.schur(u, output="complex")
        phases = np.angle(t.diagonal())
    # np.angle maps -1 (with a -0.0 imaginary part) to -pi; use +pi instead.
    phases[phases <= -np.pi] = np.pi
    return UnitaryEig(phases, vecs)


def matrix_log_unitary(u, tol: float = 1e-8, method: str = "lapack") -> np.ndarray:
    """Principal matrix logarithm of a unitary matrix (skew-Hermitian result)."""
    e = unitary_eig(u, tol=tol, method=method)
    v = e.eigenvectors
    x = (v * (1j * e.phases)) @ v.conj().T
    return 0.5 * (x - x.conj().T)


def matrix_exp_skew(x, method: str = "lapack") -> np.ndarray:
    """Exponential of a skew-Hermitian matrix; the result is unitary."""
    x = _square(x)
    scale = np.linalg.norm(x)
    if scale == 0.0:
        return np.eye(x.shape[0], dtype=np.complex128)
    if np.linalg.norm(x + x.conj().T) > 1e-9 * scale:
        raise PreconditionError("matrix is not skew-Hermitian")
    # X = jA with A Hermitian, so exp(X) = V diag(exp(j*w)) V^H.
    a = -1j * x
    a = 0.5 * (a + a.conj().T)
    e = hermitian_eig(a, method)
    v = e.eigenvectors
    return (v * np.exp(1j * e.eigenvalues)) @ v.conj().T


def svd(a) -> SvdResult:
    """Thin SVD ``A = L diag(s) R^H`` with non-increasing singular values."""
    m = as_matrix(a)
    left, s, rh = np.linalg.svd(m, full_matrices=False)
    return SvdResult(left, s, rh.conj().T)


def nearest_unitary(a) -> np.ndarray:
    """Frobenius-closest unitary matrix to ``A`` (the polar factor ``L R^H``)."""
    m = _square(a)
    r = svd(m)
    if r.singulars[-1] < 1e-12 * r.singulars[0] or r.singulars[0] == 0.0:
        raise DegenerateProjectionError("matrix is rank deficient")
    return r.left @ r.right.conj().T


def complex_gaussian(shape, rng: np.random.Generator) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with unit variance."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed ``n x n`` unitary (QR with R-diagonal phase fix)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    q, r = np.linalg.qr(complex_gaussian((n, n), rng))
    d = r.diagonal()
    ph = d / np.abs(d)
    return q * ph


def read_matrix(text: str) -> np.ndarray:
    """Parse the matrix text format: ``rows cols`` then interleaved re/im rows."""
    from .errors import FormatError

    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty", "matrix file is empty")
    try:
        rows, cols = (int(t) for t in lines[0].split())
    except ValueError:
        raise FormatError("bad-header", "first line must be 'rows cols'") from None
    if rows < 1 or cols < 1:
        raise FormatError("bad-header", "rows and cols must be positive")
    if len(lines) != rows + 1:
        raise FormatError("bad-rows", f"expected {rows} data lines, got {len(lines) - 1}")
    out = np.empty((rows, cols), dtype=np.complex128)
    for i, ln in enumerate(lines[1:]):
        try:
            vals = [float(t) for t in ln.split()]
        except ValueError:
            raise FormatError("bad-number", f"row {i + 1} has a non-numeric entry") from None
        if len(vals) != 2 * cols:
            raise FormatError("bad-row", f"row {i + 1} needs {2 * cols} numbers")
        out[i] = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
    if not np.all(np.isfinite(out)):
        raise FormatError("bad-number", "matrix has non-finite entries")
    return out


def write_matrix(a) -> str:
    m = as_matrix(a)
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    for row in m:
        lines.append(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row))
    return "\n".join(lines) + "\n"
