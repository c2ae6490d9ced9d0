"""Orthonormal basis of the skew-Hermitian matrices u(N) and coordinate maps.

Basis ordering (1-based ``n``, frozen as part of the wire format):

* ``n = 1``: ``(j/sqrt(N)) I``
* ``n = 2..N``: ``(j/sqrt(n(n-1))) (E_11 + ... + E_{n-1,n-1} - (n-1) E_nn)``
* next ``N(N-1)/2``: ``(j/sqrt(2)) (E_kl + E_lk)``, pairs ``k < l`` row-major
* last ``N(N-1)/2``: ``(1/sqrt(2)) (E_kl - E_lk)``, same pair order

Coordinates are always computed with O(N^2) closed forms; the N^2 x N^2
change-of-basis matrix is only built by :func:`basis_matrix` for testing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, StructureError


class Kind(enum.IntEnum):
    # values double as the UDEP variant byte
    FULL = 0
    SPECIAL_UNITARY = 1
    SYMMETRIC = 2
    ROTATION = 3
    BLOCK_DIAGONAL = 4


@dataclass(frozen=True)
class Variant:
    kind: Kind
    blocks: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind is Kind.BLOCK_DIAGONAL:
            if not self.blocks or any(b < 1 for b in self.blocks):
                raise ValueError("block sizes must be positive and non-empty")
        elif self.blocks:
            raise ValueError("only BLOCK_DIAGONAL variants carry block sizes")

    @classmethod
    def block_diagonal(cls, sizes) -> "Variant":
        return cls(Kind.BLOCK_DIAGONAL, tuple(int(s) for s in sizes))

    @classmethod
    def parse(cls, text: str) -> "Variant":
        """Parse ``full``, ``su``, ``symmetric``, ``rotation`` or ``block:4,4``."""
        t = text.strip().lower()
        if t.startswith("block:"):
            try:
                return cls.block_diagonal(int(s) for s in t[6:].split(","))
            except ValueError:
                raise ValueError(f"bad block list in {text!r}") from None
        names = {
            "full": Kind.FULL,
            "su": Kind.SPECIAL_UNITARY,
            "special-unitary": Kind.SPECIAL_UNITARY,
            "symmetric": Kind.SYMMETRIC,
            "rotation": Kind.ROTATION,
        }
        if t not in names:
            raise ValueError(f"unknown variant {text!r}")
        return cls(names[t])

    def __str__(self):
        if self.kind is Kind.BLOCK_DIAGONAL:
            return "block:" + ",".join(map(str, self.blocks))
        return {
            Kind.FULL: "full",
            Kind.SPECIAL_UNITARY: "su",
            Kind.SYMMETRIC: "symmetric",
            Kind.ROTATION: "rotation",
        }[self.kind]


FULL = Variant(Kind.FULL)
SPECIAL_UNITARY = Variant(Kind.SPECIAL_UNITARY)
SYMMETRIC = Variant(Kind.SYMMETRIC)
ROTATION = Variant(Kind.ROTATION)


def dims(variant: Variant, n: int) -> int:
    """Number of real coordinates used by ``variant`` for ``n x n`` matrices."""
    k = variant.kind
    if k is Kind.FULL:
        return n * n
    if k is Kind.SPECIAL_UNITARY:
        return n * n - 1
    if k is Kind.SYMMETRIC:
        return n * (n + 1) // 2
    if k is Kind.ROTATION:
        return n * (n - 1) // 2
    if sum(variant.blocks) != n:
        raise ShapeError(f"block sizes {variant.blocks} do not sum to {n}")
    return sum(b * b for b in variant.blocks)


@dataclass
class CoordVector:
    n: int
    variant: Variant
    coords: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=np.float64).reshape(-1)
        expected = dims(self.variant, self.n)
        if self.coords.size != expected:
            raise ShapeError(
                f"{self.variant} with N={self.n} needs {expected} coordinates, "
                f"got {self.coords.size}"
            )

    def __eq__(self, other):
        if not isinstance(other, CoordVector):
            return NotImplemented
        return (self.n == other.n and self.variant == other.variant
                and np.array_equal(self.coords, other.coords))


def pair_of_index(n: int, size: int) -> tuple[int, int]:
    """1-based ``n`` -> 1-based pair ``(k, l)``, ``k < l``, in row-major order."""
    total = size * (size - 1) // 2
    if not 1 <= n <= total:
        raise IndexError(f"pair index {n} outside 1..{total}")
    k = 1
    rem = n
    while rem > size - k:
        rem -= size - k
        k += 1
    return k, k + rem


def _pairs(size: int) -> tuple[np.ndarray, np.ndarray]:
    """0-based row-major upper-triangle indices."""
    return np.triu_indices(size, 1)


def basis_element(n: int, size: int) -> np.ndarray:
    """The 1-based ``n``-th basis matrix for u(size)."""
    if not 1 <= n <= size * size:
        raise IndexError(f"basis index {n} outside 1..{size * size}")
    b = np.zeros((size, size), dtype=np.complex128)
    npairs = size * (size - 1) // 2
    if n == 1:
        np.fill_diagonal(b, 1j / np.sqrt(size))
    elif n <= size:
        s = 1j / np.sqrt(n * (n - 1))
        for i in range(n - 1):
            b[i, i] = s
        b[n - 1, n - 1] = -(n - 1) * s
    elif n <= size + npairs:
        k, l = pair_of_index(n - size, size)
        b[k - 1, l - 1] = b[l - 1, k - 1] = 1j / np.sqrt(2)
    else:
        k, l = pair_of_index(n - size - npairs, size)
        b[k - 1, l - 1] = 1 / np.sqrt(2)
        b[l - 1, k - 1] = -1 / np.sqrt(2)
    return b


def basis_matrix(size: int) -> np.ndarray:
    """Column-stacked ``vec(B_n)`` (column-major vec), shape ``(N^2, N^2)``."""
    return np.stack(
        [basis_element(n, size).reshape(-1, order="F") for n in range(1, size * size + 1)],
        axis=1,
    )


def _diag_transform(size: int) -> np.ndarray:
    """Rows map Im(diag X) to the N diagonal-type coordinates (orthogonal)."""
    t = np.zeros((size, size))
    t[0, :] = 1 / np.sqrt(size)
    for n in range(2, size + 1):
        s = 1 / np.sqrt(n * (n - 1))
        t[n - 1, : n - 1] = s
        t[n - 1, n - 1] = -(n - 1) * s
    return t


def _full_coords(x: np.ndarray) -> np.ndarray:
    size = x.shape[0]
    iu, ju = _pairs(size)
    d = _diag_transform(size) @ x.diagonal().imag
    sym = np.sqrt(2) * x[iu, ju].imag
    anti = np.sqrt(2) * x[iu, ju].real
    return np.concatenate([d, sym, anti])


def _full_skew(alpha: np.ndarray, size: int) -> np.ndarray:
    iu, ju = _pairs(size)
    npairs = iu.size
    d = _diag_transform(size).T @ alpha[:size]
    sym = alpha[size: size + npairs] / np.sqrt(2)
    anti = alpha[size + npairs:] / np.sqrt(2)
    x = np.zeros((size, size), dtype=np.complex128)
    x[np.diag_indices(size)] = 1j * d
    x[iu, ju] = anti + 1j * sym
    x[ju, iu] = -anti + 1j * sym
    return x


def _mask(variant: Variant, size: int) -> slice:
    """Positions of the full coordinate vector kept by a single-block variant."""
    k = variant.kind
    if k is Kind.FULL:
        return slice(0, size * size)
    if k is Kind.SPECIAL_UNITARY:
        return slice(1, size * size)
    if k is Kind.SYMMETRIC:
        return slice(0, size * (size + 1) // 2)
    if k is Kind.ROTATION:
        return slice(size * (size + 1) // 2, size * size)
    raise ValueError(f"{variant} has no single-block mask")


def _block_slices(blocks):
    start = 0
    for b in blocks:
        yield slice(start, start + b)
        start += b


def coords_from_skew(x, variant: Variant = FULL, tol: float = 1e-8) -> CoordVector:
    """Real coordinates of skew-Hermitian ``x`` in the basis, restricted to ``variant``.

    The SYMMETRIC variant needs ``x`` purely imaginary and the ROTATION
    variant purely real; BLOCK_DIAGONAL reads only the diagonal blocks.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {x.shape}")
    size = x.shape[0]
    scale = max(1.0, float(np.linalg.norm(x)))
    if np.linalg.norm(x + x.conj().T) > 1e-9 * scale:
        raise StructureError("matrix is not skew-Hermitian")
    kind = variant.kind
    if kind is Kind.SYMMETRIC and np.abs(x.real).max() > tol:
        raise StructureError("symmetric variant needs a purely imaginary logarithm")
    if kind is Kind.ROTATION and np.abs(x.imag).max() > tol:
        raise StructureError("rotation variant needs a purely real logarithm")
    if kind is Kind.BLOCK_DIAGONAL:
        if sum(variant.blocks) != size:
            raise ShapeError(f"block sizes {variant.blocks} do not sum to {size}")
        parts = [_full_coords(x[s, s]) for s in _block_slices(variant.blocks)]
        return CoordVector(size, variant, np.concatenate(parts))
    return CoordVector(size, variant, _full_coords(x)[_mask(variant, size)])


def skew_from_coords(alpha: CoordVector) -> np.ndarray:
    """Inverse of :func:`coords_from_skew`: ``sum(alpha_n * B_n)`` over kept positions."""
    size, variant = alpha.n, alpha.variant
    a = alpha.coords
    if a.size != dims(variant, size):
        raise ShapeError("coordinate length does not match variant")
    if variant.kind is Kind.BLOCK_DIAGONAL:
        x = np.zeros((size, size), dtype=np.complex128)
        pos = 0
        for s in _block_slices(variant.blocks):
            b = s.stop - s.start
            x[s, s] = _full_skew(a[pos: pos + b * b], b)
            pos += b * b
        return x
    full = np.zeros(size * size)
    full[_mask(variant, size)] = a
    return _full_skew(full, size)
