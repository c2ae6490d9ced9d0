"""Compact real parametrization of unitary matrices via the matrix logarithm.

``encode`` maps an N x N unitary to N^2 bounded real coordinates in an
orthonormal basis of the skew-Hermitian matrices; ``decode`` maps any real
vector back to a unitary matrix through the matrix exponential.
"""

from .basis import (
    FULL,
    ROTATION,
    SPECIAL_UNITARY,
    SYMMETRIC,
    CoordVector,
    Kind,
    Variant,
    basis_element,
    coords_from_skew,
    dims,
    pair_of_index,
    skew_from_coords,
)
from .codec import (
    RotationCode,
    coefficient_bound,
    decode,
    decode_rotation,
    encode,
    encode_rotation,
    naive_decode,
    naive_encode,
)
from .errors import (
    BranchDegeneracyError,
    ConvergenceError,
    DegenerateProjectionError,
    FormatError,
    PreconditionError,
    ShapeError,
    StructureError,
    UdepError,
)
from .givens import GivensParams, givens_decode, givens_encode
from .linalg import haar_unitary, nearest_unitary, read_matrix, unitarity_defect, write_matrix
from .metrics import fidelity, logdet_capacity, mse, stream_sinr_rate, waterfilling
from .payload import EncodedPayload, Segment, deserialize, serialize
from .quantize import QuantizerSpec, awgn_transmit, dequantize, quantize

__version__ = "0.1.0"
