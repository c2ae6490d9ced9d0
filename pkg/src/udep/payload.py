"""UDEP binary payload format.

All integers little-endian. Layout::

    header   16 bytes  magic "UDEP" | version u8 (=1) | variant u8 | flags u8
                       | reserved u8 (=0) | N u32 | crc32 u32
    blocks   BLOCK_DIAGONAL only: u32 count, then u32 per block
    body     raw:       dims x f64
             quantized: u8 segment count; per segment u8 bits, f64 lo,
                        f64 hi, u32 length; then every index bit-packed
                        LSB-first, segments in order, padded to a byte

Flags: bit0 quantized, bit1 det_sign present, bit2 det_sign is -1.
The crc32 field holds ``zlib.crc32`` of the whole payload with the field
itself zeroed, so any corrupted byte is reported instead of silently decoded.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from .basis import CoordVector, Kind, Variant, dims
from .errors import FormatError
from .quantize import MAX_BITS, QuantizerSpec, dequantize, overrange_spec, quantize

MAGIC = b"UDEP"
VERSION = 1
HEADER = struct.Struct("<4sBBBBII")
SEGMENT = struct.Struct("<BddI")
MAX_N = 1 << 16

FLAG_QUANTIZED = 0x01
FLAG_DET_PRESENT = 0x02
FLAG_DET_NEGATIVE = 0x04


@dataclass
class Segment:
    spec: QuantizerSpec
    indices: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64).reshape(-1)

    def __eq__(self, other):
        if not isinstance(other, Segment):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.indices, other.indices)


@dataclass
class EncodedPayload:
    """Either ``coords`` (raw float64) or ``segments`` (quantized) is set."""

    n: int
    variant: Variant
    coords: np.ndarray | None = field(default=None, repr=False)
    segments: list[Segment] | None = None
    det_sign: int | None = None

    @property
    def quantized(self) -> bool:
        return self.segments is not None

    def __eq__(self, other):
        if not isinstance(other, EncodedPayload):
            return NotImplemented
        if (self.n, self.variant, self.det_sign, self.quantized) != (
            other.n, other.variant, other.det_sign, other.quantized
        ):
            return False
        if self.quantized:
            return self.segments == other.segments
        a = np.asarray(self.coords, dtype=np.float64)
        b = np.asarray(other.coords, dtype=np.float64)
        return a.shape == b.shape and a.tobytes() == b.tobytes()


def quantized_body_size(lengths, bits) -> int:
    """Bytes of a quantized body for segments of the given lengths and depths."""
    total_bits = sum(int(l) * int(b) for l, b in zip(lengths, bits))
    return 1 + SEGMENT.size * len(lengths) + (total_bits + 7) // 8


def _pack(segments: list[Segment]) -> bytes:
    chunks = []
    for seg in segments:
        if seg.indices.size == 0:
            continue
        b = seg.spec.bits
        if seg.indices.min() < 0 or seg.indices.max() >= (1 << b):
            raise FormatError("index-overflow", f"index does not fit in {b} bits")
        shifts = np.arange(b, dtype=np.int64)
        chunks.append(((seg.indices[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1))
    if not chunks:
        return b""
    return np.packbits(np.concatenate(chunks), bitorder="little").tobytes()


def _unpack(data: bytes, lengths, bits) -> list[np.ndarray]:
    bitstream = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    out, pos = [], 0
    for length, b in zip(lengths, bits):
        chunk = bitstream[pos: pos + length * b].reshape(length, b).astype(np.int64)
        out.append((chunk << np.arange(b, dtype=np.int64)).sum(axis=1))
        pos += length * b
    if bitstream[pos:].any():
        raise FormatError("bad-padding", "non-zero padding bits after last index")
    return out


def serialize(p: EncodedPayload) -> bytes:
    d = dims(p.variant, p.n)
    if not 1 <= p.n < MAX_N:
        raise FormatError("bad-size", f"N={p.n} outside supported range")
    flags = 0
    if p.quantized:
        flags |= FLAG_QUANTIZED
    if p.det_sign is not None:
        if p.det_sign not in (1, -1):
            raise FormatError("bad-flags", "det_sign must be +1 or -1")
        flags |= FLAG_DET_PRESENT
        if p.det_sign < 0:
            flags |= FLAG_DET_NEGATIVE
    out = bytearray(HEADER.pack(MAGIC, VERSION, int(p.variant.kind), flags, 0, p.n, 0))
    if p.variant.kind is Kind.BLOCK_DIAGONAL:
        out += struct.pack(f"<I{len(p.variant.blocks)}I", len(p.variant.blocks), *p.variant.blocks)
    if p.quantized:
        if sum(s.indices.size for s in p.segments) != d:
            raise FormatError("bad-length", f"segments hold {sum(s.indices.size for s in p.segments)} values, need {d}")
        if len(p.segments) > 255:
            raise FormatError("bad-segment", "at most 255 segments")
        out.append(len(p.segments))
        for s in p.segments:
            out += SEGMENT.pack(s.spec.bits, s.spec.lo, s.spec.hi, s.indices.size)
        out += _pack(p.segments)
    else:
        c = np.asarray(p.coords, dtype="<f8").reshape(-1)
        if c.size != d:
            raise FormatError("bad-length", f"{c.size} coordinates, need {d}")
        out += c.tobytes()
    struct.pack_into("<I", out, 12, zlib.crc32(out))
    return bytes(out)


def deserialize(data: bytes) -> EncodedPayload:
    data = bytes(data)
    if len(data) < HEADER.size:
        raise FormatError("truncated", f"{len(data)} bytes is shorter than the header")
    magic, version, vbyte, flags, reserved, n, crc = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError("bad-magic", f"magic {magic!r} is not {MAGIC!r}")
    if version != VERSION:
        raise FormatError("bad-version", f"unsupported version {version}")
    zeroed = bytearray(data)
    zeroed[12:16] = b"\0\0\0\0"
    if zlib.crc32(zeroed) != crc:
        raise FormatError("bad-checksum", "crc32 mismatch (corrupted or truncated payload)")
    if reserved != 0:
        raise FormatError("bad-reserved", "reserved byte must be 0")
    try:
        kind = Kind(vbyte)
    except ValueError:
        raise FormatError("bad-variant", f"unknown variant byte {vbyte}") from None
    if flags & ~0x07:
        raise FormatError("bad-flags", f"unknown flag bits {flags:#04x}")
    det_sign = None
    if flags & FLAG_DET_PRESENT:
        if kind is not Kind.ROTATION:
            raise FormatError("bad-flags", "det_sign only allowed for rotation payloads")
        det_sign = -1 if flags & FLAG_DET_NEGATIVE else 1
    elif flags & FLAG_DET_NEGATIVE:
        raise FormatError("bad-flags", "det_sign value without det_sign present")
    if not 1 <= n < MAX_N:
        raise FormatError("bad-size", f"N={n} outside supported range")

    pos = HEADER.size
    if kind is Kind.BLOCK_DIAGONAL:
        if len(data) < pos + 4:
            raise FormatError("truncated", "missing block count")
        (count,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if count < 1 or count > n or len(data) < pos + 4 * count:
            raise FormatError("bad-blocks", f"bad block count {count}")
        blocks = struct.unpack_from(f"<{count}I", data, pos)
        pos += 4 * count
        if any(b < 1 for b in blocks) or sum(blocks) != n:
            raise FormatError("bad-blocks", f"block sizes {blocks} do not sum to N={n}")
        variant = Variant.block_diagonal(blocks)
    else:
        variant = Variant(kind)
    d = dims(variant, n)
    body = data[pos:]

    if not flags & FLAG_QUANTIZED:
        if len(body) != 8 * d:
            raise FormatError("bad-length", f"raw body has {len(body)} bytes, need {8 * d}")
        coords = np.frombuffer(body, dtype="<f8").astype(np.float64)
        return EncodedPayload(n, variant, coords=coords, det_sign=det_sign)

    if not body:
        raise FormatError("truncated", "missing segment count")
    count = body[0]
    table_end = 1 + SEGMENT.size * count
    if count < 1 or len(body) < table_end:
        raise FormatError("truncated", "segment table is truncated")
    specs, lengths = [], []
    for i in range(count):
        bits, lo, hi, length = SEGMENT.unpack_from(body, 1 + SEGMENT.size * i)
        if not 1 <= bits <= MAX_BITS or not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise FormatError("bad-segment", f"segment {i} has an invalid quantizer")
        specs.append(QuantizerSpec(bits, lo, hi))
        lengths.append(length)
    if sum(lengths) != d:
        raise FormatError("bad-length", f"segments hold {sum(lengths)} values, need {d}")
    expected = quantized_body_size(lengths, [s.bits for s in specs])
    if len(body) != expected:
        raise FormatError("bad-length", f"quantized body has {len(body)} bytes, need {expected}")
    idx = _unpack(body[table_end:], lengths, [s.bits for s in specs])
    segs = [Segment(s, i) for s, i in zip(specs, idx)]
    return EncodedPayload(n, variant, segments=segs, det_sign=det_sign)


def coord_bounds(variant: Variant, n: int) -> list[tuple[int, float]]:
    """``(length, bound)`` per quantizer segment of a coordinate vector."""
    from .codec import coefficient_bound

    if variant.kind is Kind.BLOCK_DIAGONAL:
        return [(b * b, coefficient_bound(b)) for b in variant.blocks]
    return [(dims(variant, n), coefficient_bound(n))]


def raw_payload(alpha: CoordVector, det_sign: int | None = None) -> EncodedPayload:
    return EncodedPayload(alpha.n, alpha.variant, coords=alpha.coords.copy(), det_sign=det_sign)


def quantized_payload(alpha: CoordVector, bits: int, overrange: float = 1.0,
                      det_sign: int | None = None) -> EncodedPayload:
    """Quantize coordinates with one symmetric segment per block."""
    segs, pos = [], 0
    for length, bound in coord_bounds(alpha.variant, alpha.n):
        spec = overrange_spec(bound, overrange, bits)
        segs.append(Segment(spec, quantize(alpha.coords[pos: pos + length], spec)))
        pos += length
    return EncodedPayload(alpha.n, alpha.variant, segments=segs, det_sign=det_sign)


def payload_coords(p: EncodedPayload) -> CoordVector:
    """Coordinate vector carried by a payload (dequantized if needed)."""
    if p.quantized:
        vals = np.concatenate([dequantize(s.indices, s.spec) for s in p.segments])
    else:
        vals = np.asarray(p.coords, dtype=np.float64)
    return CoordVector(p.n, p.variant, vals)
