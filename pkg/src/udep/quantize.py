"""Uniform midrise scalar quantization and the per-dimension AWGN channel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FormatError

MAX_BITS = 16


@dataclass(frozen=True)
class QuantizerSpec:
    bits: int
    lo: float
    hi: float

    def __post_init__(self):
        if not 1 <= self.bits <= MAX_BITS:
            raise ValueError(f"bits must be in [1, {MAX_BITS}], got {self.bits}")
        if not (np.isfinite(self.lo) and np.isfinite(self.hi) and self.lo < self.hi):
            raise ValueError(f"need finite lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def levels(self) -> int:
        return 1 << self.bits

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / self.levels


def quantize(v, spec: QuantizerSpec) -> np.ndarray:
    """Cell index ``floor((v - lo) / step)`` clipped to ``[0, 2^bits - 1]``."""
    v = np.asarray(v, dtype=np.float64)
    idx = np.floor((v - spec.lo) / spec.step)
    return np.clip(idx, 0, spec.levels - 1).astype(np.int64)


def dequantize(indices, spec: QuantizerSpec) -> np.ndarray:
    """Cell midpoints ``lo + step * (index + 1/2)``."""
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= spec.levels):
        raise FormatError("index-overflow", f"quantizer index outside [0, {spec.levels - 1}]")
    return spec.lo + spec.step * (idx + 0.5)


def overrange_spec(bound: float, overrange: float, bits: int) -> QuantizerSpec:
    """Symmetric quantizer covering ``[-bound/overrange, bound/overrange]``.

    ``overrange = 1`` spans the whole known input range; larger values trade
    clipping of rare large inputs for a finer step.
    """
    if bound <= 0:
        raise ValueError("bound must be positive")
    if overrange < 1:
        raise ValueError("overrange must be >= 1")
    r = bound / overrange
    return QuantizerSpec(bits, -r, r)


def four_sigma_spec(samples, bound: float, bits: int) -> QuantizerSpec:
    """Symmetric range ``min(bound, 4 * std(samples))``."""
    sd = float(np.std(np.asarray(samples, dtype=np.float64)))
    r = min(bound, 4.0 * sd) if sd > 0 else bound
    return QuantizerSpec(bits, -r, r)


def capacity_to_snr(capacity: float) -> float:
    """Inverse of ``C = log2(1 + SNR)``."""
    return float(np.expm1(capacity * np.log(2.0)))


def awgn_transmit(v, capacity: float, rng: np.random.Generator) -> np.ndarray:
    """Send ``v`` through independent AWGN uses at ``capacity`` bits per use.

    Noise variance is ``mean(v**2) / SNR``. ``capacity = inf`` is a
    noiseless channel.
    """
    v = np.asarray(v, dtype=np.float64)
    if not capacity > 0:
        raise ValueError("capacity must be positive")
    if np.isinf(capacity):
        return v.copy()
    power = float(np.mean(v * v)) if v.size else 0.0
    if power == 0.0:
        return v.copy()
    sigma = np.sqrt(power / capacity_to_snr(capacity))
    return v + sigma * rng.standard_normal(v.shape)
