"""Monte Carlo benchmarks comparing the log-map codec against baselines.

Every experiment draws its matrices per trial from
``default_rng(splitmix64(seed ^ trial))``; the channel noise for a given
(trial, method, sweep point) comes from its own child stream, so a row does
not depend on which other methods or sweep points were requested, nor on
the order in which trials run.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import linalg
from .basis import FULL, CoordVector, Variant, _block_slices
from .codec import coefficient_bound, decode, encode, naive_decode, naive_encode
from .givens import GivensParams, givens_decode, givens_encode
from .metrics import fidelity, logdet_capacity, mse, stream_sinr_rate, waterfilling
from .quantize import (
    QuantizerSpec,
    awgn_transmit,
    dequantize,
    four_sigma_spec,
    overrange_spec,
    quantize,
)

EXPERIMENTS = ("awgn", "quant", "csi", "fris", "blockdiag")
METHODS = ("dep", "givens", "naive", "naive-proj")
CSV_HEADER = ("experiment", "method", "sweep", "trial", "mse", "fidelity", "ratio")

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def trial_seed(seed: int, trial: int) -> int:
    return splitmix64((seed ^ trial) & _MASK64)


@dataclass
class BenchConfig:
    experiment: str
    n: int | None = None  # default 16 for fris, 4 otherwise
    trials: int = 100
    seed: int = 0
    methods: tuple[str, ...] = METHODS
    capacities: tuple[float, ...] = ()  # AWGN feedback, bits per channel use
    bits: tuple[int, ...] = ()  # uniformly quantized feedback, bits per entry
    overrange: float | str = 1.0  # range divisor >= 1, or "4sigma"
    snr_db: float = 10.0
    m: int | None = None  # default 32 for csi, 16 for fris
    k: int = 8
    blocks: tuple[int, ...] = ()
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        fris = self.experiment == "fris"
        if self.n is None:
            self.n = 16 if fris else 4
        if self.m is None:
            self.m = 16 if fris else 32
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n < 1 or self.m < 1 or self.k < 1:
            raise ValueError("dimensions must be >= 1")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise ValueError(f"unknown methods {bad}; choose from {METHODS}")
        self.capacities = tuple(float(c) for c in self.capacities)
        self.bits = tuple(int(b) for b in self.bits)
        if self.capacities and self.bits:
            raise ValueError("give either capacities or bits, not both")
        if self.experiment == "awgn" and not self.capacities:
            raise ValueError("awgn experiment needs capacities")
        if self.experiment == "quant" and not self.bits:
            raise ValueError("quant experiment needs bits")
        if not (self.capacities or self.bits):
            raise ValueError("need a capacity or bits sweep")
        if any(not c > 0 for c in self.capacities):
            raise ValueError("capacities must be positive")
        if any(not 1 <= b <= 16 for b in self.bits):
            raise ValueError("bits must be in [1, 16]")
        if self.overrange != "4sigma" and float(self.overrange) < 1:
            raise ValueError("overrange must be >= 1 or '4sigma'")
        if self.experiment == "csi" and self.m < self.n:
            raise ValueError("csi needs m >= n")
        if self.experiment == "blockdiag":
            if not self.blocks:
                self.blocks = (self.n,)
            self.blocks = tuple(int(b) for b in self.blocks)
            if any(b < 1 for b in self.blocks):
                raise ValueError("block sizes must be positive")
            self.n = sum(self.blocks)

    @property
    def quantized(self) -> bool:
        return bool(self.bits)

    @property
    def sweep(self) -> tuple[float, ...]:
        return tuple(float(b) for b in self.bits) if self.bits else self.capacities


@dataclass
class TrialRecord:
    experiment: str
    method: str
    sweep: float
    trial: int
    mse: float
    fidelity: float | None = None
    ratio: float | None = None


def rayleigh(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """IID Rayleigh channel: unit-variance circular complex Gaussian entries."""
    if m < 1 or n < 1:
        raise ValueError("dimensions must be >= 1")
    return linalg.complex_gaussian((m, n), rng)


def sample_symmetric_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    v = linalg.haar_unitary(n, rng)
    u = v @ v.T
    return 0.5 * (u + u.T)


def sample_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed real rotation (QR of a real Gaussian, det forced to +1)."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q.astype(np.complex128)


def fris_optimal_theta(h1, h2) -> np.ndarray:
    """Unitary reflection aligning the singular spaces of ``H1`` and ``H2``."""
    h1 = np.asarray(h1, dtype=np.complex128)
    h2 = np.asarray(h2, dtype=np.complex128)
    if h1.shape[1] != h2.shape[0]:
        raise ValueError("H1 columns must match H2 rows")
    _, _, v1h = np.linalg.svd(h1, full_matrices=True)
    u2, _, _ = np.linalg.svd(h2, full_matrices=True)
    return v1h.conj().T @ u2.conj().T


# --- feedback link ----------------------------------------------------------

def _blocks_of(n: int, blocks) -> tuple[int, ...]:
    return tuple(blocks) if blocks else (n,)


def payload_dims(method: str, n: int, blocks=()) -> int:
    """Real dimensions a method spends on one (block-diagonal) unitary."""
    per = 2 if method.startswith("naive") else 1
    return sum(per * b * b for b in _blocks_of(n, blocks))


def _encode_vec(method: str, u: np.ndarray, blocks) -> np.ndarray:
    if method == "dep":
        variant = Variant.block_diagonal(blocks) if len(blocks) > 1 else FULL
        return encode(u, variant).coords
    parts = []
    for s in _block_slices(blocks):
        ub = u[s, s]
        parts.append(givens_encode(ub).to_vector() if method == "givens" else naive_encode(ub))
    return np.concatenate(parts)


def _decode_vec(method: str, v: np.ndarray, blocks) -> np.ndarray:
    n = sum(blocks)
    if method == "dep":
        variant = Variant.block_diagonal(blocks) if len(blocks) > 1 else FULL
        return decode(CoordVector(n, variant, v))
    out = np.zeros((n, n), dtype=np.complex128)
    pos = 0
    for s, b in zip(_block_slices(blocks), blocks):
        if method == "givens":
            out[s, s] = givens_decode(GivensParams.from_vector(v[pos: pos + b * b], b))
            pos += b * b
        else:
            out[s, s] = naive_decode(v[pos: pos + 2 * b * b], b, project=method == "naive-proj")
            pos += 2 * b * b
    return out


def _quantizers(method: str, v: np.ndarray, blocks, bits: int, overrange) -> list[tuple[int, QuantizerSpec]]:
    """Segment layout ``(length, spec)`` covering the method's payload vector."""
    segs = []
    if method == "dep":
        pos = 0
        for b in blocks:
            bound = coefficient_bound(b)
            if overrange == "4sigma":
                spec = four_sigma_spec(v[pos: pos + b * b], bound, bits)
            else:
                spec = overrange_spec(bound, float(overrange), bits)
            segs.append((b * b, spec))
            pos += b * b
    elif method == "givens":
        for b in blocks:
            m = b * (b - 1) // 2
            if m:
                segs.append((m, QuantizerSpec(bits, 0.0, 1.0)))
                segs.append((m, QuantizerSpec(bits, -np.pi, np.pi)))
            segs.append((b, QuantizerSpec(bits, -np.pi, np.pi)))
    else:
        # the per-entry bit budget is split between real and imaginary parts
        spec = QuantizerSpec(max(1, bits // 2), -1.0, 1.0)
        segs.append((sum(2 * b * b for b in blocks), spec))
    return segs


def _quantize_roundtrip(v: np.ndarray, segs) -> np.ndarray:
    out = np.empty_like(v)
    pos = 0
    for length, spec in segs:
        out[pos: pos + length] = dequantize(quantize(v[pos: pos + length], spec), spec)
        pos += length
    return out


def feedback(method: str, u: np.ndarray, cfg: BenchConfig, value: float,
             rng: np.random.Generator, blocks=()) -> np.ndarray:
    """Encode ``u`` with ``method``, pass it through the configured link, decode."""
    blocks = _blocks_of(u.shape[0], blocks)
    v = _encode_vec(method, u, blocks)
    if cfg.quantized:
        v = _quantize_roundtrip(v, _quantizers(method, v, blocks, int(value), cfg.overrange))
    else:
        cap = value / 2 if method.startswith("naive") else value
        v = awgn_transmit(v, cap, rng)
    return _decode_vec(method, v, blocks)


def _ratios_feedback(ratios: np.ndarray, cfg: BenchConfig, value: float, rng) -> np.ndarray:
    if cfg.quantized:
        spec = QuantizerSpec(int(value), 0.0, 1.0)
        return dequantize(quantize(ratios, spec), spec)
    return awgn_transmit(ratios, value, rng)


def _passive(theta: np.ndarray) -> np.ndarray:
    """Scale a reflection matrix down to a contraction (no power gain)."""
    smax = np.linalg.norm(theta, 2)
    return theta / smax if smax > 1.0 else theta


def _unit_columns(v: np.ndarray) -> np.ndarray:
    """Precoder columns of unit norm so the transmit power stays on budget."""
    norms = np.linalg.norm(v, axis=0)
    return v / np.where(norms > 0, norms, 1.0)


def _noise_rng(tseed: int, method: str, sweep_index: int) -> np.random.Generator:
    return np.random.default_rng([tseed, METHODS.index(method), sweep_index])


def _maybe_fidelity(u, u_hat, method: str) -> float | None:
    return None if method == "naive" else fidelity(u, u_hat)


# --- experiments ------------------------------------------------------------

def _reconstruction_trial(cfg: BenchConfig, trial: int) -> list[TrialRecord]:
    tseed = trial_seed(cfg.seed, trial)
    u = linalg.haar_unitary(cfg.n, np.random.default_rng(tseed))
    rows = []
    for si, value in enumerate(cfg.sweep):
        for method in cfg.methods:
            u_hat = feedback(method, u, cfg, value, _noise_rng(tseed, method, si))
            rows.append(TrialRecord(cfg.experiment, method, value, trial,
                                    mse(u, u_hat), _maybe_fidelity(u, u_hat, method)))
    return rows


def _csi_trial(cfg: BenchConfig, trial: int) -> list[TrialRecord]:
    tseed = trial_seed(cfg.seed, trial)
    h = rayleigh(cfg.m, cfg.n, np.random.default_rng(tseed))
    left, s, rh = np.linalg.svd(h, full_matrices=False)
    v = rh.conj().T
    total = 10.0 ** (cfg.snr_db / 10.0)
    alloc = waterfilling(s * s, total)
    capacity = float(np.sum(np.log2(1.0 + s * s * alloc.powers)))
    rows = []
    for si, value in enumerate(cfg.sweep):
        for method in cfg.methods:
            rng = _noise_rng(tseed, method, si)
            v_hat = feedback(method, v, cfg, value, rng)
            p_hat = np.maximum(_ratios_feedback(alloc.powers / total, cfg, value, rng), 0.0)
            if p_hat.sum() > 0:
                p_hat *= total / p_hat.sum()
            else:
                p_hat = np.full(cfg.n, total / cfg.n)
            precoder = _unit_columns(v_hat) if method == "naive" else v_hat
            rate = stream_sinr_rate(h, left, precoder, p_hat)
            rows.append(TrialRecord(cfg.experiment, method, value, trial, mse(v, v_hat),
                                    _maybe_fidelity(v, v_hat, method), rate / capacity))
    return rows


def _fris_trial(cfg: BenchConfig, trial: int) -> list[TrialRecord]:
    tseed = trial_seed(cfg.seed, trial)
    rng = np.random.default_rng(tseed)
    h1 = rayleigh(cfg.m, cfg.n, rng)
    h2 = rayleigh(cfg.n, cfg.k, rng)
    theta = fris_optimal_theta(h1, h2)
    rho = 10.0 ** (cfg.snr_db / 10.0)
    best = logdet_capacity(h1 @ theta @ h2, rho)
    rows = []
    for si, value in enumerate(cfg.sweep):
        for method in cfg.methods:
            t_hat = feedback(method, theta, cfg, value, _noise_rng(tseed, method, si))
            real = _passive(t_hat) if method == "naive" else t_hat
            ratio = logdet_capacity(h1 @ real @ h2, rho) / best
            rows.append(TrialRecord(cfg.experiment, method, value, trial, mse(theta, t_hat),
                                    _maybe_fidelity(theta, t_hat, method), ratio))
    return rows


def _blockdiag_trial(cfg: BenchConfig, trial: int) -> list[TrialRecord]:
    tseed = trial_seed(cfg.seed, trial)
    rng = np.random.default_rng(tseed)
    w = np.zeros((cfg.n, cfg.n), dtype=np.complex128)
    for s, b in zip(_block_slices(cfg.blocks), cfg.blocks):
        w[s, s] = linalg.haar_unitary(b, rng)
    rows = []
    for si, value in enumerate(cfg.sweep):
        for method in cfg.methods:
            w_hat = feedback(method, w, cfg, value, _noise_rng(tseed, method, si), cfg.blocks)
            pairs = [(w[s, s], w_hat[s, s]) for s in _block_slices(cfg.blocks)]
            err = float(np.mean([mse(a, b) for a, b in pairs]))
            fid = None
            if method != "naive":
                fid = float(np.mean([fidelity(a, b) for a, b in pairs]))
            rows.append(TrialRecord(cfg.experiment, method, value, trial, err, fid))
    return rows


_TRIALS = {
    "awgn": _reconstruction_trial,
    "quant": _reconstruction_trial,
    "csi": _csi_trial,
    "fris": _fris_trial,
    "blockdiag": _blockdiag_trial,
}


def run(cfg: BenchConfig) -> list[TrialRecord]:
    """Run every trial of ``cfg``; rows ordered by trial, sweep, method."""
    fn = _TRIALS[cfg.experiment]
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            chunks = list(pool.map(lambda t: fn(cfg, t), range(cfg.trials)))
    else:
        chunks = [fn(cfg, t) for t in range(cfg.trials)]
    return [r for chunk in chunks for r in chunk]


def run_awgn_sweep(cfg: BenchConfig) -> list[TrialRecord]:
    return run(cfg)


def run_quant_sweep(cfg: BenchConfig) -> list[TrialRecord]:
    return run(cfg)


def run_csi(cfg: BenchConfig) -> list[TrialRecord]:
    return run(cfg)


def run_fris(cfg: BenchConfig) -> list[TrialRecord]:
    return run(cfg)


def run_blockdiag(cfg: BenchConfig) -> list[TrialRecord]:
    return run(cfg)


# --- output -----------------------------------------------------------------

def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([r.experiment, r.method, _fmt(r.sweep), r.trial, _fmt(r.mse),
                    _fmt(r.fidelity), _fmt(r.ratio)])
    return buf.getvalue()


@dataclass
class Summary:
    experiment: str
    method: str
    sweep: float
    count: int
    mse_mean: float
    mse_std: float
    fidelity_mean: float | None = None
    fidelity_std: float | None = None
    ratio_mean: float | None = None
    ratio_std: float | None = None


def _stats(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return None, None
    a = np.asarray(vals)
    return float(a.mean()), float(a.std())


def aggregate(records) -> list[Summary]:
    """Mean and std per (method, sweep) in first-appearance order."""
    groups: dict[tuple, list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.experiment, r.method, r.sweep), []).append(r)
    out = []
    for (exp, method, sweep), rs in groups.items():
        rs = sorted(rs, key=lambda r: r.trial)
        m = _stats(r.mse for r in rs)
        f = _stats(r.fidelity for r in rs)
        q = _stats(r.ratio for r in rs)
        out.append(Summary(exp, method, sweep, len(rs), m[0], m[1], f[0], f[1], q[0], q[1]))
    return out


def summary_to_csv(summaries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["experiment", "method", "sweep", "count", "mse_mean", "mse_std",
                "fidelity_mean", "fidelity_std", "ratio_mean", "ratio_std"])
    for s in summaries:
        w.writerow([s.experiment, s.method, _fmt(s.sweep), s.count, _fmt(s.mse_mean),
                    _fmt(s.mse_std), _fmt(s.fidelity_mean), _fmt(s.fidelity_std),
                    _fmt(s.ratio_mean), _fmt(s.ratio_std)])
    return buf.getvalue()


def mean_by(records, method: str, sweep: float, attr: str = "mse") -> float:
    vals = [getattr(r, attr) for r in records
            if r.method == method and math.isclose(r.sweep, sweep) and getattr(r, attr) is not None]
    if not vals:
        raise KeyError(f"no {attr} values for {method} at {sweep}")
    return float(np.mean(vals))
