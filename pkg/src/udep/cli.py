"""``udep`` command line.

Exit codes: 0 success, 2 usage/parse/format error, 3 input not unitary,
4 input structure does not fit the variant. Diagnostics go to stderr;
stdout only carries the values a command reports.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import bench, codec, linalg
from .basis import Kind, Variant
from .errors import (
    BranchDegeneracyError,
    DegenerateProjectionError,
    FormatError,
    PreconditionError,
    ShapeError,
    StructureError,
)
from .payload import deserialize, payload_coords, quantized_payload, raw_payload, serialize

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_UNITARY = 3
EXIT_STRUCTURE = 4


class CliError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


def _atomic_write(path: str, data: bytes) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read {path}: {exc.strerror}") from None


def _variant(text: str) -> Variant:
    try:
        return Variant.parse(text)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None


def _load_unitary(path: str, tol: float) -> np.ndarray:
    try:
        u = linalg.read_matrix(_read_bytes(path).decode("utf-8", errors="replace"))
    except FormatError as exc:
        raise CliError(EXIT_USAGE, f"{path}: {exc}") from None
    n, m = u.shape
    if n != m:
        raise CliError(EXIT_USAGE, f"{path}: expected a square matrix, got {n}x{m}")
    defect = linalg.unitarity_defect(u)
    if defect > tol * n:
        raise CliError(EXIT_NOT_UNITARY,
                       f"{path}: not unitary, ||U^H U - I||_F = {defect:.6e} > {tol * n:.1e}")
    if defect > codec.UNITARY_TOL * n:
        # accepted at the looser CLI tolerance; snap onto the group first
        try:
            u = linalg.nearest_unitary(u)
        except DegenerateProjectionError as exc:
            raise CliError(EXIT_NOT_UNITARY, f"{path}: {exc}") from None
    return u


def cmd_encode(args) -> int:
    variant = _variant(args.variant)
    u = _load_unitary(args.input, args.tol)
    det_sign = None
    try:
        if variant.kind is Kind.ROTATION:
            rc = codec.encode_rotation(u)
            alpha, det_sign = rc.coords, rc.det_sign
        else:
            alpha = codec.encode(u, variant)
    except (StructureError, BranchDegeneracyError, ShapeError) as exc:
        raise CliError(EXIT_STRUCTURE, f"{args.input}: {exc}") from None
    except PreconditionError as exc:
        raise CliError(EXIT_NOT_UNITARY, f"{args.input}: {exc}") from None
    if args.bits is None:
        payload = raw_payload(alpha, det_sign)
    else:
        if not 1 <= args.bits <= 16:
            raise CliError(EXIT_USAGE, "--bits must be in [1, 16]")
        if args.overrange < 1:
            raise CliError(EXIT_USAGE, "--overrange must be >= 1")
        payload = quantized_payload(alpha, args.bits, args.overrange, det_sign)
    _atomic_write(args.output, serialize(payload))
    peak = float(np.abs(alpha.coords).max()) if alpha.coords.size else 0.0
    print(f"dims {alpha.coords.size}")
    print(f"max_abs_coord {peak:.12g}")
    return EXIT_OK


def cmd_decode(args) -> int:
    try:
        p = deserialize(_read_bytes(args.input))
    except FormatError as exc:
        raise CliError(EXIT_USAGE, f"{args.input}: {exc}") from None
    alpha = payload_coords(p)
    if p.variant.kind is Kind.ROTATION:
        u = codec.decode_rotation(codec.RotationCode(alpha, p.det_sign or 1))
    else:
        u = codec.decode(alpha)
    _atomic_write(args.output, linalg.write_matrix(u).encode())
    print(f"defect {linalg.unitarity_defect(u):.6e}")
    return EXIT_OK


def cmd_rand(args) -> int:
    if args.n < 1:
        raise CliError(EXIT_USAGE, "--n must be >= 1")
    rng = np.random.default_rng(args.seed)
    kind = args.kind
    if kind == "haar":
        u = linalg.haar_unitary(args.n, rng)
    elif kind == "symmetric":
        u = bench.sample_symmetric_unitary(args.n, rng)
    else:
        u = bench.sample_rotation(args.n, rng)
    text = linalg.write_matrix(u)
    if args.output:
        _atomic_write(args.output, text.encode())
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        u = linalg.read_matrix(_read_bytes(args.input).decode("utf-8", errors="replace"))
    except FormatError as exc:
        raise CliError(EXIT_USAGE, f"{args.input}: {exc}") from None
    n, m = u.shape
    if n != m:
        raise CliError(EXIT_USAGE, f"{args.input}: expected a square matrix, got {n}x{m}")
    defect = linalg.unitarity_defect(u)
    print(f"defect {defect:.6e}")
    if defect > args.tol * n:
        print(f"{args.input}: not unitary within {args.tol * n:.1e}", file=sys.stderr)
        return EXIT_NOT_UNITARY
    return EXIT_OK


def _range(text: str, cast=float) -> tuple:
    """``a``, ``a,b,c`` or ``a:b:step`` (inclusive end)."""
    try:
        if ":" in text:
            a, b, step = (float(t) for t in text.split(":"))
            if step <= 0 or b < a:
                raise ValueError
            count = int(np.floor((b - a) / step + 1e-9)) + 1
            return tuple(cast(a + i * step) for i in range(count))
        return tuple(cast(float(t)) for t in text.split(","))
    except ValueError:
        raise CliError(EXIT_USAGE, f"bad sweep specification {text!r}") from None


def cmd_bench(args) -> int:
    overrange = args.overrange if args.overrange == "4sigma" else None
    if overrange is None:
        try:
            overrange = float(args.overrange)
        except ValueError:
            raise CliError(EXIT_USAGE, "--overrange must be a number >= 1 or '4sigma'") from None
    workers = args.workers
    if workers is None:
        try:
            workers = int(os.environ.get("UDEP_THREADS", "1"))
        except ValueError:
            raise CliError(EXIT_USAGE, "UDEP_THREADS must be an integer") from None
    opts = dict(
        n=args.n, trials=args.trials, seed=args.seed,
        methods=tuple(m.strip() for m in args.methods.split(",") if m.strip()),
        capacities=_range(args.capacity) if args.capacity else (),
        bits=_range(args.bits, lambda x: int(round(x))) if args.bits else (),
        overrange=overrange, snr_db=args.snr_db, workers=max(1, workers),
        blocks=_range(args.blocks, lambda x: int(round(x))) if args.blocks else (),
    )
    if args.m is not None:
        opts["m"] = args.m
    if args.k is not None:
        opts["k"] = args.k
    try:
        cfg = bench.BenchConfig(args.experiment, **opts)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    records = bench.run(cfg)
    text = bench.records_to_csv(records)
    if args.out:
        _atomic_write(args.out, text.encode())
    else:
        sys.stdout.write(text)
    if args.aggregate:
        _atomic_write(args.aggregate, bench.summary_to_csv(bench.aggregate(records)).encode())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="udep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode a unitary matrix file into a UDEP payload")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--variant", default="full",
                   help="full, su, symmetric, rotation or block:4,4 (default full)")
    p.add_argument("--bits", type=int, help="quantize with this many bits per coordinate")
    p.add_argument("--overrange", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-6,
                   help="unitarity tolerance per dimension (default 1e-6)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a UDEP payload into a matrix file")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("rand", help="write a random unitary matrix")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--kind", choices=("haar", "symmetric", "rotation"), default="haar")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_rand)

    p = sub.add_parser("check", help="report the unitarity defect of a matrix file")
    p.add_argument("input")
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="run a Monte Carlo benchmark and write CSV")
    p.add_argument("experiment", choices=bench.EXPERIMENTS)
    p.add_argument("--n", type=int, help="matrix size (default 16 for fris, else 4)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--methods", default=",".join(bench.METHODS))
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--capacity", help="AWGN capacities a:b:step or a,b,...")
    grp.add_argument("--bits", help="bit depths a:b:step or a,b,...")
    p.add_argument("--overrange", default="1", help="range divisor >= 1 or '4sigma'")
    p.add_argument("--snr-db", type=float, default=10.0)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--blocks", help="block sizes for blockdiag, e.g. 4,4")
    p.add_argument("--workers", type=int, help="threads (default $UDEP_THREADS or 1)")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--aggregate", help="also write mean/std per method and sweep point")
    p.set_defaults(func=cmd_bench)
    parser.bench_parser = p
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"udep {args.command}: {exc}", file=sys.stderr)
        if exc.status == EXIT_USAGE and args.command == "bench":
            print(parser.bench_parser.format_usage(), file=sys.stderr, end="")
        return exc.status


if __name__ == "__main__":
    sys.exit(main())
