"""Command-line entry point: ``qzip <mode> ...``.

Exit status is 0 on success, 2 when the arguments or config fail
validation and 3 when a component raises during the run.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import ConfigError, ExperimentConfig, load_config
from .diag import run_theorem1
from .lz import as_bits, bits_to_str, lz_decode, lz_encode
from .pipeline import TRUNCATION_COLUMNS, run, truncation_rows
from .report import Report, emit_report

EXIT_OK, EXIT_INVALID, EXIT_COMPONENT = 0, 2, 3


def pack_bits(bits) -> bytes:
    """Bits to bytes, MSB first, padded with a 1 and then zeros to a byte boundary."""
    bits = np.append(as_bits(bits), np.uint8(1))
    pad = (-bits.shape[0]) % 8
    return np.packbits(np.append(bits, np.zeros(pad, np.uint8))).tobytes()


def unpack_bits(data: bytes) -> np.ndarray:
    """Inverse of `pack_bits`: drop the trailing zeros and the final 1."""
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    ones = np.flatnonzero(bits)
    if ones.size == 0 or bits.shape[0] - ones[-1] > 8:
        raise ValueError("missing end-of-data padding")
    return bits[: ones[-1]]


def _lz_file(action: str, path: str, text: bool, out: str | None) -> int:
    if text:
        with open(path, encoding="ascii") as fh:
            raw = fh.read().strip()
        try:
            bits = as_bits(raw)
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        result = bits_to_str(lz_encode(bits) if action == "encode" else lz_decode(bits)) + "\n"
        payload = result.encode("ascii")
    else:
        with open(path, "rb") as fh:
            data = fh.read()
        if action == "encode":
            payload = pack_bits(lz_encode(np.unpackbits(np.frombuffer(data, dtype=np.uint8))))
        else:
            bits = lz_decode(unpack_bits(data))
            if bits.shape[0] % 8:
                raise ValueError("decoded stream is not a whole number of bytes; use --text")
            payload = np.packbits(bits).tobytes()
    if out is None:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    else:
        with open(out, "wb") as fh:
            fh.write(payload)
    return EXIT_OK


def _emit(report: Report, args) -> None:
    text = emit_report(report, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)


def _truncate_from_flags(args) -> Report:
    if None in (args.n, args.Y):
        raise ConfigError("truncate-sim needs --config or both --n and --Y")
    L = args.L if args.L is not None else args.Y + 1
    if args.Y < 1 or L <= args.Y or args.n < L + args.Y or args.trials < 1:
        raise ConfigError("need Y >= 1, L > Y, n >= L + Y and trials >= 1")
    if args.k is not None and not 0 <= args.k <= args.n:
        raise ConfigError(f"k must lie in 0..{args.n}")
    params = {"n": args.n, "k": args.k, "Y": args.Y, "L": L, "trials": args.trials, "seed": args.seed}
    rows = truncation_rows(args.n, args.Y, L, args.trials, args.seed, args.k)
    summary = {"fidelity_lower_bound": 1 - 2 / args.Y, "error_upper_bound": 1 / args.Y,
               "boundary_uncertainty": L + args.Y}
    return Report("truncate-sim", params, summary, TRUNCATION_COLUMNS, rows)


def _theorem1_from_flags(args) -> Report:
    if args.dim < 2 or args.positions < 1 or args.trials < 1:
        raise ConfigError("need dim >= 2, positions >= 1 and trials >= 1")
    if args.dim**args.positions > 4096:
        raise ConfigError("register dimension dim**positions exceeds 4096")
    rep = run_theorem1(args.dim, args.positions, args.trials, args.seed)
    params = {"dim": args.dim, "positions": args.positions, "trials": args.trials, "seed": args.seed}
    return Report("theorem1", params, rep.to_dict())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qzip", description="Universal quantum condensation experiments.")
    sub = parser.add_subparsers(dest="mode", required=True)

    def common(p, config_required=False):
        p.add_argument("--config", required=config_required, help="experiment config (JSON)")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    for mode in ("rate", "search", "pipeline"):
        common(sub.add_parser(mode, help=f"run the {mode} experiment"), config_required=True)

    p = sub.add_parser("lz", help="encode/decode a file, or run the LZ rate experiment")
    p.add_argument("action", nargs="?", choices=("encode", "decode"))
    p.add_argument("file", nargs="?")
    p.add_argument("--text", action="store_true", help="files hold '0'/'1' characters instead of raw bytes")
    common(p)

    p = sub.add_parser("theorem1", help="pseudo-commutation check on random circuits")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--positions", type=int, default=3)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("truncate-sim", help="analytic vs Monte Carlo truncation statistics")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, help="boundary position; omit to sweep every offset K")
    p.add_argument("--Y", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--config")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    return parser


def _run(args) -> int:
    if args.mode == "lz" and args.action is not None:
        if args.file is None:
            raise ConfigError("lz encode/decode needs an input file")
        return _lz_file(args.action, args.file, args.text, args.out)

    if args.config is not None:
        config = load_config(args.config)
        if config.mode != args.mode:
            config = ExperimentConfig.from_dict({**config.to_dict(), "mode": args.mode})
        report = run(config)
    elif args.mode == "truncate-sim":
        report = _truncate_from_flags(args)
    elif args.mode == "theorem1":
        report = _theorem1_from_flags(args)
    else:
        raise ConfigError(f"{args.mode} needs --config")
    _emit(report, args)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        return _run(args)
    except (ConfigError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"qzip: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # component failure, surfaced with context
        print(f"qzip {args.mode}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPONENT


if __name__ == "__main__":
    sys.exit(main())
