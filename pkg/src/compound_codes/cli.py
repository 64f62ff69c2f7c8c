"""Command-line front end: ``compound-codes <subcommand> [flags]``.

Exit status is 0 on success, 2 on configuration/validation failure and 1 on
any other runtime error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import harness
from .codec import CosetConstraint, quantize
from .ensembles import make_rng
from .errors import DimensionMismatch, InconsistentSystem, SearchSpaceTooLarge, SocketMismatch
from .gf2 import BinaryVector, mat_vec_mul

SUBCOMMAND_MODES = {
    "construct": "construct",
    "rates": "construct",
    "quantize": "construct",
    "wz-run": "wz",
    "gp-run": "gp",
    "exponent": "exponent",
    "enumerator": "enumerator",
    "rate-curves": "rates",
    "validate": None,
}

# flag dest -> ExperimentConfig field
_OVERRIDES = {
    "seed": "base_seed", "trials": "trials", "out": "output_path", "grid_step": "grid_step",
    "decoder": "decoder", "cap": "cap", "jobs": "jobs", "code": "code_path", "code_seed": "code_seed",
    "n": "n", "m": "m", "k1": "k1", "k2": "k2",
    "gamma_t": "gamma_t", "gamma_v": "gamma_v", "gamma_c": "gamma_c",
    "p": "p", "delta": "delta", "D": "D", "w": "w",
}


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config; flags override its fields")
    common.add_argument("--seed", type=_u64, help="base seed (trial i uses seed + i)")
    common.add_argument("--code-seed", type=_u64, help="seed for sampling the code (default: --seed)")
    common.add_argument("--trials", type=int)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--grid-step", type=float)
    common.add_argument("--decoder", choices=("ml", "threshold"))
    common.add_argument("--cap", type=int, help="log2 of the largest coset scanned exhaustively")
    common.add_argument("--jobs", type=int, help="worker processes for trial batches")
    common.add_argument("--code", help="load the code from this file instead of sampling")
    for name in ("n", "m", "k1", "k2", "gamma-t", "gamma-v", "gamma-c"):
        common.add_argument(f"--{name}", type=int)
    for name in ("p", "delta", "D", "w"):
        common.add_argument(f"--{name}", type=float)

    parser = argparse.ArgumentParser(prog="compound-codes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("construct", parents=[common], help="sample a compound code and write it in text form")
    sub.add_parser("rates", parents=[common], help="print the nominal and effective rates of a code")
    q = sub.add_parser("quantize", parents=[common], help="quantize one source word with H1 z = 0")
    q.add_argument("--source", help="bit string of length n (default: uniform random from --seed)")
    q.add_argument("--t2", help="also require H2 z = this bit string")
    sub.add_parser("wz-run", parents=[common], help="Monte Carlo Wyner-Ziv trials -> CSV")
    sub.add_parser("gp-run", parents=[common], help="Monte Carlo Gelfand-Pinsker trials -> CSV")
    e = sub.add_parser("exponent", parents=[common], help="error-exponent curves -> CSV (v,value,label)")
    e.add_argument("--panel", choices=sorted(harness.EXPONENT_PANELS), help="preset: a = LDGM only, b = LDGM over a (3,6) LDPC code")
    sub.add_parser("enumerator", parents=[common], help="finite-m and asymptotic LDPC weight enumerators -> CSV")
    sub.add_parser("rate-curves", parents=[common], help="Wyner-Ziv rate and embedding capacity curves -> CSV")
    v = sub.add_parser("validate", parents=[common], help="check a config and list every violation")
    v.add_argument("--mode", choices=harness.MODES)
    return parser


def _config(args: argparse.Namespace) -> harness.ExperimentConfig:
    mode = SUBCOMMAND_MODES[args.command] or getattr(args, "mode", None)
    overrides = {}
    for dest, key in _OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "panel", None):
        preset = dict(harness.EXPONENT_PANELS[args.panel])
        preset.update(overrides)
        overrides = preset
    if args.config:
        if mode:
            overrides["mode"] = mode
        return harness.load_config(args.config, **overrides)
    return harness.ExperimentConfig.for_mode(mode or "wz", **overrides)


def _quantize(args, config: harness.ExperimentConfig) -> None:
    code = harness.make_code(config)
    if args.source:
        s = BinaryVector.from_str(args.source)
    else:
        s = BinaryVector.from_array(make_rng(config.base_seed).integers(0, 2, size=code.n))
    t2 = BinaryVector.from_str(args.t2) if args.t2 else None
    z, dist = quantize(code, s, CosetConstraint(BinaryVector.zeros(code.k1), t2), cap=config.cap)
    text = (
        "source,z,reconstruction,distortion,distortion_fraction\n"
        f"{s},{z},{mat_vec_mul(z, code.G)},{dist},{dist / code.n!r}\n"
    )
    harness._write(config.output_path, text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config(args)
        if args.command == "validate":
            problems = harness.validate(config)
            for msg in problems:
                print(msg)
            return 2 if problems else 0
        problems = harness.validate(config)
        if problems:
            raise harness.ConfigError("\n".join(problems))
        if args.command == "rates":
            harness._write(config.output_path, harness.rates_text(harness.make_code(config)))
        elif args.command == "quantize":
            _quantize(args, config)
        elif args.command == "exponent":
            curves, cond = harness.exponent_report(config)
            harness._write(config.output_path, harness._curves_text(curves))
            verdict = "satisfied" if cond.satisfied else "violated"
            print(f"exponent condition {verdict}: max {cond.worst_value!r} at v = {cond.worst_v!r}", file=sys.stderr)
        else:
            harness.run(config)
    except (harness.ConfigError, SocketMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InconsistentSystem, SearchSpaceTooLarge, DimensionMismatch, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
