"""
Command-line front end.

Subcommands:

- ``simulate``: Monte Carlo FER/BER sweep, CSV or JSON output.
- ``exit-scan``: off-line extrinsic-information scan over perturbation
  factors, CSV output.
- ``decode-frame``: decode one whitespace-separated LLR vector from a file
  and print the hard decisions and iteration count.

Every flag can also be supplied through ``--config FILE`` holding
``key = value`` lines (keys are the flag names without the leading dashes);
explicit flags win over file values.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import exitscan, harness
from .abp import DecoderConfig
from .codes import ProductCode


def _parse_snr(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) == 1:
        v = float(parts[0])
        return v, 1.0, v
    if len(parts) == 3:
        return float(parts[0]), float(parts[1]), float(parts[2])
    raise argparse.ArgumentTypeError(
        f"expected START:STEP:STOP or a single value, got {text!r}")


def _parse_rho_grid(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",") if v != ""]


def _parse_float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v != ""]


def _parse_threshold(text: str):
    if text.strip().lower() == "auto":
        return None
    return float(text)


def read_config_file(path: str) -> dict:
    """Parse simple ``key = value`` lines; '#' starts a comment."""
    values: dict = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"cannot parse config line {raw!r}")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip().strip("'\"")
    return values


def _apply_config_file(parser: argparse.ArgumentParser, argv: list) -> list:
    """Pull --config out of argv and install its values as parser defaults."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    path = argv[idx + 1]
    argv = argv[:idx] + argv[idx + 2:]
    raw = read_config_file(path)
    defaults = {}
    for action in parser._actions:
        if action.dest in raw:
            value = raw[action.dest]
            if action.type is not None:
                value = action.type(value)
            defaults[action.dest] = value
            action.required = False
    parser.set_defaults(**defaults)
    return argv


def _add_decoder_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rho", type=int, default=None,
                   help="perturbation factor (default: per-code table)")
    p.add_argument("--alpha", type=float, default=0.15,
                   help="damping factor in (0, 1]")
    p.add_argument("--imax", type=int, default=None,
                   help="max iterations (default: 50 for RS, 20 for BCH)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--threshold-t", dest="threshold_t", type=_parse_threshold,
                   default=float("inf"),
                   help="reliability gate: a number, 'inf' (gate off, the "
                        "default), or 'auto' (tau * ln of avg check degree)")
    p.add_argument("--tau", type=float, default=1.0,
                   help="threshold multiplier when --threshold-t is unset")


def build_simulate_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hdpc simulate", add_help=True)
    p.add_argument("--code", required=True, help="e.g. rs:31,25 or bch:127,92")
    p.add_argument("--decoder", required=True, choices=harness.DECODER_IDS)
    p.add_argument("--snr", type=_parse_snr, required=True,
                   help="START:STEP:STOP in dB")
    p.add_argument("--max-frames", dest="max_frames", type=int, default=10000)
    p.add_argument("--min-errors", dest="min_errors", type=int, default=100)
    _add_decoder_flags(p)
    p.add_argument("--i-global", dest="i_global", type=int, default=8)
    p.add_argument("--i-local", dest="i_local", type=int, default=5)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"), default=None)
    return p


def cmd_simulate(argv: list) -> int:
    parser = build_simulate_parser()
    argv = _apply_config_file(parser, argv)
    args = parser.parse_args(argv)
    start, step, stop = args.snr
    config = harness.SimConfig(
        code=args.code, decoder=args.decoder, snr_start=start, snr_step=step,
        snr_stop=stop, max_frames=args.max_frames,
        min_frame_errors=args.min_errors, seed=args.seed, rho=args.rho,
        alpha=args.alpha, i_max=args.imax, threshold_T=args.threshold_t,
        tau=args.tau, i_global=args.i_global, i_local=args.i_local)
    result = harness.run_sweep(config)
    fmt = args.format or ("json" if args.out.endswith(".json") else "csv")
    harness.emit(result, fmt, args.out)
    for p in result.points:
        print(f"snr={p.snr_db:g} dB frames={p.frames} fer={p.fer:.3e} "
              f"ber={p.ber:.3e} mean_iters={p.mean_iters:.2f}")
    return 0


def cmd_exit_scan(argv: list) -> int:
    p = argparse.ArgumentParser(prog="hdpc exit-scan")
    p.add_argument("--code", required=True)
    p.add_argument("--ia", type=_parse_float_list, required=True,
                   help="comma-separated a-priori mutual informations")
    p.add_argument("--rho", type=_parse_rho_grid, default=list(range(7)),
                   help="grid, e.g. 0..6 or 0,1,3")
    p.add_argument("--frames", type=int, default=2000)
    p.add_argument("--imax", type=int, default=20)
    p.add_argument("--alpha", type=float, default=0.15)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    argv = _apply_config_file(p, argv)
    args = p.parse_args(argv)
    code_obj = harness.get_sim_code(args.code)
    if isinstance(code_obj, ProductCode):
        raise SystemExit("exit-scan runs on component codes only")
    cfg = exitscan.ExitConfig(
        i_a_points=tuple(args.ia), rho_grid=tuple(args.rho),
        frames=args.frames,
        decoder=DecoderConfig(alpha=args.alpha, i_max=args.imax),
        seed=args.seed)
    result = exitscan.scan_rho(code_obj, cfg)
    exitscan.write_csv(result, args.out)
    for i_a, rho in result.chosen.items():
        print(f"I_A={i_a:g}: chosen rho={rho}")
    return 0


def cmd_decode_frame(argv: list) -> int:
    p = argparse.ArgumentParser(prog="hdpc decode-frame")
    p.add_argument("--code", required=True)
    p.add_argument("--decoder", choices=harness.DECODER_IDS, default="abp")
    p.add_argument("--llr-file", dest="llr_file", required=True)
    _add_decoder_flags(p)
    p.add_argument("--i-global", dest="i_global", type=int, default=8)
    p.add_argument("--i-local", dest="i_local", type=int, default=5)
    argv = _apply_config_file(p, argv)
    args = p.parse_args(argv)
    code_obj = harness.get_sim_code(args.code)
    with open(args.llr_file) as fh:
        llr = np.array([float(v) for v in fh.read().split()])
    if llr.shape[0] != code_obj.n_bits:
        raise SystemExit(
            f"expected {code_obj.n_bits} LLRs, got {llr.shape[0]}")
    if isinstance(code_obj, ProductCode):
        llr = llr.reshape(code_obj.spec.n1, code_obj.spec.n2)
    sim = harness.SimConfig(code=args.code, decoder=args.decoder,
                            rho=args.rho, alpha=args.alpha, i_max=args.imax,
                            threshold_T=args.threshold_t, tau=args.tau,
                            i_global=args.i_global, i_local=args.i_local)
    params = harness.resolve_decoder_params(sim, code_obj)
    bits, iters, success, _ = harness.decode_llr(
        code_obj, args.decoder, llr, params,
        np.random.SeedSequence(args.seed))
    print("".join(str(b) for b in np.asarray(bits).reshape(-1)))
    print(f"iterations={iters} success={success}")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    commands = {"simulate": cmd_simulate, "exit-scan": cmd_exit_scan,
                "decode-frame": cmd_decode_frame}
    if not argv or argv[0] in ("-h", "--help"):
        print("usage: hdpc {simulate,exit-scan,decode-frame} [options]\n"
              "       hdpc <command> --help for command options")
        return 0
    cmd = argv[0]
    if cmd not in commands:
        print(f"unknown command {cmd!r}; expected one of "
              f"{sorted(commands)}", file=sys.stderr)
        return 2
    return commands[cmd](argv[1:])


if __name__ == "__main__":
    raise SystemExit(main())
