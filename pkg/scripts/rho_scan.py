#!/usr/bin/env python3
"""Off-line extrinsic-information scan for picking the perturbation factor.

Reproduces the characterisation used to ship the per-code defaults:

    python scripts/rho_scan.py --code bch:127,92 --ia 0.75,0.82 \
        --rho 0..6 --frames 2000 --imax 20 --out scan.csv
"""

import argparse

from hdpc import exitscan, harness
from hdpc.abp import DecoderConfig


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--code", default="bch:127,92")
    ap.add_argument("--ia", default="0.75,0.82")
    ap.add_argument("--rho", default="0..6")
    ap.add_argument("--frames", type=int, default=2000)
    ap.add_argument("--imax", type=int, default=20)
    ap.add_argument("--alpha", type=float, default=0.15)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--out", default="rho_scan.csv")
    args = ap.parse_args()

    if ".." in args.rho:
        lo, hi = args.rho.split("..")
        grid = tuple(range(int(lo), int(hi) + 1))
    else:
        grid = tuple(int(v) for v in args.rho.split(","))
    config = exitscan.ExitConfig(
        i_a_points=tuple(float(v) for v in args.ia.split(",")),
        rho_grid=grid, frames=args.frames,
        decoder=DecoderConfig(alpha=args.alpha, i_max=args.imax),
        seed=args.seed)
    result = exitscan.scan_rho(harness.get_sim_code(args.code), config)
    exitscan.write_csv(result, args.out)
    print(f"wrote {args.out}")
    for i_a in config.i_a_points:
        cells = [c for c in result.cells if c.i_a == i_a]
        print(f"I_A = {i_a}:")
        for c in cells:
            marker = " <- chosen" if result.chosen[i_a] == c.rho else ""
            print(f"  rho={c.rho}: I_E={c.mean_ie:.5f} "
                  f"(se {c.stderr_ie:.5f}) iters={c.mean_iter:.2f}{marker}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
