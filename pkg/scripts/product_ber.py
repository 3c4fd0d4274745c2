#!/usr/bin/env python3
"""BER curve for the RS product code under row/column turbo decoding.

    python scripts/product_ber.py --snr 4.0:0.5:7.0 --max-frames 500
"""

import argparse

from hdpc import harness


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--code", default="rs-product:15,11")
    ap.add_argument("--snr", default="4.0:0.5:7.0")
    ap.add_argument("--max-frames", type=int, default=300)
    ap.add_argument("--min-errors", type=int, default=50)
    ap.add_argument("--i-global", type=int, default=8)
    ap.add_argument("--i-local", type=int, default=5)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out", default="product_ber.csv")
    args = ap.parse_args()

    start, step, stop = (float(v) for v in args.snr.split(":"))
    config = harness.SimConfig(
        code=args.code, decoder="pl-p-abp-p", snr_start=start, snr_step=step,
        snr_stop=stop, max_frames=args.max_frames,
        min_frame_errors=args.min_errors, seed=args.seed, i_max=5,
        i_global=args.i_global, i_local=args.i_local)
    result = harness.run_sweep(config)
    harness.emit(result, "csv", args.out)
    print(f"wrote {args.out}")
    for p in result.points:
        print(f"snr={p.snr_db:5.2f} frames={p.frames:5d} ber={p.ber:.3e} "
              f"fer={p.fer:.3e} mean_global_iters={p.mean_iters:.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
