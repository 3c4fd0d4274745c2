#!/usr/bin/env python3
"""FER / convergence comparison sweep across the decoder family.

Runs every requested decoder over an SNR grid on one code and writes one
CSV per decoder, plus a side-by-side summary to stdout. Typical use:

    python scripts/fer_sweep.py --code rs:31,25 --snr 3.0:0.25:4.5 \
        --max-frames 20000 --min-errors 150 --out-dir results/
"""

import argparse
import os

from hdpc import harness


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--code", default="rs:31,25")
    ap.add_argument("--decoders", default="abp,pl-p-abp,hd-p-abp")
    ap.add_argument("--snr", default="3.0:0.5:4.5")
    ap.add_argument("--max-frames", type=int, default=10000)
    ap.add_argument("--min-errors", type=int, default=100)
    ap.add_argument("--alpha", type=float, default=0.15)
    ap.add_argument("--imax", type=int, default=None)
    ap.add_argument("--rho", type=int, default=None)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args()

    start, step, stop = (float(v) for v in args.snr.split(":"))
    os.makedirs(args.out_dir, exist_ok=True)
    results = {}
    for decoder in args.decoders.split(","):
        config = harness.SimConfig(
            code=args.code, decoder=decoder, snr_start=start, snr_step=step,
            snr_stop=stop, max_frames=args.max_frames,
            min_frame_errors=args.min_errors, seed=args.seed,
            alpha=args.alpha, i_max=args.imax, rho=args.rho)
        result = harness.run_sweep(config)
        path = os.path.join(args.out_dir,
                            f"{args.code.replace(':', '_')}_{decoder}.csv")
        harness.emit(result, "csv", path)
        results[decoder] = result
        print(f"wrote {path}")

    print(f"\n{'snr':>6} | " + " | ".join(f"{d:^24}" for d in results))
    print(f"{'':>6} | " + " | ".join(f"{'fer':>10} {'iters':>8} " for _ in results))
    n_points = len(next(iter(results.values())).points)
    for i in range(n_points):
        row = [f"{next(iter(results.values())).points[i].snr_db:6.2f}"]
        for decoder in results:
            p = results[decoder].points[i]
            row.append(f"{p.fer:10.3e} {p.mean_iters:8.2f} ")
        print(" | ".join(row))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
