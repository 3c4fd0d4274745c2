"""
Monte Carlo FER/BER simulation over the decoder zoo.

A sweep point runs independent frames (random payload, encode, BPSK, AWGN,
LLR, decode, compare) until either the frame budget or the early-stop error
target is reached. Every random draw comes from a substream keyed by
(master seed, SNR index, frame index), so results are bit-identical across
reruns and worker counts; the early stop is evaluated on the frame-index
prefix order for the same reason.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import channel, product, tanner
from .abp import DecoderConfig, abp_decode
from .codes import Code, InvalidParameters, ProductCode, get_code
from .product import ProductConfig, pl_p_abp_p_decode, product_encode
from .schedulers import SchedulerConfig, hd_p_abp_decode, pl_p_abp_decode


class UnknownCode(ValueError):
    pass


class UnknownDecoder(ValueError):
    pass


DECODER_IDS = ("abp", "pl-p-abp", "hd-p-abp", "pl-p-abp-p",
               "flooding-bp", "layered-bp", "shuffled-bp")

# perturbation factors from the off-line extrinsic-information scan
DEFAULT_RHO = {
    "bch:127,92": 1,
    "bch:128,64": 1,
    "rs:31,25": 2,
    "rs:63,55": 2,
    "rs:15,11": 1,
    "rs-product:15,11": 1,
}

DEFAULT_I_MAX = {"rs": 50, "bch": 20, "bch-ext": 20, "hamming": 20}

CSV_COLUMNS = ("snr_db,frames,frame_errors,bit_errors,fer,ber,mean_iters,"
               "fer_ci_lo,fer_ci_hi,c2v_updates,v2c_updates,residual_comps,"
               "real_comparisons")

RESULT_SCHEMA = {
    "type": "object",
    "required": ["config", "points"],
    "properties": {
        "config": {"type": "object"},
        "points": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "snr_db", "frames", "frame_errors", "bit_errors", "fer",
                    "ber", "mean_iters", "fer_ci_lo", "fer_ci_hi",
                    "c2v_updates", "v2c_updates", "residual_comps",
                    "real_comparisons",
                ],
                "properties": {
                    "snr_db": {"type": "number"},
                    "frames": {"type": "integer", "minimum": 0},
                    "frame_errors": {"type": "integer", "minimum": 0},
                    "bit_errors": {"type": "integer", "minimum": 0},
                    "fer": {"type": "number"},
                    "ber": {"type": "number"},
                    "mean_iters": {"type": "number"},
                    "fer_ci_lo": {"type": "number"},
                    "fer_ci_hi": {"type": "number"},
                    "c2v_updates": {"type": "integer"},
                    "v2c_updates": {"type": "integer"},
                    "residual_comps": {"type": "integer"},
                    "real_comparisons": {"type": "integer"},
                },
            },
        },
    },
}


@dataclass
class SimConfig:
    code: str = "rs:31,25"
    decoder: str = "abp"
    snr_start: float = 4.0
    snr_step: float = 0.5
    snr_stop: float = 6.0
    max_frames: int = 10000
    min_frame_errors: int = 100
    seed: int = 42
    rho: Optional[int] = None
    alpha: float = 0.15
    i_max: Optional[int] = None
    threshold_T: Optional[float] = math.inf
    tau: float = 1.0
    i_global: int = 8
    i_local: int = 5

    def snr_points(self) -> list:
        if self.snr_step <= 0:
            raise ValueError("snr step must be positive")
        points = []
        snr = self.snr_start
        while snr <= self.snr_stop + 1e-9:
            points.append(round(snr, 10))
            snr += self.snr_step
        if not points:
            raise ValueError("empty SNR grid")
        return points


@dataclass
class PointResult:
    snr_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    mean_iters: float
    fer_ci_lo: float
    fer_ci_hi: float
    c2v_updates: int
    v2c_updates: int
    residual_comps: int
    real_comparisons: int


@dataclass
class SimResult:
    config: SimConfig
    points: list = field(default_factory=list)


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054
                    ) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def resolve_decoder_params(config: SimConfig, code_obj) -> dict:
    """Fill per-code defaults for rho and i_max."""
    if isinstance(code_obj, ProductCode):
        family = "rs"
    else:
        family = code_obj.spec.family
    i_max = config.i_max if config.i_max is not None else DEFAULT_I_MAX.get(
        family, 20)
    if config.rho is not None:
        rho = config.rho
    elif config.decoder in ("pl-p-abp", "hd-p-abp", "pl-p-abp-p"):
        rho = DEFAULT_RHO.get(config.code, 1)
    else:
        rho = 0
    return {"rho": rho, "i_max": i_max, "alpha": config.alpha,
            "threshold_T": config.threshold_T, "tau": config.tau,
            "i_global": config.i_global, "i_local": config.i_local}


def get_sim_code(code_id: str):
    try:
        return get_code(code_id)
    except InvalidParameters as exc:
        raise UnknownCode(str(exc)) from exc


def decode_llr(code_obj, decoder_id: str, llr: np.ndarray, params: dict,
               seed) -> tuple[np.ndarray, int, bool, dict]:
    """Dispatch one LLR frame to a decoder; returns
    (bits, iterations, success, counter totals)."""
    zero_counters = {"c2v": 0, "v2c": 0, "residuals": 0, "comparisons": 0,
                     "dsvnf_c2v": 0}
    if decoder_id == "pl-p-abp-p":
        if not isinstance(code_obj, ProductCode):
            raise UnknownDecoder("pl-p-abp-p requires a product code")
        cfg = ProductConfig(
            i_global=params["i_global"], i_local=params["i_local"],
            component=SchedulerConfig(
                rho=params["rho"], alpha=params["alpha"],
                i_max=params["i_max"], seed=seed,
                threshold_T=params["threshold_T"], tau=params["tau"]))
        res = pl_p_abp_p_decode(code_obj, llr, cfg)
        return (res.bits, res.global_iterations, res.success,
                res.counters.totals)
    if isinstance(code_obj, ProductCode):
        raise UnknownDecoder(f"{decoder_id} does not decode product codes")
    pcm = code_obj.pcm
    if decoder_id == "abp":
        cfg = DecoderConfig(rho=params["rho"], alpha=params["alpha"],
                            i_max=params["i_max"], seed=seed)
        res = abp_decode(pcm, llr, cfg)
        return res.bits, res.iterations, res.success, res.counters.totals
    if decoder_id in ("pl-p-abp", "hd-p-abp"):
        cfg = SchedulerConfig(rho=params["rho"], alpha=params["alpha"],
                              i_max=params["i_max"], seed=seed,
                              threshold_T=params["threshold_T"],
                              tau=params["tau"])
        fn = pl_p_abp_decode if decoder_id == "pl-p-abp" else hd_p_abp_decode
        res = fn(pcm, llr, cfg)
        return res.bits, res.iterations, res.success, res.counters.totals
    if decoder_id in ("flooding-bp", "layered-bp", "shuffled-bp"):
        bits, iters, ok = tanner.bp_decode(
            pcm, llr, params["i_max"],
            scheduling=decoder_id.removesuffix("-bp"))
        return bits, iters, ok, zero_counters
    raise UnknownDecoder(f"unknown decoder id {decoder_id!r}")


def run_frame(code_obj, decoder_id: str, noise: channel.NoiseModel,
              params: dict, master_seed: int, snr_index: int,
              frame_index: int) -> tuple[bool, int, int, dict]:
    """Full pipeline for one frame; returns
    (frame_error, bit_errors, iterations, counter totals)."""
    rng = channel.frame_rng(master_seed, snr_index, frame_index, 0)
    if isinstance(code_obj, ProductCode):
        message = rng.integers(
            0, 2, size=(code_obj.spec.k1, code_obj.spec.k2), dtype=np.uint8)
        codeword = product_encode(code_obj, message)
    else:
        message = rng.integers(0, 2, size=code_obj.k_bits, dtype=np.uint8)
        codeword = code_obj.encode(message)
    symbols = channel.bpsk_modulate(codeword.reshape(-1))
    received = channel.awgn(symbols, noise, rng)
    llr = channel.channel_llr(received, noise).reshape(codeword.shape)
    dec_seed = np.random.SeedSequence(
        (master_seed, snr_index, frame_index, 1))
    bits, iters, _, counters = decode_llr(code_obj, decoder_id, llr, params,
                                          dec_seed)
    diff = int(np.count_nonzero(bits != codeword))
    return diff > 0, diff, iters, counters


def worker_count() -> int:
    env = os.environ.get("HDPC_THREADS")
    limit = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(limit, os.cpu_count() or 1))


def run_point(config: SimConfig, snr_db: float,
              snr_index: int = 0) -> PointResult:
    """Simulate one SNR point with prefix-ordered early stopping.

    Frames run until ``max_frames`` or until the cumulative error count
    reaches ``min_frame_errors`` at some frame index; only frames up to that
    index contribute, so the estimate does not depend on the worker count.
    """
    if config.decoder not in DECODER_IDS:
        raise UnknownDecoder(f"unknown decoder id {config.decoder!r}")
    code_obj = get_sim_code(config.code)
    params = resolve_decoder_params(config, code_obj)
    noise = channel.NoiseModel(snr_db=snr_db, rate=code_obj.rate)
    n_bits = code_obj.n_bits

    workers = worker_count()
    results: list[tuple[bool, int, int, dict]] = []
    stop_at = None
    block = 256
    frame = 0
    scanned = 0
    errors_so_far = 0
    while frame < config.max_frames:
        count = min(block, config.max_frames - frame)
        indices = range(frame, frame + count)
        if workers > 1:
            results.extend(_run_frames_parallel(
                config, code_obj, params, noise, snr_db, snr_index, indices,
                workers))
        else:
            for f in indices:
                results.append(run_frame(code_obj, config.decoder, noise,
                                         params, config.seed, snr_index, f))
        frame += count
        # early stop on the first frame index reaching the error target
        while scanned < len(results):
            errors_so_far += int(results[scanned][0])
            scanned += 1
            if errors_so_far >= config.min_frame_errors:
                stop_at = scanned
                break
        if stop_at is not None:
            break
    if stop_at is not None:
        results = results[:stop_at]

    frames = len(results)
    frame_errors = sum(int(r[0]) for r in results)
    bit_errors = sum(r[1] for r in results)
    mean_iters = (sum(r[2] for r in results) / frames) if frames else 0.0
    ci_lo, ci_hi = wilson_interval(frame_errors, frames)
    totals = {"c2v": 0, "v2c": 0, "residuals": 0, "comparisons": 0}
    for r in results:
        for key in totals:
            totals[key] += r[3].get(key, 0)
    return PointResult(
        snr_db=snr_db, frames=frames, frame_errors=frame_errors,
        bit_errors=bit_errors,
        fer=frame_errors / frames if frames else 0.0,
        ber=bit_errors / (frames * n_bits) if frames else 0.0,
        mean_iters=mean_iters, fer_ci_lo=ci_lo, fer_ci_hi=ci_hi,
        c2v_updates=totals["c2v"], v2c_updates=totals["v2c"],
        residual_comps=totals["residuals"],
        real_comparisons=totals["comparisons"])


def _run_frames_parallel(config, code_obj, params, noise, snr_db, snr_index,
                         indices, workers):
    import multiprocessing as mp

    ctx = mp.get_context("fork")
    args = [(config.code, config.decoder, noise, params, config.seed,
             snr_index, f) for f in indices]
    with ctx.Pool(workers) as pool:
        return pool.starmap(_frame_by_code_id, args, chunksize=32)


def _frame_by_code_id(code_id, decoder_id, noise, params, seed, snr_index,
                      frame_index):
    return run_frame(get_sim_code(code_id), decoder_id, noise, params, seed,
                     snr_index, frame_index)


def run_sweep(config: SimConfig) -> SimResult:
    result = SimResult(config=config)
    for idx, snr in enumerate(config.snr_points()):
        result.points.append(run_point(config, snr, idx))
    return result


class IoError(OSError):
    pass


def emit(result: SimResult, fmt: str, path: str) -> None:
    """Write a sweep result as CSV (fixed column order) or JSON."""
    try:
        if fmt == "csv":
            lines = [CSV_COLUMNS]
            for p in result.points:
                lines.append(",".join([
                    repr(p.snr_db), str(p.frames), str(p.frame_errors),
                    str(p.bit_errors), repr(p.fer), repr(p.ber),
                    repr(p.mean_iters), repr(p.fer_ci_lo), repr(p.fer_ci_hi),
                    str(p.c2v_updates), str(p.v2c_updates),
                    str(p.residual_comps), str(p.real_comparisons)]))
            with open(path, "w") as fh:
                fh.write("\n".join(lines) + "\n")
        elif fmt == "json":
            payload = {"config": asdict(result.config),
                       "points": [asdict(p) for p in result.points]}
            with open(path, "w") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
        else:
            raise ValueError(f"unknown format {fmt!r}")
    except OSError as exc:
        raise IoError(str(exc)) from exc
