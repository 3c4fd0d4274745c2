"""
Off-line extrinsic-information scan for choosing the perturbation factor.

The adaptive decoder is treated as a black box: synthetic a-priori LLRs of a
prescribed mutual information I_A are fed in, the extrinsic output quality
I_E and the iteration count are measured, and the perturbation factor with
the best (I_E, iterations) pair is selected per I_A point. No attempt is
made to track information flow through the per-iteration graphs, which
change under the decoder.

A-priori LLRs follow the Gaussian-consistent model: mean (sigma^2/2) * (2X-1)
and standard deviation sigma, with sigma obtained from I_A through the usual
three-constant inverse-J approximation.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .abp import DecoderConfig, abp_decode
from .channel import frame_rng
from .codes import Code, LengthMismatch

H1 = 0.3073
H2 = 0.8935
H3 = 1.1064

LN2 = float(np.log(2.0))


class DomainError(ValueError):
    """Mutual information arguments must lie in [0, 1)."""


def j_inverse(i_a: float) -> float:
    """Approximate LLR standard deviation producing mutual information i_a."""
    if not (0.0 <= i_a < 1.0):
        raise DomainError(f"I_A must be in [0, 1), got {i_a}")
    if i_a == 0.0:
        return 0.0
    inner = -np.log2(1.0 - i_a ** (1.0 / H3)) / H1
    return float(inner ** (1.0 / (2.0 * H2)))


def apriori_llr(x_bits: np.ndarray, sigma_a: float,
                rng: np.random.Generator) -> np.ndarray:
    """Gaussian-consistent a-priori LLRs for the bit sequence ``x_bits``.

    L_A = (sigma^2 / 2)(2X - 1) + sigma * N(0, 1); variance equals twice the
    conditional mean, the consistency condition for BPSK LLRs.
    """
    if sigma_a < 0:
        raise ValueError("sigma_a must be nonnegative")
    x = np.asarray(x_bits, dtype=np.float64)
    return (sigma_a ** 2 / 2.0) * (2.0 * x - 1.0) + sigma_a * rng.normal(
        size=x.shape)


def binary_entropy_of_confidence(abs_llr: np.ndarray) -> np.ndarray:
    """H_b(p) for the confidence p = 1/(1 + e^-|l|), stable for large |l|.

    This is the calibrated-posterior entropy; averaged over genuinely
    Gaussian-consistent LLRs it estimates the same conditional entropy as
    the sign-paired soft estimate in :func:`mutual_info`, but it is blind to
    sign errors (binary entropy is symmetric in p vs 1-p)."""
    a = np.abs(np.asarray(abs_llr, dtype=np.float64))
    p_err = 1.0 / (1.0 + np.exp(a))
    return np.log1p(np.exp(-a)) / LN2 + p_err * a / LN2


def mutual_info(llr_ext: np.ndarray, x_bits: np.ndarray) -> float:
    """Per-bit mutual information estimate, sign-paired with the true bits.

    Each bit contributes 1 - min(log2(1 + e^-t), 1) with t = (2x - 1) * l:
    a correctly signed bit contributes its soft information and a wrongly
    signed bit contributes zero (one full bit of conditional entropy, the
    cap of the binary entropy range). The sign pairing is what makes the
    estimate rank decoder configurations sensibly: a run that converges
    confidently to a wrong codeword scores as uninformative instead of
    perfect, which a magnitude-only entropy cannot distinguish (it is
    symmetric in p vs 1-p; see :func:`binary_entropy_of_confidence`).
    """
    llr_ext = np.asarray(llr_ext, dtype=np.float64)
    x = np.asarray(x_bits)
    if llr_ext.shape != x.shape:
        raise LengthMismatch(
            f"LLR/bit length mismatch: {llr_ext.shape} vs {x.shape}")
    t = (2.0 * x.astype(np.float64) - 1.0) * llr_ext
    # log2(1 + e^-t) evaluated without overflow for t of either sign
    soft_bits = np.where(t > 0, np.log1p(np.exp(-np.abs(t))),
                         np.abs(t) + np.log1p(np.exp(-np.abs(t)))) / LN2
    value = 1.0 - float(np.mean(np.minimum(soft_bits, 1.0)))
    return min(max(value, 0.0), 1.0)


@dataclass
class ExitConfig:
    i_a_points: Sequence[float] = (0.75, 0.82)
    rho_grid: Sequence[int] = tuple(range(7))
    frames: int = 2000
    decoder: DecoderConfig = field(default_factory=DecoderConfig)
    seed: int = 0


@dataclass
class ExitCell:
    i_a: float
    rho: int
    mean_ie: float
    mean_iter: float
    frames: int
    stderr_ie: float


@dataclass
class ExitResult:
    cells: list
    chosen: dict

    def cell(self, i_a: float, rho: int) -> ExitCell:
        for c in self.cells:
            if c.i_a == i_a and c.rho == rho:
                return c
        raise KeyError((i_a, rho))


def scan_rho(code: Code, config: ExitConfig) -> ExitResult:
    """Characterise the decoder over (I_A, rho) and pick rho per I_A.

    All-zero codewords are transmitted (the code is linear); each cell uses
    its own derived random substreams, so cells can be evaluated in any
    order with identical results.

    Selection applies the maximum-I_E / minimum-iterations pair
    statistically: every rho whose mean I_E lies within one standard error
    of the best cell counts as tied for the maximum, the tie is broken by
    the smaller mean iteration count, then by the smaller rho. An exact
    float argmax would make the iteration criterion dead code, since Monte
    Carlo means never tie exactly.
    """
    n_bits = code.n_bits
    x = np.zeros(n_bits, dtype=np.uint8)
    cells: list[ExitCell] = []
    for ia_idx, i_a in enumerate(config.i_a_points):
        sigma_a = j_inverse(i_a)
        for rho_idx, rho in enumerate(config.rho_grid):
            ies = np.empty(config.frames)
            iters = np.empty(config.frames)
            for f in range(config.frames):
                rng = frame_rng(config.seed, ia_idx, rho_idx, f, 0)
                llr_a = apriori_llr(x, sigma_a, rng)
                dec_cfg = DecoderConfig(
                    rho=rho, alpha=config.decoder.alpha,
                    i_max=config.decoder.i_max,
                    seed=np.random.SeedSequence(
                        (config.seed, ia_idx, rho_idx, f, 1)))
                result = abp_decode(code.pcm, llr_a, dec_cfg)
                ies[f] = mutual_info(result.llr_out - np.clip(llr_a, -40, 40),
                                     x)
                iters[f] = result.iterations
            cells.append(ExitCell(
                i_a=i_a, rho=rho, mean_ie=float(ies.mean()),
                mean_iter=float(iters.mean()), frames=config.frames,
                stderr_ie=float(ies.std(ddof=1) / np.sqrt(config.frames))
                if config.frames > 1 else 0.0))
    chosen = {}
    for i_a in config.i_a_points:
        group = [c for c in cells if c.i_a == i_a]
        top = max(group, key=lambda c: c.mean_ie)
        tied = [c for c in group if c.mean_ie >= top.mean_ie - top.stderr_ie]
        best = min(tied, key=lambda c: (c.mean_iter, c.rho))
        chosen[i_a] = best.rho
    return ExitResult(cells=cells, chosen=chosen)


def write_csv(result: ExitResult, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i_a", "rho", "mean_ie", "mean_iter", "frames",
                         "stderr_ie"])
        for c in result.cells:
            writer.writerow([f"{c.i_a:.6g}", c.rho, f"{c.mean_ie:.8g}",
                             f"{c.mean_iter:.8g}", c.frames,
                             f"{c.stderr_ie:.8g}"])
