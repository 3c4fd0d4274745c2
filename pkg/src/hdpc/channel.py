"""
BPSK over AWGN and the matching channel LLRs.

Conventions used throughout the project:

- bit 0 maps to -1 and bit 1 to +1, so that the channel LLR
  L(v_n) = log p(y|v_n=1)/p(y|v_n=0) = 2 y_n / sigma^2 is positive exactly
  when bit 1 is the more likely hypothesis;
- SNR is Eb/N0 in dB with code-rate scaling,
  sigma^2 = 1 / (2 * rate * 10^(snr_db/10)).

Noise is drawn from an explicitly passed numpy Generator so that frames can
be produced from disjoint, reproducible substreams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ZeroVariance(ValueError):
    """LLR computation requires a strictly positive noise variance."""


@dataclass(frozen=True)
class NoiseModel:
    snr_db: float
    rate: float

    @property
    def sigma_squared(self) -> float:
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.snr_db / 10.0))

    @property
    def sigma(self) -> float:
        return self.sigma_squared ** 0.5


def noise_for_sigma_squared(sigma_squared: float) -> NoiseModel:
    """NoiseModel pinned to an explicit variance (rate 1/2 placeholder)."""
    if sigma_squared <= 0:
        raise ZeroVariance("sigma^2 must be positive")
    snr_db = 10.0 * np.log10(1.0 / sigma_squared)
    return NoiseModel(snr_db=snr_db, rate=0.5)


def bpsk_modulate(bits: np.ndarray) -> np.ndarray:
    """Map bits to symbols: 0 -> -1, 1 -> +1."""
    bits = np.asarray(bits)
    return 2.0 * bits.astype(np.float64) - 1.0


def awgn(symbols: np.ndarray, noise: NoiseModel, rng: np.random.Generator) -> np.ndarray:
    """y = x + w with w ~ N(0, sigma^2) i.i.d. per dimension."""
    sigma2 = noise.sigma_squared
    if sigma2 <= 0:
        raise ZeroVariance("sigma^2 must be positive")
    return symbols + rng.normal(0.0, np.sqrt(sigma2), size=symbols.shape)


def channel_llr(received: np.ndarray, noise: NoiseModel) -> np.ndarray:
    """Per-bit LLRs 2 y / sigma^2 (positive favours bit 1)."""
    sigma2 = noise.sigma_squared
    if sigma2 <= 0:
        raise ZeroVariance("sigma^2 must be positive")
    return 2.0 * np.asarray(received, dtype=np.float64) / sigma2


def frame_rng(master_seed: int, *stream_key: int) -> np.random.Generator:
    """Independent, reproducible substream keyed by (seed, indices...).

    Built on numpy's SeedSequence so that streams are statistically
    independent and identical regardless of evaluation order or worker count.
    """
    return np.random.default_rng(np.random.SeedSequence((master_seed, *stream_key)))
