import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

# keep unit tests single-threaded and reproducible
os.environ.setdefault("HDPC_THREADS", "1")


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0DEC)


@pytest.fixture(scope="session")
def hamming():
    from hdpc import codes
    return codes.get_code("hamming:7,4")


@pytest.fixture(scope="session")
def rs31():
    from hdpc import codes
    return codes.get_code("rs:31,25")


@pytest.fixture(scope="session")
def bch127():
    from hdpc import codes
    return codes.get_code("bch:127,92")


def make_frame(code, snr_db, seed):
    """Encode a random message and push it through the channel."""
    from hdpc import channel
    rng = channel.frame_rng(seed, 0)
    noise = channel.NoiseModel(snr_db=snr_db, rate=code.rate)
    msg = rng.integers(0, 2, code.k_bits, dtype=np.uint8)
    cw = code.encode(msg)
    received = channel.awgn(channel.bpsk_modulate(cw), noise, rng)
    return cw, channel.channel_llr(received, noise)
