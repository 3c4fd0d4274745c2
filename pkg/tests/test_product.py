import numpy as np
import pytest

from hdpc import channel, codes
from hdpc.abp import CounterLog
from hdpc.product import (GatingEvent, ProductConfig, ProductFrame,
                          _decode_lines, pl_p_abp_p_decode, product_encode)
from hdpc.schedulers import SchedulerConfig


@pytest.fixture(scope="module")
def pc():
    return codes.get_code("rs-product:15,11")


def _product_frame(pc, snr_db, seed):
    rng = channel.frame_rng(seed, 0)
    noise = channel.NoiseModel(snr_db=snr_db, rate=pc.rate)
    msg = rng.integers(0, 2, (pc.spec.k1, pc.spec.k2), dtype=np.uint8)
    cw = product_encode(pc, msg)
    y = channel.awgn(channel.bpsk_modulate(cw.reshape(-1)), noise, rng)
    llr = channel.channel_llr(y, noise).reshape(cw.shape)
    return cw, llr


def test_encode_zero_message(pc):
    cw = product_encode(pc, np.zeros((pc.spec.k1, pc.spec.k2), dtype=np.uint8))
    assert not cw.any()


def test_encode_order_independent(pc, rng):
    msg = rng.integers(0, 2, (pc.spec.k1, pc.spec.k2), dtype=np.uint8)
    rows_first = pc.code1.encode_batch(
        pc.code2.encode_batch(msg).T).T
    cols_first = pc.code2.encode_batch(
        pc.code1.encode_batch(msg.T).T)
    assert np.array_equal(rows_first, cols_first)
    assert np.array_equal(product_encode(pc, msg), rows_first)


def test_encode_rows_and_columns_are_codewords(pc, rng):
    msg = rng.integers(0, 2, (pc.spec.k1, pc.spec.k2), dtype=np.uint8)
    cw = product_encode(pc, msg)
    assert cw.shape == (60, 60)
    for r in range(pc.spec.n1):
        assert not pc.code2.pcm.syndrome_bits(cw[r]).any()
    for c in range(pc.spec.n2):
        assert not pc.code1.pcm.syndrome_bits(cw[:, c]).any()


def test_encode_shape_mismatch(pc):
    with pytest.raises(codes.ShapeMismatch):
        product_encode(pc, np.zeros((44, 43), dtype=np.uint8))


def test_decode_shape_mismatch(pc):
    with pytest.raises(codes.ShapeMismatch):
        pl_p_abp_p_decode(pc, np.zeros((60, 59)), ProductConfig())


def test_noiseless_first_row_phase(pc, rng):
    msg = rng.integers(0, 2, (pc.spec.k1, pc.spec.k2), dtype=np.uint8)
    cw = product_encode(pc, msg)
    noise = channel.noise_for_sigma_squared(1e-4)
    llr = channel.channel_llr(channel.bpsk_modulate(cw.reshape(-1)),
                              noise).reshape(cw.shape)
    res = pl_p_abp_p_decode(pc, llr, ProductConfig(
        component=SchedulerConfig(rho=1, i_max=5, seed=1)))
    assert res.success and res.global_iterations == 1
    assert np.array_equal(res.bits, cw)
    assert {(e.global_iteration, e.phase) for e in res.gating_trace} \
        == {(1, "row")}


def test_failed_line_resets_to_channel(pc, rng):
    # feed one row garbage so its component decode fails; the gate must put
    # the channel values back
    msg = rng.integers(0, 2, (pc.spec.k1, pc.spec.k2), dtype=np.uint8)
    cw = product_encode(pc, msg)
    noise = channel.noise_for_sigma_squared(0.25)
    llr = channel.channel_llr(channel.bpsk_modulate(cw.reshape(-1)),
                              noise).reshape(cw.shape).copy()
    llr[7] = rng.normal(scale=3.0, size=pc.spec.n2)  # hopeless row
    channel_copy = np.clip(llr, -40, 40).copy()
    lines = np.clip(llr, -40, 40).copy()
    log = CounterLog()
    trace = []
    succ = _decode_lines(lines, None, channel_copy, pc.code2,
                         ProductConfig(i_local=2,
                                       component=SchedulerConfig(rho=1,
                                                                 i_max=2,
                                                                 seed=3)),
                         np.random.default_rng(3), log, trace, 1, "row")
    failed = [e.index for e in trace if not e.retained]
    for idx in failed:
        assert np.array_equal(lines[idx], channel_copy[idx])
    for e in trace:
        if e.retained:
            assert not pc.code2.pcm.syndrome_bits(
                (lines[e.index] > 0).astype(np.uint8)).any()
    assert succ == sum(e.retained for e in trace)
    assert 7 in failed


def test_retained_lines_are_valid_codewords(pc):
    # moderate SNR: some lines fail, every retained one must check out
    for seed in range(8):
        cw, llr = _product_frame(pc, 5.0, seed)
        res = pl_p_abp_p_decode(pc, llr, ProductConfig(
            component=SchedulerConfig(rho=1, i_max=5, seed=seed)))
        assert all(e.valid_codeword for e in res.gating_trace if e.retained)
        assert any(isinstance(e, GatingEvent) for e in res.gating_trace)


def test_decode_replay_deterministic(pc):
    cw, llr = _product_frame(pc, 5.5, 17)
    cfg = ProductConfig(component=SchedulerConfig(rho=1, i_max=5, seed=9))
    a = pl_p_abp_p_decode(pc, llr, cfg)
    b = pl_p_abp_p_decode(pc, ProductFrame.from_channel(llr),
                          ProductConfig(component=SchedulerConfig(rho=1,
                                                                  i_max=5,
                                                                  seed=9)))
    assert a.global_iterations == b.global_iterations
    assert np.array_equal(a.bits, b.bits)
    assert np.array_equal(a.llr_out, b.llr_out)


def test_decode_recovers_at_decent_snr(pc):
    errors = 0
    for seed in range(10):
        cw, llr = _product_frame(pc, 6.5, seed)
        res = pl_p_abp_p_decode(pc, llr, ProductConfig(
            component=SchedulerConfig(rho=1, i_max=5, seed=seed)))
        errors += int((res.bits != cw).any())
    assert errors <= 1


def test_config_validation():
    with pytest.raises(ValueError):
        ProductConfig(i_global=0).validate()
    with pytest.raises(ValueError):
        ProductConfig(i_local=0).validate()
