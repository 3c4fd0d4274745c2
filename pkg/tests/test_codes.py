import itertools

import numpy as np
import pytest

from hdpc import bitmatrix, codes
from hdpc.galois import Field
from reference import all_codewords, gf2_mul_vec


def test_bch_127_92():
    pcm = codes.bch_parity_check(7, 5)
    assert pcm.cols == 127
    assert pcm.rows == 35
    assert bitmatrix.rank(pcm.dense()) == 35


def test_bch_7_4():
    pcm = codes.bch_parity_check(3, 1)
    assert (pcm.rows, pcm.cols) == (3, 7)


def test_bch_weight3_syndromes_distinct():
    # d >= 7 for t=3, so error patterns of weight <= 3 have unique syndromes
    pcm = codes.bch_parity_check(5, 3)
    n = pcm.cols
    seen = {}
    for w in range(4):
        for positions in itertools.combinations(range(n), w):
            pattern = np.zeros(n, dtype=np.uint8)
            pattern[list(positions)] = 1
            key = pcm.syndrome_bits(pattern).tobytes()
            assert key not in seen, (positions, seen[key])
            seen[key] = positions


def test_rs_binary_images():
    rs31 = codes.rs_parity_check(5, 3)
    assert (rs31.rows, rs31.cols) == (30, 155)
    rs15 = codes.rs_parity_check(4, 2)
    assert (rs15.rows, rs15.cols) == (16, 60)


@pytest.mark.parametrize("code_id", ["hamming:7,4", "bch:127,92", "bch:128,64",
                                     "rs:15,11", "rs:31,25", "rs:63,55"])
def test_random_codewords_satisfy_checks(code_id, rng):
    code = codes.get_code(code_id)
    assert bitmatrix.rank(code.pcm.dense()) == code.pcm.rows
    messages = rng.integers(0, 2, (200, code.k_bits), dtype=np.uint8)
    for cw in code.encode_batch(messages):
        assert not code.pcm.syndrome_bits(cw).any()


def test_extended_bch_128_64():
    code = codes.get_code("bch:128,64")
    assert (code.n_bits, code.k_bits) == (128, 64)
    assert code.rate == 0.5
    # every codeword has even overall parity
    msg = np.arange(64, dtype=np.uint8) % 2
    assert code.encode(msg).sum() % 2 == 0


def test_rs_generator_poly_small():
    fld = Field.default(3)
    g = codes.rs_generator_poly(fld, t=1, b=1)
    # (x - b)(x - b^2) = x^2 + b^4 x + b^3
    assert g == [fld.beta_pow(3), fld.beta_pow(4), 1]
    assert len(g) - 1 == 2


@pytest.mark.parametrize("m,t,b", [(3, 1, 1), (4, 2, 1), (5, 3, 1), (4, 2, 3)])
def test_rs_generator_poly_roots_and_degree(m, t, b):
    fld = Field.default(m)
    g = codes.rs_generator_poly(fld, t, b)
    assert len(g) - 1 == 2 * t
    assert g[-1] == 1
    for i in range(2 * t):
        root = fld.beta_pow(b + i)
        acc = 0
        for d, coef in enumerate(g):
            acc ^= fld.mul(coef, fld.pow(root, d))
        assert acc == 0


def test_rs_generator_poly_consistent_with_binary_image():
    # c(x) = m(x) g(x) evaluated through the binary expansion must satisfy
    # the binary parity checks
    m, t = 4, 2
    fld = Field.default(m)
    code = codes.get_code("rs:15,11")
    g = codes.rs_generator_poly(fld, t)
    rng = np.random.default_rng(7)
    for _ in range(20):
        msg = rng.integers(0, 16, 11)
        cw_sym = [0] * 15
        for d, coef in enumerate(msg):
            for e, gc in enumerate(g):
                cw_sym[d + e] ^= fld.mul(int(coef), gc)
        bits = np.concatenate([fld.to_binary_column(s) for s in cw_sym])
        assert not code.pcm.syndrome_bits(bits).any()


def test_encode_zero_message(hamming):
    assert not hamming.encode(np.zeros(4, dtype=np.uint8)).any()


def test_encode_systematic_and_parity(hamming):
    msg = np.array([1, 0, 1, 1], dtype=np.uint8)
    cw = hamming.encode(msg)
    assert np.array_equal(cw[hamming.info_cols], msg)
    assert not hamming.pcm.syndrome_bits(cw).any()
    # parity bits solve the check equations directly
    h = hamming.pcm.dense().astype(np.int64)
    assert not ((h @ cw) % 2).any()


def test_encode_length_mismatch(hamming):
    with pytest.raises(codes.LengthMismatch):
        hamming.encode(np.zeros(5, dtype=np.uint8))


def test_rank_reduce_identity_unchanged():
    eye = np.eye(6, dtype=np.uint8)
    assert np.array_equal(codes.rank_reduce(eye).dense(), eye)


def test_rank_reduce_removes_duplicate_row():
    base = np.array([[1, 0, 1, 1], [0, 1, 1, 0], [1, 0, 1, 1]], dtype=np.uint8)
    reduced = codes.rank_reduce(base)
    assert reduced.rows == 2


def test_rank_reduce_bch_preserves_null_space(rng):
    # raw expansion is 2tm = 70 rows; reduction keeps the same code
    fld = Field.default(7)
    n = 127
    raw = np.zeros((70, n), dtype=np.uint8)
    for j in range(1, 11):
        for k in range(n):
            raw[(j - 1) * 7:j * 7, k] = fld.to_binary_column(fld.beta_pow(j * k))
    reduced = codes.rank_reduce(raw)
    assert reduced.rows == 35
    code = codes.get_code("bch:127,92")
    for msg in rng.integers(0, 2, (100, 92), dtype=np.uint8):
        cw = code.encode(msg)
        assert not gf2_mul_vec(raw, cw).any()
        assert not reduced.syndrome_bits(cw).any()


def test_hamming_fixture():
    spec, pcm = codes.hamming_7_4()
    assert (spec.n, spec.m_checks) == (7, 3)
    assert bitmatrix.rank(pcm.dense()) == 3
    words = all_codewords(pcm.dense())
    assert len(words) == 16
    weights = sorted(int(w.sum()) for w in words)
    assert weights[0] == 0 and weights[1] == 3


def test_product_dimensions():
    pc = codes.get_code("rs-product:15,11")
    spec = pc.spec
    assert (spec.n_p, spec.k_p) == (3600, 1936)
    assert spec.n_p == spec.n1 * spec.n2
    assert spec.k_p == spec.k1 * spec.k2
    assert spec.d_p == spec.spec1.d_min * spec.spec2.d_min


def test_registry_rejects_unknown():
    with pytest.raises(codes.InvalidParameters):
        codes.get_code("ldpc:64,32")
    with pytest.raises(codes.InvalidParameters):
        codes.get_code("bch:100,50")
    with pytest.raises(codes.InvalidParameters):
        codes.get_code("nonsense")


def test_registry_caches():
    assert codes.get_code("rs:31,25") is codes.get_code("rs:31,25")
