"""
Parity-check matrix constructions and systematic encoders.

Supported families: primitive narrow-sense BCH (binary), Reed-Solomon over
GF(2^m) expanded to its binary image, the (7,4) Hamming fixture, a
single-parity-bit extension of BCH for even lengths, and two-dimensional
product codes built from RS components.

Symbol matrices are expanded to bits and then reduced to a full-rank set of
M = N_binary - K_binary rows, which is the form every decoder consumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import bitmatrix
from .galois import Field

L_SYMBOL_FAMILIES = ("hamming", "bch", "bch-ext", "rs")


class InvalidParameters(ValueError):
    """Code parameters outside the constructible range."""


class LengthMismatch(ValueError):
    """Message or codeword length does not match the code dimensions."""


class ShapeMismatch(ValueError):
    """Array shape does not match the product-code dimensions."""


@dataclass(frozen=True)
class CodeSpec:
    """Identifying parameters of one component code.

    ``n`` and ``k`` are in the family's natural units (bits for Hamming/BCH,
    symbols for RS); ``n_bits``/``k_bits`` are always the binary-image sizes.
    """

    family: str
    n: int
    k: int
    t: int
    m: int
    b: int
    d_min: int
    n_bits: int
    k_bits: int

    @property
    def m_checks(self) -> int:
        return self.n_bits - self.k_bits

    @property
    def rate(self) -> float:
        return self.k_bits / self.n_bits


class ParityCheckMatrix:
    """Dense bit matrix over GF(2) with full row rank.

    Stores both a packed word representation (for elimination and syndrome
    computation) and a lazily built dense uint8 view (for graph construction).
    """

    def __init__(self, dense_bits: np.ndarray):
        dense_bits = np.ascontiguousarray(dense_bits, dtype=np.uint8) & 1
        self.rows, self.cols = dense_bits.shape
        self._dense = dense_bits
        self.words = bitmatrix.pack_rows(dense_bits)
        self._dense.setflags(write=False)
        self.words.setflags(write=False)

    def dense(self) -> np.ndarray:
        return self._dense

    def syndrome_bits(self, codeword_bits: np.ndarray) -> np.ndarray:
        """H @ c over GF(2), one bit per check row."""
        if codeword_bits.shape[-1] != self.cols:
            raise LengthMismatch(
                f"expected {self.cols} bits, got {codeword_bits.shape[-1]}"
            )
        return bitmatrix.mul_vec(self.words, codeword_bits)

    def __repr__(self) -> str:
        return f"ParityCheckMatrix({self.rows}x{self.cols})"


def rank_reduce(dense_bits: np.ndarray) -> ParityCheckMatrix:
    """Drop linearly dependent rows, preserving the row space.

    The symbol-level expansions of BCH codes contain conjugate rows that are
    dependent over GF(2); decoders need exactly M independent checks.
    """
    dense_bits = np.asarray(dense_bits, dtype=np.uint8)
    if dense_bits.size == 0:
        raise InvalidParameters("empty matrix")
    return ParityCheckMatrix(bitmatrix.independent_rows(dense_bits))


def bch_parity_check(m: int, t: int) -> ParityCheckMatrix:
    """Binary parity-check matrix of the t-error-correcting primitive
    narrow-sense BCH code of length 2^m - 1.

    Symbol row j (j = 1..2t) holds the powers beta^{jk}; each symbol is
    expanded to m binary rows via its coefficient column, then the stack is
    rank reduced.
    """
    if t < 1 or t >= (1 << (m - 1)):
        raise InvalidParameters(f"require 1 <= t < 2^(m-1), got t={t}, m={m}")
    fld = Field.default(m)
    n = (1 << m) - 1
    raw = np.zeros((2 * t * m, n), dtype=np.uint8)
    for j in range(1, 2 * t + 1):
        for k in range(n):
            raw[(j - 1) * m:j * m, k] = fld.to_binary_column(fld.beta_pow(j * k))
    return rank_reduce(raw)


def rs_parity_check(m: int, t: int, b: int = 1) -> ParityCheckMatrix:
    """Binary image of the RS parity-check matrix over GF(2^m).

    The 2t x N symbol matrix has entries beta^{(b+j)k}; every entry becomes
    an m x m companion block and every code symbol an m-bit column, giving a
    (2t*m) x (N*m) binary matrix of full rank 2t*m.
    """
    n = (1 << m) - 1
    if t < 1 or 2 * t >= n:
        raise InvalidParameters(f"require 1 <= t < (2^m - 1)/2, got t={t}, m={m}")
    fld = Field.default(m)
    raw = np.zeros((2 * t * m, n * m), dtype=np.uint8)
    for j in range(2 * t):
        for k in range(n):
            sym = fld.beta_pow((b + j) * k)
            raw[j * m:(j + 1) * m, k * m:(k + 1) * m] = fld.to_companion_block(sym)
    pcm = rank_reduce(raw)
    if pcm.rows != 2 * t * m:
        raise InvalidParameters("RS binary image lost rank unexpectedly")
    return pcm


def rs_generator_poly(fld: Field, t: int, b: int = 1) -> list[int]:
    """Coefficients (ascending degree) of g(x) = prod_{i=0}^{2t-1} (x - beta^{b+i})."""
    g = [1]
    for i in range(2 * t):
        root = fld.beta_pow(b + i)
        nxt = [0] * (len(g) + 1)
        for d, coef in enumerate(g):
            nxt[d + 1] ^= coef                 # x * g
            nxt[d] ^= fld.mul(root, coef)      # beta^{b+i} * g (char 2: minus = plus)
        g = nxt
    return g


def hamming_7_4() -> tuple[CodeSpec, ParityCheckMatrix]:
    """The (7,4) Hamming code as the t=1 primitive BCH of length 7."""
    pcm = bch_parity_check(3, 1)
    spec = CodeSpec(family="hamming", n=7, k=4, t=1, m=3, b=1,
                    d_min=3, n_bits=7, k_bits=4)
    return spec, pcm


class Code:
    """A component code: spec, parity checks, and a systematic encoder.

    The encoder is derived from the reduced row echelon form of H: non-pivot
    columns carry the message, pivot columns are solved from the parity
    equations. This works uniformly for every family here, including the
    parity-extended BCH where no cyclic generator exists.
    """

    def __init__(self, spec: CodeSpec, pcm: ParityCheckMatrix):
        self.spec = spec
        self.pcm = pcm
        rref, pivots = bitmatrix.row_echelon(pcm.dense())
        if len(pivots) != pcm.rows:
            raise InvalidParameters("parity-check matrix is rank deficient")
        pivot_set = set(pivots)
        self.pivot_cols = np.array(pivots, dtype=np.int64)
        self.info_cols = np.array(
            [c for c in range(pcm.cols) if c not in pivot_set], dtype=np.int64
        )
        if self.info_cols.size != spec.k_bits:
            raise InvalidParameters(
                f"dimension mismatch: expected k={spec.k_bits}, "
                f"got {self.info_cols.size}"
            )
        # c[pivot r] = sum_j parity_map[r, j] * message[j]  (mod 2)
        self.parity_map = rref[:, self.info_cols].astype(np.uint8)

    @property
    def n_bits(self) -> int:
        return self.spec.n_bits

    @property
    def k_bits(self) -> int:
        return self.spec.k_bits

    @property
    def rate(self) -> float:
        return self.spec.rate

    def encode(self, message_bits: np.ndarray) -> np.ndarray:
        """Systematic encoding; message bits appear at the non-pivot columns."""
        message_bits = np.asarray(message_bits, dtype=np.uint8)
        if message_bits.shape != (self.spec.k_bits,):
            raise LengthMismatch(
                f"expected {self.spec.k_bits} message bits, got {message_bits.shape}"
            )
        return self.encode_batch(message_bits[None, :])[0]

    def encode_batch(self, messages: np.ndarray) -> np.ndarray:
        """Encode each row of a (frames, k_bits) array."""
        messages = np.asarray(messages, dtype=np.uint8)
        if messages.ndim != 2 or messages.shape[1] != self.spec.k_bits:
            raise LengthMismatch(
                f"expected (frames, {self.spec.k_bits}), got {messages.shape}"
            )
        frames = messages.shape[0]
        out = np.zeros((frames, self.spec.n_bits), dtype=np.uint8)
        out[:, self.info_cols] = messages
        parity = (messages.astype(np.int64) @ self.parity_map.T.astype(np.int64)) & 1
        out[:, self.pivot_cols] = parity.astype(np.uint8)
        return out

    def syndrome_ok(self, bits: np.ndarray) -> bool:
        return not self.pcm.syndrome_bits(bits).any()

    def __repr__(self) -> str:
        s = self.spec
        return f"Code({s.family}:{s.n},{s.k} -> binary ({s.n_bits},{s.k_bits}))"


def encode(code: Code, message_bits: np.ndarray) -> np.ndarray:
    return code.encode(message_bits)


@dataclass(frozen=True)
class ProductCodeSpec:
    """Two-dimensional product of systematic linear component codes.

    Dimensions are binary-image dimensions. The codeword is an n1 x n2 bit
    array whose columns are component-1 codewords and whose rows are
    component-2 codewords.
    """

    spec1: CodeSpec
    spec2: CodeSpec

    @property
    def n1(self) -> int:
        return self.spec1.n_bits

    @property
    def n2(self) -> int:
        return self.spec2.n_bits

    @property
    def k1(self) -> int:
        return self.spec1.k_bits

    @property
    def k2(self) -> int:
        return self.spec2.k_bits

    @property
    def n_p(self) -> int:
        return self.n1 * self.n2

    @property
    def k_p(self) -> int:
        return self.k1 * self.k2

    @property
    def d_p(self) -> int:
        return self.spec1.d_min * self.spec2.d_min

    @property
    def rate(self) -> float:
        return self.k_p / self.n_p


class ProductCode:
    """Bundles the two component :class:`Code` objects with the product spec."""

    def __init__(self, code1: Code, code2: Code):
        self.code1 = code1
        self.code2 = code2
        self.spec = ProductCodeSpec(code1.spec, code2.spec)

    @property
    def n_bits(self) -> int:
        return self.spec.n_p

    @property
    def k_bits(self) -> int:
        return self.spec.k_p

    @property
    def rate(self) -> float:
        return self.spec.rate

    def __repr__(self) -> str:
        s1, s2 = self.code1.spec, self.code2.spec
        return f"ProductCode(({s1.n},{s1.k}) x ({s2.n},{s2.k}))"


def _bch_code(m: int, t: int) -> Code:
    pcm = bch_parity_check(m, t)
    n = (1 << m) - 1
    k = n - pcm.rows
    spec = CodeSpec(family="bch", n=n, k=k, t=t, m=m, b=1,
                    d_min=2 * t + 1, n_bits=n, k_bits=k)
    return Code(spec, pcm)


def _bch_extended_code(m: int, t: int) -> Code:
    """BCH extended by one overall parity bit (even length, rank M+1)."""
    inner = bch_parity_check(m, t)
    n = (1 << m) - 1
    dense = inner.dense()
    ext = np.zeros((dense.shape[0] + 1, n + 1), dtype=np.uint8)
    ext[:-1, :-1] = dense
    ext[-1, :] = 1
    pcm = rank_reduce(ext)
    k = (n + 1) - pcm.rows
    spec = CodeSpec(family="bch-ext", n=n + 1, k=k, t=t, m=m, b=1,
                    d_min=2 * t + 2, n_bits=n + 1, k_bits=k)
    return Code(spec, pcm)


def _rs_code(m: int, t: int, b: int = 1) -> Code:
    pcm = rs_parity_check(m, t, b)
    n = (1 << m) - 1
    k = n - 2 * t
    spec = CodeSpec(family="rs", n=n, k=k, t=t, m=m, b=b,
                    d_min=2 * t + 1, n_bits=n * m, k_bits=k * m)
    return Code(spec, pcm)


def _hamming_code() -> Code:
    spec, pcm = hamming_7_4()
    return Code(spec, pcm)


def _size_to_degree(n: int) -> int:
    m = n.bit_length()
    if (1 << m) - 1 != n:
        raise InvalidParameters(f"length {n} is not 2^m - 1")
    return m


def _find_bch_t(m: int, k: int) -> int:
    n = (1 << m) - 1
    for t in range(1, 1 << (m - 1)):
        pcm = bch_parity_check(m, t)
        if n - pcm.rows == k:
            return t
        if n - pcm.rows < k:
            break
    raise InvalidParameters(f"no primitive BCH code of length {n} with k={k}")


@lru_cache(maxsize=None)
def get_code(code_id: str):
    """Resolve a text identifier like ``bch:127,92`` or ``rs-product:15,11``.

    Returns a :class:`Code` or, for ``rs-product``, a :class:`ProductCode`.
    """
    try:
        family, _, dims = code_id.partition(":")
        n_str, k_str = dims.split(",")
        n, k = int(n_str), int(k_str)
    except ValueError as exc:
        raise InvalidParameters(f"cannot parse code id {code_id!r}") from exc

    family = family.strip().lower()
    if family == "hamming":
        if (n, k) != (7, 4):
            raise InvalidParameters("only the (7,4) Hamming fixture is provided")
        return _hamming_code()
    if family == "bch":
        if n == (1 << n.bit_length()) - 1:
            m = _size_to_degree(n)
            return _bch_code(m, _find_bch_t(m, k))
        if n == 1 << (n.bit_length() - 1):
            # even length: single-parity extension of the length n-1 code
            m = _size_to_degree(n - 1)
            return _bch_extended_code(m, _find_bch_t(m, k))
        raise InvalidParameters(f"BCH length {n} is neither 2^m - 1 nor 2^m")
    if family == "rs":
        m = _size_to_degree(n)
        if (n - k) % 2 != 0:
            raise InvalidParameters(f"RS n-k must be even, got {n - k}")
        return _rs_code(m, (n - k) // 2)
    if family == "rs-product":
        component = get_code(f"rs:{n},{k}")
        return ProductCode(component, component)
    raise InvalidParameters(f"unknown code family {family!r}")
