"""
GF(2^m) arithmetic with log/antilog tables and binary matrix representations.

Field elements are integers in [0, 2^m - 1]; bit i is the coefficient of
beta^i in the polynomial basis {1, beta, ..., beta^{m-1}}, where beta is the
residue of x modulo the primitive polynomial.

Two binary images of an element are provided:

- ``to_binary_column``: the m coefficient bits as a column vector (used to
  expand symbol parity checks of binary codes into bit parity checks).
- ``to_companion_block``: the m x m multiply-by-element matrix (used to expand
  non-binary symbol parity checks into their binary image).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ReduciblePolynomial(ValueError):
    """The supplied modulus polynomial factors over GF(2)."""


class NonPrimitiveElement(ValueError):
    """x does not generate the multiplicative group modulo the polynomial."""


# Primitive polynomials per extension degree, bit i = coefficient of x^i.
# Standard table entries (the m=8 one is the 0x11D polynomial commonly used
# for RS codes, not the AES polynomial whose x is non-primitive).
DEFAULT_PRIMITIVE_POLY = {
    1: 0b11,                  # x + 1
    2: 0b111,                 # x^2 + x + 1
    3: 0b1011,                # x^3 + x + 1
    4: 0b10011,               # x^4 + x + 1
    5: 0b100101,              # x^5 + x^2 + 1
    6: 0b1000011,             # x^6 + x + 1
    7: 0b10001001,            # x^7 + x^3 + 1
    8: 0b100011101,           # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,          # x^9 + x^4 + 1
    10: 0b10000001001,        # x^10 + x^3 + 1
    11: 0b100000000101,       # x^11 + x^2 + 1
    12: 0b1000001010011,      # x^12 + x^6 + x^4 + x + 1
    13: 0b10000000011011,     # x^13 + x^4 + x^3 + x + 1
    14: 0b100010001000011,    # x^14 + x^10 + x^6 + x + 1
    15: 0b1000000000000011,   # x^15 + x + 1
    16: 0b10001000000001011,  # x^16 + x^12 + x^3 + x + 1
}

MAX_DEGREE = 16


def _poly_degree(p: int) -> int:
    return p.bit_length() - 1


def _poly_mulmod(a: int, b: int, modulus: int) -> int:
    """Carry-less multiply of a and b reduced modulo ``modulus``."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if _poly_degree(a) >= _poly_degree(modulus):
            a ^= modulus << (_poly_degree(a) - _poly_degree(modulus))
    deg = _poly_degree(modulus)
    while _poly_degree(result) >= deg:
        result ^= modulus << (_poly_degree(result) - deg)
    return result


def _is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2."""
    deg = _poly_degree(poly)
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in range(1 << d):
            divisor = (1 << d) | low
            # long division remainder
            r = poly
            while _poly_degree(r) >= d:
                r ^= divisor << (_poly_degree(r) - d)
            if r == 0:
                return False
    return True


@dataclass(frozen=True)
class Field:
    """GF(2^m) with precomputed log/antilog tables.

    Immutable after construction; safe to share across threads. Use
    :func:`field_build` (or ``Field.default(m)``) rather than calling the
    constructor directly.
    """

    m: int
    primitive_polynomial: int
    log_table: np.ndarray = field(repr=False)
    antilog_table: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        """Number of field elements, 2^m."""
        return 1 << self.m

    @property
    def beta(self) -> int:
        """The generator element (x mod primitive polynomial)."""
        return self.antilog_table[1] if self.m > 1 else 1

    @staticmethod
    def default(m: int) -> "Field":
        return field_build(m, DEFAULT_PRIMITIVE_POLY[m])

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        n = self.order - 1
        return int(self.antilog_table[(int(self.log_table[a]) + int(self.log_table[b])) % n])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        n = self.order - 1
        return int(self.antilog_table[(n - int(self.log_table[a])) % n])

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k == 0:
                return 1
            if k < 0:
                raise ZeroDivisionError("0 has no negative powers")
            return 0
        n = self.order - 1
        return int(self.antilog_table[(int(self.log_table[a]) * k) % n])

    def beta_pow(self, k: int) -> int:
        """beta^k for any integer k (taken modulo the group order)."""
        return int(self.antilog_table[k % (self.order - 1)])

    def to_binary_column(self, a: int) -> np.ndarray:
        """Coefficient bits of ``a`` in basis order (1, beta, ..., beta^{m-1})."""
        return np.array([(a >> r) & 1 for r in range(self.m)], dtype=np.uint8)

    def to_companion_block(self, a: int) -> np.ndarray:
        """m x m binary matrix B with B @ column(x) = column(a*x) for all x."""
        block = np.zeros((self.m, self.m), dtype=np.uint8)
        for col in range(self.m):
            block[:, col] = self.to_binary_column(self.mul(a, 1 << col))
        return block


def field_build(m: int, primitive_polynomial: int) -> Field:
    """Construct GF(2^m) from a degree-m polynomial, validating it.

    Raises :class:`ReduciblePolynomial` if the polynomial factors, and
    :class:`NonPrimitiveElement` if x has multiplicative order below 2^m - 1.
    """
    if not (1 <= m <= MAX_DEGREE):
        raise ValueError(f"extension degree must be in [1, {MAX_DEGREE}], got {m}")
    if _poly_degree(primitive_polynomial) != m:
        raise ValueError(
            f"polynomial 0b{primitive_polynomial:b} does not have degree {m}"
        )
    if not _is_irreducible(primitive_polynomial):
        raise ReduciblePolynomial(
            f"0b{primitive_polynomial:b} is reducible over GF(2)"
        )

    q = 1 << m
    n = q - 1
    antilog = np.zeros(n, dtype=np.int64)
    log = np.full(q, -1, dtype=np.int64)
    value = 1
    for k in range(n):
        if value == 1 and k > 0:
            raise NonPrimitiveElement(
                f"x has order {k} < {n} modulo 0b{primitive_polynomial:b}"
            )
        antilog[k] = value
        log[value] = k
        value = _poly_mulmod(value, 2, primitive_polynomial) if m > 1 else 1
    if m > 1 and value != 1:
        # exhausted n steps without closing the cycle: not cyclic of order n
        raise NonPrimitiveElement(
            f"x does not have order {n} modulo 0b{primitive_polynomial:b}"
        )
    fld = Field(m=m, primitive_polynomial=primitive_polynomial,
                log_table=log, antilog_table=antilog)
    fld.log_table.setflags(write=False)
    fld.antilog_table.setflags(write=False)
    return fld


def gf_add(field_: Field, a: int, b: int) -> int:
    return field_.add(a, b)


def gf_mul(field_: Field, a: int, b: int) -> int:
    return field_.mul(a, b)


def gf_inv(field_: Field, a: int) -> int:
    return field_.inv(a)


def gf_pow(field_: Field, a: int, k: int) -> int:
    return field_.pow(a, k)


def to_binary_column(field_: Field, a: int) -> np.ndarray:
    return field_.to_binary_column(a)


def to_companion_block(field_: Field, a: int) -> np.ndarray:
    return field_.to_companion_block(a)
