"""
Dense GF(2) matrices packed 64 columns per machine word.

Rows are uint64 arrays, least significant bit first, so column j of row r is
``(words[r, j >> 6] >> (j & 63)) & 1``. All sizes in this project are small
(N <= 2040 bits), so dense packed storage beats sparse formats, and row XOR
during elimination is a handful of word operations.
"""

from __future__ import annotations

import numpy as np


def pack_rows(dense: np.ndarray) -> np.ndarray:
    """Pack a (rows, cols) 0/1 array into (rows, ceil(cols/64)) uint64 words."""
    dense = np.ascontiguousarray(dense, dtype=np.uint8) & 1
    rows, cols = dense.shape
    nbytes = ((cols + 63) // 64) * 8
    padded = np.zeros((rows, nbytes * 8), dtype=np.uint8)
    padded[:, :cols] = dense
    packed_bytes = np.packbits(padded, axis=1, bitorder="little")
    return packed_bytes.view(np.uint64).reshape(rows, nbytes // 8)


def unpack_rows(words: np.ndarray, cols: int) -> np.ndarray:
    """Inverse of :func:`pack_rows`; returns a (rows, cols) uint8 array."""
    rows = words.shape[0]
    as_bytes = words.reshape(rows, -1).view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return np.ascontiguousarray(bits[:, :cols])


def mul_vec(words: np.ndarray, vec_bits: np.ndarray) -> np.ndarray:
    """H @ v over GF(2) for packed H and a 0/1 vector; returns one bit per row."""
    v_words = pack_rows(vec_bits.reshape(1, -1))[0]
    anded = words & v_words[None, :]
    folded = np.bitwise_xor.reduce(anded, axis=1)
    # XOR-fold each word down to its parity bit
    for shift in (32, 16, 8, 4, 2, 1):
        folded ^= folded >> np.uint64(shift)
    return (folded & np.uint64(1)).astype(np.uint8)


def row_echelon(dense: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Row echelon form over GF(2), pivoting on the first nonzero column,
    rows processed top-down. Returns (echelon matrix, pivot column list)."""
    work = (np.array(dense, dtype=np.uint8) & 1).copy()
    rows, cols = work.shape
    pivot_cols: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(work[r:, c])[0]
        if hits.size == 0:
            continue
        pivot = r + hits[0]
        if pivot != r:
            work[[r, pivot]] = work[[pivot, r]]
        elim = np.nonzero(work[:, c])[0]
        elim = elim[elim != r]
        work[elim] ^= work[r]
        pivot_cols.append(c)
        r += 1
    return work, pivot_cols


def rank(dense: np.ndarray) -> int:
    _, pivots = row_echelon(dense)
    return len(pivots)


def independent_rows(dense: np.ndarray) -> np.ndarray:
    """A maximal linearly independent row set spanning the same row space.

    Returned in echelon form (deterministic for a given input)."""
    ech, pivots = row_echelon(dense)
    return ech[: len(pivots)]


def null_space_basis(dense: np.ndarray) -> np.ndarray:
    """Basis of {v : H v = 0} over GF(2), one vector per row."""
    ech, pivots = row_echelon(dense)
    rows, cols = ech.shape
    pivot_set = set(pivots)
    free_cols = [c for c in range(cols) if c not in pivot_set]
    basis = np.zeros((len(free_cols), cols), dtype=np.uint8)
    for i, fc in enumerate(free_cols):
        basis[i, fc] = 1
        # reduced echelon: pivot rows have unit pivot columns
        for r, pc in enumerate(pivots):
            if ech[r, fc]:
                basis[i, pc] = 1
    return basis
