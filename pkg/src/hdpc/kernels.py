"""
Numba kernels for the per-iteration decode hot path.

Everything here operates on flat arrays: packed uint64 parity-check rows, a
CN-major CSR edge list (cn_ptr, cn_vn) with optional VN-major cross view
(vn_ptr, vn_cn, vn_edge), per-edge message arrays, and an int64 counter
vector. The Python modules own all orchestration and bookkeeping.

Message numerics: messages are clamped to +/- L_MAX and check-node tanh
products to 1 - 1e-12 in magnitude before atanh, so arrays stay finite. A
degree-1 check node sends 0 (it carries no extrinsic information).

Counter slots: 0 = C2V updates, 1 = V2C updates, 2 = residual computations,
3 = real-value comparisons, 4 = C2V updates inside the dynamic
(silent-variable-node-free) phase.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

L_MAX = 40.0
_PROD_CLIP = 1.0 - 1e-12

CTR_C2V = 0
CTR_V2C = 1
CTR_RESIDUAL = 2
CTR_COMPARE = 3
CTR_DSVNF_C2V = 4
N_COUNTERS = 5


@njit(cache=True, inline="always")
def _msg_from_product(prod: float) -> float:
    if prod > _PROD_CLIP:
        prod = _PROD_CLIP
    elif prod < -_PROD_CLIP:
        prod = -_PROD_CLIP
    return 2.0 * math.atanh(prod)


@njit(cache=True, inline="always")
def _clamp(x: float) -> float:
    if x > L_MAX:
        return L_MAX
    if x < -L_MAX:
        return -L_MAX
    return x


@njit(cache=True)
def ge_by_priority(work: np.ndarray, priority: np.ndarray,
                   pivot_cols: np.ndarray) -> int:
    """In-place Gaussian elimination turning the first achievable columns of
    ``priority`` into unit columns.

    ``work`` is (M, W) packed rows, modified in place. Column k of the
    priority list is skipped when it is linearly dependent on the pivots
    chosen so far; the scan then continues down the list. ``pivot_cols``
    receives the pivot column of each row.

    Returns the number of requested targets (first M priority entries) that
    had to be skipped, or -1 if fewer than M pivots exist in the whole list.
    """
    m_rows = work.shape[0]
    r = 0
    fallbacks = 0
    for idx in range(priority.shape[0]):
        if r == m_rows:
            break
        col = priority[idx]
        w = col >> 6
        bit = np.uint64(col & 63)
        sel = -1
        for rr in range(r, m_rows):
            if (work[rr, w] >> bit) & np.uint64(1):
                sel = rr
                break
        if sel < 0:
            if idx < m_rows:
                fallbacks += 1
            continue
        if sel != r:
            for ww in range(work.shape[1]):
                tmp = work[r, ww]
                work[r, ww] = work[sel, ww]
                work[sel, ww] = tmp
        for rr in range(m_rows):
            if rr != r and ((work[rr, w] >> bit) & np.uint64(1)):
                for ww in range(work.shape[1]):
                    work[rr, ww] ^= work[r, ww]
        pivot_cols[r] = col
        r += 1
    if r < m_rows:
        return -1
    return fallbacks


@njit(cache=True)
def syndrome_words(h_words: np.ndarray, cw_words: np.ndarray) -> np.ndarray:
    """Per-row parity of H & c over packed words."""
    m_rows = h_words.shape[0]
    out = np.empty(m_rows, dtype=np.uint8)
    for m in range(m_rows):
        acc = np.uint64(0)
        for w in range(h_words.shape[1]):
            acc ^= h_words[m, w] & cw_words[w]
        acc ^= acc >> np.uint64(32)
        acc ^= acc >> np.uint64(16)
        acc ^= acc >> np.uint64(8)
        acc ^= acc >> np.uint64(4)
        acc ^= acc >> np.uint64(2)
        acc ^= acc >> np.uint64(1)
        out[m] = np.uint8(acc & np.uint64(1))
    return out


@njit(cache=True, inline="always")
def _max_degree(cn_ptr: np.ndarray) -> int:
    best = 1
    for m in range(cn_ptr.shape[0] - 1):
        deg = cn_ptr[m + 1] - cn_ptr[m]
        if deg > best:
            best = deg
    return best


@njit(cache=True)
def flooding_extrinsic(cn_ptr: np.ndarray, cn_vn: np.ndarray,
                       tanh_llr: np.ndarray, ext_out: np.ndarray,
                       counters: np.ndarray) -> None:
    """Extrinsic LLR of a one-shot flooding pass seeded by the bit LLRs.

    ``tanh_llr[n]`` = tanh(L_n / 2). For every check node the exclude-one
    products are formed with forward/backward partials, so the pass is
    linear in the edge count.
    """
    ext_out[:] = 0.0
    m_rows = cn_ptr.shape[0] - 1
    suf = np.empty(_max_degree(cn_ptr), dtype=np.float64)
    for m in range(m_rows):
        base = cn_ptr[m]
        deg = cn_ptr[m + 1] - base
        if deg == 1:
            # no extrinsic information from a single-participant check
            counters[CTR_C2V] += 1
            counters[CTR_V2C] += 1
            continue
        suffix = 1.0
        for d in range(deg - 1, 0, -1):
            suf[d] = suffix
            suffix *= tanh_llr[cn_vn[base + d]]
        suf[0] = suffix
        prefix = 1.0
        for d in range(deg):
            e = base + d
            prod = prefix * suf[d]
            ext_out[cn_vn[e]] += _msg_from_product(prod)
            prefix *= tanh_llr[cn_vn[e]]
        counters[CTR_C2V] += deg
        counters[CTR_V2C] += deg



@njit(cache=True)
def extrinsic_from_v2c(cn_ptr: np.ndarray, cn_vn: np.ndarray,
                       tanh_v2c: np.ndarray, ext_out: np.ndarray) -> None:
    """Per-bit extrinsic sums evaluated on the live per-edge V2C state.

    This is the end-of-iteration LLR aggregation of the serial schedules:
    every check contributes a product over its current edge beliefs, fresh
    or stale; it is not a message store, so it leaves the update counters
    alone.
    """
    ext_out[:] = 0.0
    m_rows = cn_ptr.shape[0] - 1
    suf = np.empty(_max_degree(cn_ptr), dtype=np.float64)
    for m in range(m_rows):
        base = cn_ptr[m]
        deg = cn_ptr[m + 1] - base
        if deg == 1:
            continue
        suffix = 1.0
        for d in range(deg - 1, 0, -1):
            suf[d] = suffix
            suffix *= tanh_v2c[base + d]
        suf[0] = suffix
        prefix = 1.0
        for d in range(deg):
            e = base + d
            ext_out[cn_vn[e]] += _msg_from_product(prefix * suf[d])
            prefix *= tanh_v2c[e]


@njit(cache=True)
def serial_layered_sweep(cn_ptr: np.ndarray, cn_vn: np.ndarray,
                         edge_mask: np.ndarray, v2c: np.ndarray,
                         tanh_v2c: np.ndarray, c2v: np.ndarray,
                         c2v_sum: np.ndarray, llr_base: np.ndarray,
                         counters: np.ndarray) -> int:
    """Check-node-serial sweep updating masked edges in place.

    Per edge of each check node, in ascending order: recompute the C2V
    message from the live V2C values, then refresh the V2C message of the
    same edge from the live C2V sums (so later check nodes observe it).
    ``c2v_sum[n]`` tracks sum of incoming C2V per variable node and must be
    consistent with ``c2v`` on entry. Returns the number of edges swept.
    """
    m_rows = cn_ptr.shape[0] - 1
    swept = 0
    for m in range(m_rows):
        base = cn_ptr[m]
        deg = cn_ptr[m + 1] - base
        for d in range(deg):
            e = base + d
            if edge_mask[e] == 0:
                continue
            n = cn_vn[e]
            if deg == 1:
                new_c = 0.0
            else:
                prod = 1.0
                for d2 in range(deg):
                    if d2 != d:
                        prod *= tanh_v2c[base + d2]
                new_c = _msg_from_product(prod)
            c2v_sum[n] += new_c - c2v[e]
            c2v[e] = new_c
            new_v = _clamp(llr_base[n] + c2v_sum[n] - new_c)
            v2c[e] = new_v
            tanh_v2c[e] = math.tanh(0.5 * new_v)
            swept += 1
    counters[CTR_C2V] += swept
    counters[CTR_V2C] += swept
    return swept


@njit(cache=True)
def serial_shuffled_sweep(cn_ptr: np.ndarray, cn_vn: np.ndarray,
                          vn_ptr: np.ndarray, vn_cn: np.ndarray,
                          vn_edge: np.ndarray, v2c: np.ndarray,
                          tanh_v2c: np.ndarray, c2v: np.ndarray,
                          c2v_sum: np.ndarray, llr_base: np.ndarray,
                          counters: np.ndarray) -> int:
    """Variable-node-serial sweep: per VN refresh all incoming C2V messages
    from the live V2C values, then all outgoing V2C messages."""
    n_bits = vn_ptr.shape[0] - 1
    swept = 0
    for n in range(n_bits):
        lo = vn_ptr[n]
        hi = vn_ptr[n + 1]
        for ii in range(lo, hi):
            m = vn_cn[ii]
            e = vn_edge[ii]
            base = cn_ptr[m]
            deg = cn_ptr[m + 1] - base
            if deg == 1:
                new_c = 0.0
            else:
                prod = 1.0
                for e2 in range(base, base + deg):
                    if e2 != e:
                        prod *= tanh_v2c[e2]
                new_c = _msg_from_product(prod)
            c2v_sum[n] += new_c - c2v[e]
            c2v[e] = new_c
            swept += 1
        for ii in range(lo, hi):
            e = vn_edge[ii]
            new_v = _clamp(llr_base[n] + c2v_sum[n] - c2v[e])
            v2c[e] = new_v
            tanh_v2c[e] = math.tanh(0.5 * new_v)
    counters[CTR_C2V] += swept
    counters[CTR_V2C] += swept
    return swept


@njit(cache=True)
def flooding_iteration_kernel(cn_ptr: np.ndarray, cn_vn: np.ndarray,
                              v2c: np.ndarray, c2v: np.ndarray,
                              c2v_sum: np.ndarray, llr_base: np.ndarray,
                              counters: np.ndarray) -> None:
    """One full flooding iteration: all C2V from the entry V2C snapshot, then
    all V2C from the fresh C2V messages."""
    m_rows = cn_ptr.shape[0] - 1
    suf = np.empty(_max_degree(cn_ptr), dtype=np.float64)
    c2v_sum[:] = 0.0
    for m in range(m_rows):
        base = cn_ptr[m]
        deg = cn_ptr[m + 1] - base
        if deg == 1:
            c2v[base] = 0.0
            counters[CTR_C2V] += 1
            continue
        suffix = 1.0
        for d in range(deg - 1, 0, -1):
            suf[d] = suffix
            suffix *= math.tanh(0.5 * v2c[base + d])
        suf[0] = suffix
        prefix = 1.0
        for d in range(deg):
            e = base + d
            c2v[e] = _msg_from_product(prefix * suf[d])
            prefix *= math.tanh(0.5 * v2c[e])
        counters[CTR_C2V] += deg
    for m in range(m_rows):
        for e in range(cn_ptr[m], cn_ptr[m + 1]):
            c2v_sum[cn_vn[e]] += c2v[e]
    for m in range(m_rows):
        for e in range(cn_ptr[m], cn_ptr[m + 1]):
            n = cn_vn[e]
            v2c[e] = _clamp(llr_base[n] + c2v_sum[n] - c2v[e])
            counters[CTR_V2C] += 1


@njit(cache=True)
def dsvnf_loop(cn_ptr: np.ndarray, cn_vn: np.ndarray, edge_cn: np.ndarray,
               vn_ptr: np.ndarray, vn_cn: np.ndarray, vn_edge: np.ndarray,
               syndrome: np.ndarray, v2c: np.ndarray, tanh_v2c: np.ndarray,
               c2v: np.ndarray, c2v_sum: np.ndarray, llr_base: np.ndarray,
               u_flags: np.ndarray, residuals: np.ndarray, guard: int,
               counters: np.ndarray) -> int:
    """Residual-driven dynamic phase with silent-variable-node-free polling.

    Repeats until ``guard`` C2V propagations have been made: poll the next
    unvisited variable node (index order, flags reset once all are visited),
    refresh the residuals of the edges of its unsatisfied neighbour check
    nodes, propagate the neighbourhood's maximum-residual C2V message (ties:
    lowest check node, then lowest variable node), zero that residual, push
    the receiving node's V2C messages to its other check nodes, and chain to
    the receiving node when it is still unvisited.

    Returns the number of C2V propagations performed. Breaks out early only
    in the degenerate case where a whole polling epoch finds no candidate
    edges at all.

    A residual is a pure function of the live message state, so each check
    carries a dirty flag and its residuals are recomputed only after one of
    its incoming V2C messages moved; skipped recomputes would have produced
    byte-identical values, so behaviour matches recomputing at every poll
    while the residual counter reports the computations actually performed.
    """
    n_bits = vn_ptr.shape[0] - 1
    suf = np.empty(_max_degree(cn_ptr), dtype=np.float64)
    dirty = np.ones(cn_ptr.shape[0] - 1, dtype=np.uint8)
    visited = 0
    for n in range(n_bits):
        if u_flags[n]:
            visited += 1
    scan_from = 0
    pending = -1
    fruitless = 0
    done = 0
    while done < guard:
        if pending >= 0:
            vp = pending
            pending = -1
        else:
            if visited >= n_bits:
                for n in range(n_bits):
                    u_flags[n] = 0
                visited = 0
                scan_from = 0
            while u_flags[scan_from]:
                scan_from += 1
            vp = scan_from
            u_flags[vp] = 1
            visited += 1

        # refresh residuals of unsatisfied checks around vp whose inputs
        # moved since their last refresh
        for ii in range(vn_ptr[vp], vn_ptr[vp + 1]):
            m = vn_cn[ii]
            if syndrome[m] != 1 or dirty[m] == 0:
                continue
            dirty[m] = 0
            base = cn_ptr[m]
            deg = cn_ptr[m + 1] - base
            suffix = 1.0
            for d in range(deg - 1, 0, -1):
                suf[d] = suffix
                suffix *= tanh_v2c[base + d]
            suf[0] = suffix
            prefix = 1.0
            for d in range(deg):
                e = base + d
                if deg == 1:
                    cand = 0.0
                else:
                    cand = _msg_from_product(prefix * suf[d])
                residuals[e] = abs(c2v[e] - cand)
                counters[CTR_RESIDUAL] += 1
                prefix *= tanh_v2c[e]

        # maximum stored residual over the whole neighbourhood of vp
        best_e = -1
        best_r = -1.0
        candidates = 0
        for ii in range(vn_ptr[vp], vn_ptr[vp + 1]):
            m = vn_cn[ii]
            for e in range(cn_ptr[m], cn_ptr[m + 1]):
                if cn_vn[e] == vp:
                    continue
                candidates += 1
                if residuals[e] > best_r:
                    best_r = residuals[e]
                    best_e = e
        if candidates > 1:
            counters[CTR_COMPARE] += candidates - 1

        if best_e < 0:
            fruitless += 1
            if fruitless > n_bits:
                break
            continue
        fruitless = 0

        # propagate the winning C2V message; the product is associated the
        # same way as in the residual pass so a repolled unchanged edge
        # reports a residual of exactly zero
        m_star = edge_cn[best_e]
        vj = cn_vn[best_e]
        base = cn_ptr[m_star]
        deg = cn_ptr[m_star + 1] - base
        if deg == 1:
            new_c = 0.0
        else:
            suffix = 1.0
            for d in range(deg - 1, 0, -1):
                suf[d] = suffix
                suffix *= tanh_v2c[base + d]
            suf[0] = suffix
            prefix = 1.0
            new_c = 0.0
            for d in range(deg):
                e2 = base + d
                if e2 == best_e:
                    new_c = _msg_from_product(prefix * suf[d])
                prefix *= tanh_v2c[e2]
        c2v_sum[vj] += new_c - c2v[best_e]
        c2v[best_e] = new_c
        residuals[best_e] = 0.0
        counters[CTR_C2V] += 1
        counters[CTR_DSVNF_C2V] += 1
        done += 1

        # push vj's V2C messages to its other check nodes
        for ii in range(vn_ptr[vj], vn_ptr[vj + 1]):
            a = vn_cn[ii]
            if a == m_star:
                continue
            e_a = vn_edge[ii]
            new_v = _clamp(llr_base[vj] + c2v_sum[vj] - c2v[e_a])
            v2c[e_a] = new_v
            tanh_v2c[e_a] = math.tanh(0.5 * new_v)
            dirty[a] = 1
            counters[CTR_V2C] += 1

        if u_flags[vj] == 0:
            u_flags[vj] = 1
            visited += 1
            pending = vj
    return done
