"""
Tanner graphs, message state, and the fixed-schedule BP kernels.

Sign convention. The check-node rule used everywhere is the plain product
form ``2*atanh(prod tanh(./2))``, which is exact when a positive value means
"bit 0 more likely". The channel layer (Eq. via ``channel.channel_llr``)
produces LLRs where positive means bit 1, so the decoders in ``abp`` and
``schedulers`` feed these kernels with negated values and negate results on
the way out; see ``abp._DecodeState``. The operations in this module are
convention-neutral arithmetic on whatever values the caller supplies, except
``syndrome`` whose hard-decision rule (1 iff L > 0) follows the channel
convention.

Serial schedules are realised in place: a single message array is swept in
node order, so "current iteration" values are simply the entries already
rewritten during the sweep and "previous iteration" values the entries not
yet reached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bitmatrix, kernels
from .codes import ParityCheckMatrix

L_MAX = kernels.L_MAX


class EmptyRow(ValueError):
    """A check node with no connected variable nodes."""


class MissingPrevious(ValueError):
    """Layered extrinsic computation needs the previous LLR snapshot."""


class AlphaOutOfRange(ValueError):
    """Damping factor must lie in (0, 1]."""


class TannerGraph:
    """Edge-indexed adjacency of a parity-check matrix.

    Edges are numbered in check-node-major order (row by row, ascending
    column), which is also the processing order of the layered sweeps. The
    variable-node-major cross view is built lazily since only the shuffled
    and dynamic schedules need it.
    """

    def __init__(self, dense_bits: np.ndarray):
        dense_bits = np.asarray(dense_bits, dtype=np.uint8)
        self.m_checks, self.n_bits = dense_bits.shape
        rows, cols = np.nonzero(dense_bits)
        degrees = np.bincount(rows, minlength=self.m_checks)
        if self.m_checks and degrees.min() == 0:
            raise EmptyRow("parity-check matrix contains an all-zero row")
        self.cn_ptr = np.zeros(self.m_checks + 1, dtype=np.int64)
        np.cumsum(degrees, out=self.cn_ptr[1:])
        self.cn_vn = cols.astype(np.int64)
        self.edge_cn = rows.astype(np.int64)
        self.n_edges = int(self.cn_vn.shape[0])
        self._vn_view: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    @property
    def avg_vn_degree(self) -> float:
        return self.n_edges / self.n_bits

    @property
    def avg_cn_degree(self) -> float:
        return self.n_edges / self.m_checks

    def vn_view(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(vn_ptr, vn_cn, vn_edge): per-VN neighbour checks and the
        CN-major edge index of each incidence, ascending CN within a VN."""
        if self._vn_view is None:
            order = np.argsort(self.cn_vn, kind="stable")
            vn_edge = order.astype(np.int64)
            vn_cn = self.edge_cn[order]
            counts = np.bincount(self.cn_vn, minlength=self.n_bits)
            vn_ptr = np.zeros(self.n_bits + 1, dtype=np.int64)
            np.cumsum(counts, out=vn_ptr[1:])
            self._vn_view = (vn_ptr, vn_cn, vn_edge)
        return self._vn_view

    def cn_neighbors(self, m: int) -> np.ndarray:
        return self.cn_vn[self.cn_ptr[m]:self.cn_ptr[m + 1]]

    def vn_neighbors(self, n: int) -> np.ndarray:
        vn_ptr, vn_cn, _ = self.vn_view()
        return vn_cn[vn_ptr[n]:vn_ptr[n + 1]]

    def edge_id(self, m: int, n: int) -> int:
        lo, hi = self.cn_ptr[m], self.cn_ptr[m + 1]
        pos = lo + np.searchsorted(self.cn_vn[lo:hi], n)
        if pos >= hi or self.cn_vn[pos] != n:
            raise KeyError(f"no edge between check {m} and bit {n}")
        return int(pos)


def build_graph(pcm) -> TannerGraph:
    """Tanner graph of a ParityCheckMatrix (or a raw 0/1 matrix)."""
    if isinstance(pcm, ParityCheckMatrix):
        return TannerGraph(pcm.dense())
    return TannerGraph(np.asarray(pcm))


@dataclass
class MessageState:
    """Per-edge message stores, indexed like the owning graph's edges."""

    v2c: np.ndarray
    c2v: np.ndarray

    @staticmethod
    def initial(graph: TannerGraph, llr: np.ndarray) -> "MessageState":
        """V2C seeded with the per-bit LLRs, C2V all zero."""
        llr = np.asarray(llr, dtype=np.float64)
        return MessageState(v2c=llr[graph.cn_vn].copy(),
                            c2v=np.zeros(graph.n_edges, dtype=np.float64))

    def copy(self) -> "MessageState":
        return MessageState(self.v2c.copy(), self.c2v.copy())


@dataclass
class SyndromeVector:
    s: np.ndarray
    hard_bits: np.ndarray

    def all_satisfied(self) -> bool:
        return not self.s.any()


def checknode_msg(inputs) -> float:
    """Check-node output given the values on the other edges.

    Product-of-tanh rule with safe numerics: inputs clamped to +/- L_MAX,
    the product kept away from +/-1 before atanh. An empty input list (a
    degree-1 check node) yields 0: such a check offers no extrinsic
    information. With a single input v the result is v up to the float
    tanh/atanh round trip.
    """
    prod = 1.0
    count = 0
    for val in inputs:
        v = min(max(float(val), -L_MAX), L_MAX)
        prod *= math.tanh(0.5 * v)
        count += 1
    if count == 0:
        return 0.0
    prod = min(max(prod, -(1.0 - 1e-12)), 1.0 - 1e-12)
    return 2.0 * math.atanh(prod)


def _sums_and_tanh(graph: TannerGraph, state: MessageState):
    c2v_sum = np.zeros(graph.n_bits, dtype=np.float64)
    np.add.at(c2v_sum, graph.cn_vn, state.c2v)
    tanh_v2c = np.tanh(0.5 * state.v2c)
    return c2v_sum, tanh_v2c


def flooding_iteration(graph: TannerGraph, state: MessageState,
                       llr: np.ndarray) -> MessageState:
    """One flooding iteration: every C2V from the entry V2C snapshot, then
    every V2C from the fresh C2V messages. Mutates and returns ``state``."""
    counters = np.zeros(kernels.N_COUNTERS, dtype=np.int64)
    c2v_sum = np.zeros(graph.n_bits, dtype=np.float64)
    kernels.flooding_iteration_kernel(
        graph.cn_ptr, graph.cn_vn, state.v2c, state.c2v, c2v_sum,
        np.asarray(llr, dtype=np.float64), counters)
    return state


def layered_iteration(graph: TannerGraph, state: MessageState,
                      llr: np.ndarray) -> MessageState:
    """One check-node-serial iteration (in-place sweep in CN order)."""
    counters = np.zeros(kernels.N_COUNTERS, dtype=np.int64)
    c2v_sum, tanh_v2c = _sums_and_tanh(graph, state)
    mask = np.ones(graph.n_edges, dtype=np.uint8)
    kernels.serial_layered_sweep(
        graph.cn_ptr, graph.cn_vn, mask, state.v2c, tanh_v2c, state.c2v,
        c2v_sum, np.asarray(llr, dtype=np.float64), counters)
    return state


def shuffled_iteration(graph: TannerGraph, state: MessageState,
                       llr: np.ndarray) -> MessageState:
    """One variable-node-serial iteration (in-place sweep in VN order)."""
    counters = np.zeros(kernels.N_COUNTERS, dtype=np.int64)
    c2v_sum, tanh_v2c = _sums_and_tanh(graph, state)
    vn_ptr, vn_cn, vn_edge = graph.vn_view()
    kernels.serial_shuffled_sweep(
        graph.cn_ptr, graph.cn_vn, vn_ptr, vn_cn, vn_edge, state.v2c,
        tanh_v2c, state.c2v, c2v_sum, np.asarray(llr, dtype=np.float64),
        counters)
    return state


def hard_decision(llr: np.ndarray) -> np.ndarray:
    """Bit = 1 exactly when the LLR is positive (ties decode to 0)."""
    return (np.asarray(llr) > 0).astype(np.uint8)


def syndrome(pcm: ParityCheckMatrix, llr: np.ndarray) -> SyndromeVector:
    """Hard-decide the LLRs and evaluate every parity check."""
    llr = np.asarray(llr, dtype=np.float64)
    if llr.shape[0] != pcm.cols:
        raise ValueError(f"expected {pcm.cols} LLRs, got {llr.shape[0]}")
    bits = hard_decision(llr)
    return SyndromeVector(s=pcm.syndrome_bits(bits), hard_bits=bits)


def syndrome_of_bits(h_words: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """Per-check parity of hard bits against packed parity rows."""
    cw = bitmatrix.pack_rows(bits.reshape(1, -1))[0]
    return kernels.syndrome_words(h_words, cw)


def extrinsic_llr(graph: TannerGraph, llr: np.ndarray, mode: str = "flooding",
                  llr_prev: np.ndarray | None = None) -> np.ndarray:
    """Per-bit extrinsic sum of check-node messages seeded by bit LLRs.

    ``flooding`` evaluates every check node on the supplied vector.
    ``layered`` walks the check nodes in order, using the current vector for
    bits already visited by an earlier check and ``llr_prev`` for the rest;
    with ``llr_prev`` equal to ``llr`` the two modes coincide.
    """
    llr = np.asarray(llr, dtype=np.float64)
    if mode == "flooding":
        counters = np.zeros(kernels.N_COUNTERS, dtype=np.int64)
        ext = np.zeros(graph.n_bits, dtype=np.float64)
        kernels.flooding_extrinsic(graph.cn_ptr, graph.cn_vn,
                                   np.tanh(0.5 * np.clip(llr, -L_MAX, L_MAX)),
                                   ext, counters)
        return ext
    if mode == "layered":
        if llr_prev is None:
            raise MissingPrevious("layered extrinsic needs the previous LLRs")
        working = np.asarray(llr_prev, dtype=np.float64).copy()
        ext = np.zeros(graph.n_bits, dtype=np.float64)
        for m in range(graph.m_checks):
            nbrs = graph.cn_neighbors(m)
            vals = working[nbrs]
            for i, n in enumerate(nbrs):
                others = np.delete(vals, i)
                ext[n] += checknode_msg(others)
            working[nbrs] = llr[nbrs]
        return ext
    raise ValueError(f"unknown extrinsic mode {mode!r}")


def damped_update(llr: np.ndarray, llr_ext: np.ndarray,
                  alpha: float) -> np.ndarray:
    """L <- clamp(L + alpha * L_ext)."""
    if not (0.0 < alpha <= 1.0):
        raise AlphaOutOfRange(f"alpha must be in (0, 1], got {alpha}")
    return np.clip(np.asarray(llr, dtype=np.float64)
                   + alpha * np.asarray(llr_ext, dtype=np.float64),
                   -L_MAX, L_MAX)


_BP_SCHEDULES = ("flooding", "layered", "shuffled")


def bp_decode(pcm: ParityCheckMatrix, llr_ch: np.ndarray, i_max: int,
              scheduling: str = "flooding"):
    """Plain (non-adaptive) BP on a fixed graph with persistent messages.

    Baseline decoder family; returns (hard bits, iterations used, success).
    Messages propagate in the check-node kernel's native sign domain, hence
    the negations at entry and at the posterior.
    """
    if scheduling not in _BP_SCHEDULES:
        raise ValueError(f"unknown scheduling {scheduling!r}")
    graph = build_graph(pcm)
    llr_int = -np.clip(np.asarray(llr_ch, dtype=np.float64), -L_MAX, L_MAX)
    state = MessageState.initial(graph, llr_int)
    step = {"flooding": flooding_iteration,
            "layered": layered_iteration,
            "shuffled": shuffled_iteration}[scheduling]
    bits = hard_decision(-llr_int)
    for iteration in range(1, i_max + 1):
        step(graph, state, llr_int)
        c2v_sum = np.zeros(graph.n_bits, dtype=np.float64)
        np.add.at(c2v_sum, graph.cn_vn, state.c2v)
        posterior_int = llr_int + c2v_sum
        bits = (posterior_int < 0).astype(np.uint8)
        if not syndrome_of_bits(pcm.words, bits).any():
            return bits, iteration, True
    return bits, i_max, False
