"""
Turbo-style row/column decoding of two-dimensional product codes.

Each global iteration decodes every row with the partial layered decoder
(component 2), then every column (component 1). Adaptation (sort, bit
selection, elimination) runs once per row/column per global iteration,
outside the short local loop. After a row or column finishes its local
iterations, its LLRs are kept only when every component check is satisfied;
otherwise they are reset to the channel values, which stops locally wrong
beliefs from propagating into the other dimension. A phase in which every
row (or every column) satisfies its checks terminates the decode.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels, tanner
from .abp import CounterLog, SweepState, adapt_matrix
from .codes import Code, ProductCode, ShapeMismatch
from .schedulers import SchedulerConfig, partial_layered_step

L_MAX = kernels.L_MAX


@dataclass
class ProductFrame:
    """LLR state of one product codeword; channel copy kept for the gating."""

    llr: np.ndarray
    channel_llr: np.ndarray

    @staticmethod
    def from_channel(llr_ch: np.ndarray) -> "ProductFrame":
        clipped = np.clip(np.asarray(llr_ch, dtype=np.float64), -L_MAX, L_MAX)
        return ProductFrame(llr=clipped.copy(), channel_llr=clipped.copy())


@dataclass
class ProductConfig:
    i_global: int = 8
    i_local: int = 5
    component: SchedulerConfig = field(default_factory=SchedulerConfig)

    def validate(self) -> None:
        if self.i_global < 1 or self.i_local < 1:
            raise ValueError("global and local iteration limits must be >= 1")


@dataclass
class GatingEvent:
    """One row/column decision of the LLR gate, for instrumentation."""

    global_iteration: int
    phase: str
    index: int
    retained: bool
    valid_codeword: bool


@dataclass
class ProductDecodeResult:
    bits: np.ndarray
    global_iterations: int
    success: bool
    llr_out: np.ndarray
    counters: CounterLog
    gating_trace: list


def product_encode(product: ProductCode, message: np.ndarray) -> np.ndarray:
    """Systematically encode a k1 x k2 message array to n1 x n2.

    Rows are encoded with component 2 and columns with component 1; for
    systematic linear encoders the two orders commute, so every column of
    the result is a component-1 codeword and every row a component-2
    codeword.
    """
    message = np.asarray(message, dtype=np.uint8)
    spec = product.spec
    if message.shape != (spec.k1, spec.k2):
        raise ShapeMismatch(
            f"expected ({spec.k1}, {spec.k2}) message, got {message.shape}")
    rows_done = product.code2.encode_batch(message)            # (k1, n2)
    full = product.code1.encode_batch(rows_done.T).T           # (n1, n2)
    return full.astype(np.uint8)


def _decode_lines(lines_llr: np.ndarray, prev_lines: Optional[np.ndarray],
                  channel_lines: np.ndarray, code: Code,
                  config: ProductConfig, rng: np.random.Generator,
                  log: CounterLog, trace: list, gi: int, phase: str) -> int:
    """Decode each row of ``lines_llr`` in place with the component decoder
    and apply the keep-or-reset gate. Returns the number of satisfied lines."""
    comp = config.component
    num_succ = 0
    for idx in range(lines_llr.shape[0]):
        line = lines_llr[idx].copy()
        line_prev = None if prev_lines is None else prev_lines[idx]
        adapted = adapt_matrix(code.pcm, line, line_prev, comp.rho, rng)
        threshold = comp.resolve_threshold(adapted.graph.avg_cn_degree)
        state = SweepState(adapted.graph, adapted.words, -line)
        for _ in range(config.i_local):
            line = partial_layered_step(adapted, state, line, threshold,
                                        comp.alpha, log)
            if not tanner.syndrome_of_bits(
                    code.pcm.words, tanner.hard_decision(line)).any():
                break
        ok = not tanner.syndrome_of_bits(
            code.pcm.words, tanner.hard_decision(line)).any()
        if ok:
            num_succ += 1
            lines_llr[idx] = line
        else:
            lines_llr[idx] = channel_lines[idx]
        trace.append(GatingEvent(gi, phase, idx, retained=ok,
                                 valid_codeword=ok))
    return num_succ


def pl_p_abp_p_decode(product: ProductCode, llr_ch: np.ndarray,
                      config: ProductConfig) -> ProductDecodeResult:
    """Global row/column iteration of the partial layered component decoder.

    Sign-change detection inside the component bit selection compares each
    row (column) against the same row (column) as it stood at the previous
    global iteration's matching phase; the first phase has no previous
    snapshot and uses the random branch.
    """
    config.validate()
    spec = product.spec
    frame = (llr_ch if isinstance(llr_ch, ProductFrame)
             else ProductFrame.from_channel(llr_ch))
    if frame.llr.shape != (spec.n1, spec.n2):
        raise ShapeMismatch(
            f"expected ({spec.n1}, {spec.n2}) LLRs, got {frame.llr.shape}")
    rng = np.random.default_rng(config.component.seed)
    log = CounterLog()
    trace: list = []
    llr = frame.llr
    prev_rows: Optional[np.ndarray] = None
    prev_cols: Optional[np.ndarray] = None

    for gi in range(1, config.i_global + 1):
        row_snapshot = llr.copy()
        num_succ = _decode_lines(llr, prev_rows, frame.channel_llr,
                                 product.code2, config, rng, log, trace,
                                 gi, "row")
        prev_rows = row_snapshot
        if num_succ == spec.n1:
            return ProductDecodeResult(tanner.hard_decision(llr), gi, True,
                                       llr, log, trace)

        col_snapshot = llr.copy()
        llr_t = np.ascontiguousarray(llr.T)
        num_succ = _decode_lines(llr_t, None if prev_cols is None
                                 else prev_cols.T.copy(),
                                 np.ascontiguousarray(frame.channel_llr.T),
                                 product.code1, config, rng, log, trace,
                                 gi, "col")
        llr = np.ascontiguousarray(llr_t.T)
        prev_cols = col_snapshot
        if num_succ == spec.n2:
            return ProductDecodeResult(tanner.hard_decision(llr), gi, True,
                                       llr, log, trace)

    return ProductDecodeResult(tanner.hard_decision(llr), config.i_global,
                               False, llr, log, trace)
