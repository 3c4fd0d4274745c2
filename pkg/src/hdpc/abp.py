"""
Adaptive BP: reliability ordering, perturbed unreliable-bit selection,
parity-check sparsification, and the flooding-form adaptive decoder.

Each iteration re-derives the working parity-check matrix: the M columns
named by the bit-selection step are turned into unit columns by row
operations ("boxing" the weakest bits behind single checks), one BP pass on
the resulting graph produces an extrinsic vector, and the posterior moves a
damped step along it. The LLR vector is the only state carried between
iterations; messages live inside an iteration because the graph changes
under them.

Bit selection with a perturbation factor rho > 0 keeps the first M - rho
least reliable bits and replaces the remainder with detected sign-flipping
bits of large magnitude (plus uniform random fill when too few exist), which
is the "perturbed" part of the decoder family.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from . import bitmatrix, kernels, tanner
from .codes import ParityCheckMatrix

L_MAX = kernels.L_MAX


class RhoTooLarge(ValueError):
    """Perturbation factor exceeds the number of parity checks."""


class RankDeficient(RuntimeError):
    """Fewer than M independent columns exist (impossible for full-rank H)."""


@dataclass
class UrlSets:
    """Index bookkeeping of one reliability sort.

    ``url``: the M least reliable bit indices, ascending magnitude;
    ``url1``/``url2``: its first M - rho and last rho entries; ``rl``: the
    remaining K indices, ascending magnitude; ``z``: sign-changed members of
    ``rl`` in descending magnitude (empty until a previous LLR snapshot is
    available); ``g``: len(z).
    """

    url: np.ndarray
    url1: np.ndarray
    url2: np.ndarray
    rl: np.ndarray
    z: np.ndarray = dc_field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @property
    def g(self) -> int:
        return int(self.z.shape[0])


@dataclass
class DecoderConfig:
    rho: int = 0
    alpha: float = 0.15
    i_max: int = 20
    seed: Optional[int] = 0

    def validate(self, m_checks: int) -> None:
        if not (0 <= self.rho <= m_checks):
            raise RhoTooLarge(f"rho={self.rho} outside [0, {m_checks}]")
        if not (0.0 < self.alpha <= 1.0):
            raise tanner.AlphaOutOfRange(f"alpha={self.alpha} not in (0, 1]")
        if self.i_max < 1:
            raise ValueError("i_max must be >= 1")


def reliability_order(llr: np.ndarray) -> np.ndarray:
    """All bit indices by ascending |LLR|, ties broken by ascending index."""
    return np.argsort(np.abs(np.asarray(llr, dtype=np.float64)),
                      kind="stable").astype(np.int64)


def sort_by_reliability(llr: np.ndarray, m_checks: int, rho: int) -> UrlSets:
    """Split the reliability order into the least reliable M and the rest."""
    llr = np.asarray(llr, dtype=np.float64)
    if m_checks > llr.shape[0]:
        raise ValueError("M exceeds the number of bits")
    if rho > m_checks:
        raise RhoTooLarge(f"rho={rho} > M={m_checks}")
    order = reliability_order(llr)
    url = order[:m_checks]
    return UrlSets(url=url,
                   url1=url[:m_checks - rho],
                   url2=url[m_checks - rho:],
                   rl=order[m_checks:])


def detect_sign_changes(llr: np.ndarray, llr_prev: np.ndarray,
                        candidates: np.ndarray) -> np.ndarray:
    """Indices from ``candidates`` whose LLR sign strictly flipped, ordered by
    descending current magnitude (ties by ascending index).

    Membership depends only on signs, so it is invariant under positive
    rescaling of either vector."""
    cur = np.asarray(llr, dtype=np.float64)[candidates]
    prev = np.asarray(llr_prev, dtype=np.float64)[candidates]
    flipped = np.sign(cur) * np.sign(prev) < 0
    hits = candidates[flipped]
    mags = np.abs(np.asarray(llr, dtype=np.float64))[hits]
    return hits[np.lexsort((hits, -mags))]


def pum(llr: np.ndarray, llr_prev: Optional[np.ndarray], m_checks: int,
        rho: int, rng: np.random.Generator) -> tuple[np.ndarray, UrlSets]:
    """Refined selection of the M columns to sparsify.

    Keeps the M - rho least reliable bits, then fills the remaining rho slots
    with sign-flipping large-magnitude bits first and uniform random picks
    from the documented candidate pools when fewer than rho exist. Before the
    first BP pass there is no previous snapshot, so no sign changes are
    detectable and the random branch applies. Deterministic given ``rng``.

    Returns (selected indices, UrlSets including the sign-change set).
    """
    sets = sort_by_reliability(llr, m_checks, rho)
    if rho == 0:
        return sets.url.copy(), sets

    if llr_prev is not None:
        sets.z = detect_sign_changes(llr, llr_prev, sets.rl)
    g = sets.g

    if g >= rho:
        url_hat2 = sets.z[:rho]
    elif g > 0:
        pool = np.sort(np.concatenate(
            [sets.url2, np.setdiff1d(sets.rl, sets.z, assume_unique=True)]))
        extra = rng.choice(pool, size=rho - g, replace=False)
        url_hat2 = np.concatenate([sets.z, extra])
    else:
        pool = np.sort(np.concatenate([sets.url2, sets.rl]))
        url_hat2 = rng.choice(pool, size=rho, replace=False)

    return np.concatenate([sets.url1, url_hat2]).astype(np.int64), sets


@dataclass
class SparsifiedMatrix:
    """Result of sparsifying M selected columns by row operations.

    Row operations only, so the null space (the code) is untouched. Each
    entry of ``pivot_map`` is (row, column) of one unit column; columns that
    turned out linearly dependent on earlier pivots appear in
    ``fallback_log`` paired with the substitute column that was used."""

    pcm: ParityCheckMatrix
    pivot_map: list[tuple[int, int]]
    fallback_log: list[tuple[int, int]]


def _ge_words(h_words: np.ndarray, priority: np.ndarray
              ) -> tuple[np.ndarray, np.ndarray, int]:
    work = h_words.copy()
    pivot_cols = np.empty(work.shape[0], dtype=np.int64)
    fallbacks = kernels.ge_by_priority(work, priority, pivot_cols)
    if fallbacks < 0:
        raise RankDeficient("could not find M independent columns")
    return work, pivot_cols, fallbacks


def gaussian_eliminate(pcm: ParityCheckMatrix, targets: np.ndarray,
                       fallback_order: Optional[np.ndarray] = None
                       ) -> SparsifiedMatrix:
    """Unit-column sparsification of the ``targets`` columns.

    ``fallback_order`` supplies substitute columns (the decoders pass the
    remaining reliability order); without it the remaining columns are tried
    in ascending index order.
    """
    targets = np.asarray(targets, dtype=np.int64)
    if targets.shape[0] != pcm.rows or np.unique(targets).shape[0] != pcm.rows:
        raise ValueError(f"need {pcm.rows} distinct target columns")
    member = np.zeros(pcm.cols, dtype=bool)
    member[targets] = True
    if fallback_order is None:
        rest = np.flatnonzero(~member).astype(np.int64)
    else:
        fallback_order = np.asarray(fallback_order, dtype=np.int64)
        rest = fallback_order[~member[fallback_order]]
    priority = np.concatenate([targets, rest])
    work, pivot_cols, _ = _ge_words(pcm.words, priority)
    sparsified = ParityCheckMatrix(bitmatrix.unpack_rows(work, pcm.cols))
    requested = set(int(t) for t in targets)
    used = [int(c) for c in pivot_cols]
    missed = [t for t in targets.tolist() if t not in set(used)]
    substitutes = [c for c in used if c not in requested]
    return SparsifiedMatrix(
        pcm=sparsified,
        pivot_map=[(r, int(c)) for r, c in enumerate(pivot_cols)],
        fallback_log=list(zip(missed, substitutes)),
    )


@dataclass
class IterationStats:
    """Per-iteration operation counts in the style of the complexity table."""

    edges: int
    checks: int
    c2v: int
    v2c: int
    residuals: int
    comparisons: int
    dsvnf_c2v: int


@dataclass
class CounterLog:
    per_iteration: list = dc_field(default_factory=list)

    def add(self, edges: int, checks: int, arr: np.ndarray,
            extra_comparisons: int = 0) -> None:
        self.per_iteration.append(IterationStats(
            edges=edges, checks=checks,
            c2v=int(arr[kernels.CTR_C2V]), v2c=int(arr[kernels.CTR_V2C]),
            residuals=int(arr[kernels.CTR_RESIDUAL]),
            comparisons=int(arr[kernels.CTR_COMPARE]) + extra_comparisons,
            dsvnf_c2v=int(arr[kernels.CTR_DSVNF_C2V])))

    def total(self, name: str) -> int:
        return sum(getattr(row, name) for row in self.per_iteration)

    @property
    def totals(self) -> dict:
        return {name: self.total(name)
                for name in ("c2v", "v2c", "residuals", "comparisons",
                             "dsvnf_c2v")}


@dataclass
class DecodeResult:
    bits: np.ndarray
    iterations: int
    success: bool
    llr_out: np.ndarray
    counters: CounterLog


@dataclass
class AdaptedGraph:
    """One iteration's sparsified matrix and graph, plus selection metadata."""

    words: np.ndarray
    graph: tanner.TannerGraph
    url_hat: np.ndarray
    member: np.ndarray
    sets: UrlSets
    fallbacks: int
    pum_comparisons: int


class SweepState:
    """Per-edge messages aligned to one adapted graph.

    The serial schedules keep messages alive across iterations: a skipped
    edge retains its last value and keeps contributing to the extrinsic
    sums. Because the adapted matrix is re-derived every iteration, carrying
    is done by exact row content: a check equation present in both the old
    and the new matrix hands its edge messages over (same row, same columns,
    same edge order); a new equation starts from the current-prior seed
    (V2C = seed LLR, C2V = 0).
    """

    def __init__(self, graph: tanner.TannerGraph, words: np.ndarray,
                 llr_seed_int: np.ndarray,
                 carry: "SweepState | None" = None):
        self.graph = graph
        self.row_bytes = [words[m].tobytes() for m in range(words.shape[0])]
        self.v2c = llr_seed_int[graph.cn_vn].copy()
        self.c2v = np.zeros(graph.n_edges, dtype=np.float64)
        if carry is not None:
            prev = {key: m for m, key in enumerate(carry.row_bytes)}
            pg = carry.graph
            for m, key in enumerate(self.row_bytes):
                j = prev.get(key)
                if j is None:
                    continue
                lo, hi = self.graph.cn_ptr[m], self.graph.cn_ptr[m + 1]
                plo, phi = pg.cn_ptr[j], pg.cn_ptr[j + 1]
                if hi - lo != phi - plo:
                    continue
                self.v2c[lo:hi] = carry.v2c[plo:phi]
                self.c2v[lo:hi] = carry.c2v[plo:phi]
        self.tanh_v2c = np.tanh(0.5 * self.v2c)
        self.c2v_sum = np.zeros(graph.n_bits, dtype=np.float64)
        np.add.at(self.c2v_sum, graph.cn_vn, self.c2v)


def adapt_matrix(pcm: ParityCheckMatrix, llr: np.ndarray,
                 llr_prev: Optional[np.ndarray], rho: int,
                 rng: np.random.Generator) -> AdaptedGraph:
    """Sort + bit selection + elimination; shared by all adaptive decoders.

    Comparison accounting follows the complexity analysis: N sign
    comparisons when a previous snapshot exists plus g(g-1)/2 magnitude
    comparisons to order the sign-flip set.
    """
    url_hat, sets = pum(llr, llr_prev, pcm.rows, rho, rng)
    order = reliability_order(llr)
    member = np.zeros(pcm.cols, dtype=bool)
    member[url_hat] = True
    in_hat = member[order]
    priority = np.concatenate([order[in_hat], order[~in_hat]])
    work, pivot_cols, fallbacks = _ge_words(pcm.words, priority)
    graph = tanner.TannerGraph(bitmatrix.unpack_rows(work, pcm.cols))
    comparisons = 0
    if rho > 0 and llr_prev is not None:
        g = sets.g
        comparisons = pcm.cols + g * (g - 1) // 2
    return AdaptedGraph(words=work, graph=graph, url_hat=url_hat,
                        member=member, sets=sets, fallbacks=fallbacks,
                        pum_comparisons=comparisons)


def abp_decode(pcm: ParityCheckMatrix, llr_ch: np.ndarray,
               config: DecoderConfig,
               scheduling: str = "flooding") -> DecodeResult:
    """Adaptive BP with a fixed schedule (flooding by default).

    Per iteration: adapt the matrix around the current reliabilities, run one
    BP pass of the chosen schedule on the fresh graph seeded by the current
    LLRs, damp-update the LLR vector, stop as soon as the hard decisions
    satisfy every parity check. rho = 0 reproduces the traditional adaptive
    decoder; rho > 0 adds the perturbed selection.
    """
    if scheduling not in ("flooding", "layered", "shuffled"):
        raise ValueError(f"unknown scheduling {scheduling!r}")
    config.validate(pcm.rows)
    rng = np.random.default_rng(config.seed)
    llr = np.clip(np.asarray(llr_ch, dtype=np.float64), -L_MAX, L_MAX)
    llr_prev: Optional[np.ndarray] = None
    log = CounterLog()
    bits = tanner.hard_decision(llr)
    carry: Optional[SweepState] = None

    for iteration in range(1, config.i_max + 1):
        adapted = adapt_matrix(pcm, llr, llr_prev, config.rho, rng)
        graph = adapted.graph
        counters = np.zeros(kernels.N_COUNTERS, dtype=np.int64)
        llr_int = -llr
        if scheduling == "flooding":
            ext_int = np.zeros(graph.n_bits, dtype=np.float64)
            kernels.flooding_extrinsic(graph.cn_ptr, graph.cn_vn,
                                       np.tanh(0.5 * llr_int), ext_int,
                                       counters)
        else:
            state = SweepState(graph, adapted.words, llr_int, carry)
            mask = np.ones(graph.n_edges, dtype=np.uint8)
            if scheduling == "layered":
                kernels.serial_layered_sweep(
                    graph.cn_ptr, graph.cn_vn, mask, state.v2c,
                    state.tanh_v2c, state.c2v, state.c2v_sum, llr_int,
                    counters)
            else:
                vn_ptr, vn_cn, vn_edge = graph.vn_view()
                kernels.serial_shuffled_sweep(
                    graph.cn_ptr, graph.cn_vn, vn_ptr, vn_cn, vn_edge,
                    state.v2c, state.tanh_v2c, state.c2v, state.c2v_sum,
                    llr_int, counters)
            ext_int = np.zeros(graph.n_bits, dtype=np.float64)
            kernels.extrinsic_from_v2c(graph.cn_ptr, graph.cn_vn,
                                       state.tanh_v2c, ext_int)
            carry = state
        llr_prev = llr
        llr = np.clip(llr + config.alpha * (-ext_int), -L_MAX, L_MAX)
        log.add(graph.n_edges, graph.m_checks, counters,
                adapted.pum_comparisons)
        bits = tanner.hard_decision(llr)
        if not tanner.syndrome_of_bits(pcm.words, bits).any():
            return DecodeResult(bits, iteration, True, llr, log)

    return DecodeResult(bits, config.i_max, False, llr, log)
