import math

import numpy as np
import pytest

from hdpc import abp, channel, codes, schedulers, tanner
from reference import edge_states_literal


def _frame(code, snr_db, seed):
    rng = channel.frame_rng(seed, 0)
    noise = channel.NoiseModel(snr_db=snr_db, rate=code.rate)
    msg = rng.integers(0, 2, code.k_bits, dtype=np.uint8)
    cw = code.encode(msg)
    y = channel.awgn(channel.bpsk_modulate(cw), noise, rng)
    return cw, channel.channel_llr(y, noise)


# --------------------------------------------------------------- edge gate

def test_edge_states_all_unsatisfied_marks_everything(hamming):
    graph = tanner.build_graph(hamming.pcm)
    eps = schedulers.update_edge_states(
        graph, np.ones(7), np.ones(3, dtype=np.uint8), np.array([0]), 1.0)
    assert eps.epsilon.all()


def test_edge_states_satisfied_strong_marks_nothing(hamming):
    graph = tanner.build_graph(hamming.pcm)
    eps = schedulers.update_edge_states(
        graph, 9.0 * np.ones(7), np.zeros(3, dtype=np.uint8),
        np.array([0, 1, 2]), 1.0)
    assert not eps.epsilon.any()


def test_edge_states_infinite_threshold_disables_gating(hamming):
    graph = tanner.build_graph(hamming.pcm)
    eps = schedulers.update_edge_states(
        graph, 9.0 * np.ones(7), np.zeros(3, dtype=np.uint8),
        np.array([0]), math.inf)
    assert eps.epsilon.all()


def test_edge_states_against_literal_transcription(rng):
    # 3 checks: one unsatisfied, one satisfied with a weak neighbour, one
    # satisfied and confident
    dense = np.array([
        [1, 1, 1, 0, 0],
        [0, 1, 1, 1, 0],
        [0, 0, 1, 1, 1],
    ], dtype=np.uint8)
    graph = tanner.build_graph(dense)
    llr = np.array([5.0, 4.0, 6.0, 0.4, 7.0])
    syndrome = np.array([1, 0, 0], dtype=np.uint8)
    url_hat = np.array([3, 0])
    eps = schedulers.update_edge_states(graph, llr, syndrome, url_hat, 2.0)
    want = edge_states_literal(
        [graph.cn_neighbors(m).tolist() for m in range(3)],
        llr, syndrome, url_hat, 2.0)
    for m in range(3):
        for e in range(graph.cn_ptr[m], graph.cn_ptr[m + 1]):
            assert eps.epsilon[e] == want[(m, int(graph.cn_vn[e]))]
    # check 1 has eta = 0.4 < 2.0: exactly its edge into bit 3 is raised
    assert eps.epsilon[graph.edge_id(1, 3)] == 1
    assert eps.epsilon[graph.edge_id(1, 1)] == 0
    # satisfied check 2 also has eta = 0.4 < 2.0: only its selected-bit edge
    assert eps.epsilon[graph.edge_id(2, 3)] == 1
    assert eps.epsilon[graph.edge_id(2, 4)] == 0


def test_edge_states_fuzz_against_literal(rng):
    for _ in range(50):
        m, n = 5, 9
        while True:
            dense = (rng.random((m, n)) < 0.5).astype(np.uint8)
            if dense.sum(axis=1).min() >= 1:
                break
        graph = tanner.build_graph(dense)
        llr = rng.normal(scale=3.0, size=n)
        syn = rng.integers(0, 2, m, dtype=np.uint8)
        url_hat = rng.choice(n, size=m, replace=False)
        thr = float(rng.uniform(0.1, 4.0))
        eps = schedulers.update_edge_states(graph, llr, syn, url_hat, thr)
        want = edge_states_literal(
            [graph.cn_neighbors(q).tolist() for q in range(m)],
            llr, syn, url_hat, thr)
        for q in range(m):
            for e in range(graph.cn_ptr[q], graph.cn_ptr[q + 1]):
                assert eps.epsilon[e] == want[(q, int(graph.cn_vn[e]))]


def test_c2v_residual():
    assert schedulers.c2v_residual(1.0, 1.0) == 0.0
    assert schedulers.c2v_residual(-1.5, 2.0) == 3.5
    assert schedulers.c2v_residual(2.0, -1.5) == 3.5


# ------------------------------------------------------------ pl decoding

def test_pl_noiseless_no_partial_updates(rs31, rng):
    cw = rs31.encode(rng.integers(0, 2, rs31.k_bits, dtype=np.uint8))
    noise = channel.noise_for_sigma_squared(1e-4)
    llr = channel.channel_llr(channel.bpsk_modulate(cw), noise)
    cfg = schedulers.SchedulerConfig(rho=2, alpha=0.15, i_max=50, seed=1,
                                     threshold_T=None, tau=1.0)
    res = schedulers.pl_p_abp_decode(rs31.pcm, llr, cfg)
    assert res.success and res.iterations == 1
    assert np.array_equal(res.bits, cw)
    # every syndrome satisfied and every |LLR| clamped to 40 >= gate:
    # the sweep touches nothing
    assert res.counters.per_iteration[0].c2v == 0


def test_pl_noiseless_default_config(rs31, rng):
    cw = rs31.encode(rng.integers(0, 2, rs31.k_bits, dtype=np.uint8))
    noise = channel.noise_for_sigma_squared(1e-4)
    llr = channel.channel_llr(channel.bpsk_modulate(cw), noise)
    res = schedulers.pl_p_abp_decode(
        rs31.pcm, llr, schedulers.SchedulerConfig(rho=2, i_max=50, seed=1))
    assert res.success and res.iterations == 1


def test_pl_with_gate_off_matches_layered_abp(rs31):
    # T = +inf, rho = 0 must reproduce the plain check-serial adaptive
    # decoder bit for bit
    for seed in range(100):
        cw, llr = _frame(rs31, 3.9, seed)
        pl = schedulers.pl_p_abp_decode(
            rs31.pcm, llr,
            schedulers.SchedulerConfig(rho=0, alpha=0.15, i_max=30, seed=3,
                                       threshold_T=math.inf))
        ab = abp.abp_decode(
            rs31.pcm, llr, abp.DecoderConfig(rho=0, alpha=0.15, i_max=30,
                                             seed=3), scheduling="layered")
        assert pl.iterations == ab.iterations
        assert np.array_equal(pl.llr_out, ab.llr_out)
        assert np.array_equal(pl.bits, ab.bits)


def test_pl_edge_updates_bounded(rs31):
    for seed in range(20):
        cw, llr = _frame(rs31, 3.5, seed)
        res = schedulers.pl_p_abp_decode(
            rs31.pcm, llr,
            schedulers.SchedulerConfig(rho=2, alpha=0.15, i_max=20, seed=1,
                                       threshold_T=None, tau=1.0))
        for row in res.counters.per_iteration:
            assert row.c2v <= row.edges
            assert row.v2c <= row.edges


def test_pl_replay_deterministic(rs31):
    cw, llr = _frame(rs31, 3.8, 123)
    cfg = dict(rho=2, alpha=0.15, i_max=40, seed=9)
    a = schedulers.pl_p_abp_decode(rs31.pcm, llr,
                                   schedulers.SchedulerConfig(**cfg))
    b = schedulers.pl_p_abp_decode(rs31.pcm, llr,
                                   schedulers.SchedulerConfig(**cfg))
    assert a.iterations == b.iterations
    assert np.array_equal(a.llr_out, b.llr_out)


def test_pl_success_iff_zero_syndrome(rs31):
    for seed in range(20):
        cw, llr = _frame(rs31, 2.5, seed)
        res = schedulers.pl_p_abp_decode(
            rs31.pcm, llr, schedulers.SchedulerConfig(rho=2, i_max=8, seed=1))
        assert res.success == (not rs31.pcm.syndrome_bits(res.bits).any())


# ------------------------------------------------------------ hd decoding

def test_hd_noiseless_no_residual_computations(rs31, rng):
    cw = rs31.encode(rng.integers(0, 2, rs31.k_bits, dtype=np.uint8))
    noise = channel.noise_for_sigma_squared(1e-4)
    llr = channel.channel_llr(channel.bpsk_modulate(cw), noise)
    res = schedulers.hd_p_abp_decode(
        rs31.pcm, llr, schedulers.SchedulerConfig(rho=2, i_max=50, seed=1))
    assert res.success and res.iterations == 1
    assert np.array_equal(res.bits, cw)
    assert res.counters.per_iteration[0].residuals == 0


def test_hd_counter_bounds(rs31):
    for seed in range(20):
        cw, llr = _frame(rs31, 3.5, seed)
        res = schedulers.hd_p_abp_decode(
            rs31.pcm, llr,
            schedulers.SchedulerConfig(rho=2, alpha=0.15, i_max=20, seed=1))
        for row in res.counters.per_iteration:
            e, m = row.edges, row.checks
            d_v = e / rs31.n_bits
            d_c = e / m
            assert row.dsvnf_c2v <= e - m
            assert row.residuals <= (d_v - 1) * (d_c - 1) * e


def test_hd_replay_deterministic(rs31):
    cw, llr = _frame(rs31, 3.8, 55)
    cfg = dict(rho=2, alpha=0.15, i_max=40, seed=2)
    a = schedulers.hd_p_abp_decode(rs31.pcm, llr,
                                   schedulers.SchedulerConfig(**cfg))
    b = schedulers.hd_p_abp_decode(rs31.pcm, llr,
                                   schedulers.SchedulerConfig(**cfg))
    assert a.iterations == b.iterations
    assert np.array_equal(a.llr_out, b.llr_out)


def test_hd_success_iff_zero_syndrome(rs31):
    for seed in range(20):
        cw, llr = _frame(rs31, 2.5, seed)
        res = schedulers.hd_p_abp_decode(
            rs31.pcm, llr, schedulers.SchedulerConfig(rho=2, i_max=8, seed=1))
        assert res.success == (not rs31.pcm.syndrome_bits(res.bits).any())


# ------------------------------------------- dynamic loop against reference

def reference_dsvnf(graph, syndrome, v2c, tanh_v2c, c2v, c2v_sum, llr_int,
                    u, residuals, guard):
    """Literal transcription of the dynamic phase, scalar python."""
    import math as m_

    def cn_msg_excluding(cn, skip_edge):
        # associate as prefix * suffix, mirroring the production kernel's
        # float semantics so trajectories stay bitwise comparable
        base, hi = graph.cn_ptr[cn], graph.cn_ptr[cn + 1]
        if hi - base == 1:
            return 0.0
        prefix = 1.0
        for e in range(base, skip_edge):
            prefix *= tanh_v2c[e]
        suffix = 1.0
        for e in range(hi - 1, skip_edge, -1):
            suffix *= tanh_v2c[e]
        prod = min(max(prefix * suffix, -(1 - 1e-12)), 1 - 1e-12)
        return 2.0 * m_.atanh(prod)

    vn_ptr, vn_cn, vn_edge = graph.vn_view()
    stats = {"residuals": 0, "comparisons": 0, "c2v": 0, "v2c": 0}
    trace = []
    # residuals are pure functions of the message state: a clean check's
    # stored residuals equal what recomputation would give, so the dirty
    # cache reproduces the recompute-at-every-poll behaviour exactly
    dirty = np.ones(graph.m_checks, dtype=np.uint8)
    visited = int(u.sum())
    scan_from = 0
    pending = -1
    fruitless = 0
    done = 0
    epoch = 0
    while done < guard:
        if pending >= 0:
            vp, pending = pending, -1
        else:
            if visited >= graph.n_bits:
                u[:] = 0
                visited = 0
                scan_from = 0
                epoch += 1
            while u[scan_from]:
                scan_from += 1
            vp = scan_from
            u[vp] = 1
            visited += 1
        trace.append((epoch, vp))
        for ii in range(vn_ptr[vp], vn_ptr[vp + 1]):
            cn = vn_cn[ii]
            if syndrome[cn] != 1 or dirty[cn] == 0:
                continue
            dirty[cn] = 0
            for e in range(graph.cn_ptr[cn], graph.cn_ptr[cn + 1]):
                residuals[e] = abs(c2v[e] - cn_msg_excluding(cn, e))
                stats["residuals"] += 1
        best_e, best_r, cands = -1, -1.0, 0
        for ii in range(vn_ptr[vp], vn_ptr[vp + 1]):
            cn = vn_cn[ii]
            for e in range(graph.cn_ptr[cn], graph.cn_ptr[cn + 1]):
                if graph.cn_vn[e] == vp:
                    continue
                cands += 1
                if residuals[e] > best_r:
                    best_r, best_e = residuals[e], e
        if cands > 1:
            stats["comparisons"] += cands - 1
        if best_e < 0:
            fruitless += 1
            if fruitless > graph.n_bits:
                break
            continue
        fruitless = 0
        cn_star = int(graph.edge_cn[best_e])
        vj = int(graph.cn_vn[best_e])
        new_c = cn_msg_excluding(cn_star, best_e)
        c2v_sum[vj] += new_c - c2v[best_e]
        c2v[best_e] = new_c
        residuals[best_e] = 0.0
        stats["c2v"] += 1
        done += 1
        for ii in range(vn_ptr[vj], vn_ptr[vj + 1]):
            a = vn_cn[ii]
            if a == cn_star:
                continue
            e_a = vn_edge[ii]
            val = llr_int[vj] + c2v_sum[vj] - c2v[e_a]
            val = min(max(val, -40.0), 40.0)
            v2c[e_a] = val
            tanh_v2c[e_a] = m_.tanh(0.5 * val)
            dirty[a] = 1
            stats["v2c"] += 1
        if u[vj] == 0:
            u[vj] = 1
            visited += 1
            pending = vj
    return done, stats, trace


def _dynamic_setup(rng, m=4, n=9):
    from hdpc import kernels
    while True:
        dense = (rng.random((m, n)) < 0.5).astype(np.uint8)
        if dense.sum(axis=1).min() >= 2 and dense.sum(axis=0).min() >= 1:
            break
    graph = tanner.build_graph(dense)
    llr_int = rng.normal(scale=2.0, size=n)
    v2c = llr_int[graph.cn_vn].copy()
    tanh_v2c = np.tanh(0.5 * v2c)
    c2v = rng.normal(scale=1.0, size=graph.n_edges)
    c2v_sum = np.zeros(n)
    np.add.at(c2v_sum, graph.cn_vn, c2v)
    syndrome = rng.integers(0, 2, m, dtype=np.uint8)
    return graph, dense, llr_int, v2c, tanh_v2c, c2v, c2v_sum, syndrome


def test_dsvnf_kernel_matches_reference(rng):
    from hdpc import kernels
    for trial in range(15):
        graph, dense, llr_int, v2c, th, c2v, csum, syn = _dynamic_setup(rng)
        guard = graph.n_edges - graph.m_checks
        args_ref = (v2c.copy(), th.copy(), c2v.copy(), csum.copy())
        u_ref = np.zeros(graph.n_bits, dtype=np.uint8)
        r_ref = np.zeros(graph.n_edges)
        done_ref, stats, _ = reference_dsvnf(
            graph, syn, *args_ref, llr_int, u_ref, r_ref, guard)

        counters = np.zeros(kernels.N_COUNTERS, dtype=np.int64)
        u = np.zeros(graph.n_bits, dtype=np.uint8)
        r = np.zeros(graph.n_edges)
        vn_ptr, vn_cn, vn_edge = graph.vn_view()
        done = kernels.dsvnf_loop(
            graph.cn_ptr, graph.cn_vn, graph.edge_cn, vn_ptr, vn_cn, vn_edge,
            syn, v2c, th, c2v, csum, llr_int, u, r, guard, counters)
        assert done == done_ref
        assert counters[kernels.CTR_RESIDUAL] == stats["residuals"]
        assert counters[kernels.CTR_COMPARE] == stats["comparisons"]
        assert counters[kernels.CTR_V2C] == stats["v2c"]
        assert np.allclose(c2v, args_ref[2], atol=1e-12)
        assert np.allclose(v2c, args_ref[0], atol=1e-12)
        assert np.array_equal(u, u_ref)
        assert np.allclose(r, r_ref, atol=1e-12)


def test_dsvnf_polling_is_starvation_free(rng):
    # within one epoch no node is selected twice, and a reset only happens
    # after every node was visited
    for trial in range(10):
        graph, dense, llr_int, v2c, th, c2v, csum, syn = _dynamic_setup(rng)
        guard = graph.n_edges - graph.m_checks
        u = np.zeros(graph.n_bits, dtype=np.uint8)
        r = np.zeros(graph.n_edges)
        _, _, trace = reference_dsvnf(graph, syn, v2c, th, c2v, csum,
                                      llr_int, u, r, guard)
        by_epoch = {}
        for epoch, vp in trace:
            by_epoch.setdefault(epoch, []).append(vp)
        epochs = sorted(by_epoch)
        for epoch in epochs:
            picks = by_epoch[epoch]
            assert len(picks) == len(set(picks)), (epoch, picks)
        for epoch in epochs[1:]:
            assert len(by_epoch[epoch - 1]) == graph.n_bits


def test_dsvnf_zero_residual_tie_breaks_low_edge(rng):
    # all syndromes satisfied: no residuals computed, stored zeros tie, the
    # first (lowest check, lowest bit) candidate edge wins each step
    from hdpc import kernels
    graph, dense, llr_int, v2c, th, c2v, csum, syn = _dynamic_setup(rng)
    syn[:] = 0
    counters = np.zeros(kernels.N_COUNTERS, dtype=np.int64)
    u = np.zeros(graph.n_bits, dtype=np.uint8)
    r = np.zeros(graph.n_edges)
    vn_ptr, vn_cn, vn_edge = graph.vn_view()
    done = kernels.dsvnf_loop(
        graph.cn_ptr, graph.cn_vn, graph.edge_cn, vn_ptr, vn_cn, vn_edge,
        syn, v2c, th, c2v, csum, llr_int, u, r, graph.n_edges - graph.m_checks,
        counters)
    assert counters[kernels.CTR_RESIDUAL] == 0
    assert done == graph.n_edges - graph.m_checks


def test_scheduler_config_threshold_resolution():
    cfg = schedulers.SchedulerConfig()
    assert math.isinf(cfg.resolve_threshold(50.0))
    cfg = schedulers.SchedulerConfig(threshold_T=None, tau=2.0)
    assert cfg.resolve_threshold(50.0) == pytest.approx(2.0 * math.log(50.0))
    cfg = schedulers.SchedulerConfig(threshold_T=3.5)
    assert cfg.resolve_threshold(50.0) == 3.5
