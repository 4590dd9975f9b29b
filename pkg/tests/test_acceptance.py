"""Acceptance gate: one test per release criterion, each printing a PASS line
with its measured quantities. Tolerances are pinned here and must not drift.

These tests are slower than the per-module suites; the whole file targets a
~20 minute budget on a desktop machine.
"""

import math
import time

import numpy as np
import pytest

import wmslab
from wmslab import certify, channel as chan, de, msgpass, opt, sim, tanner


def report(num, text):
    print(f"\n[criterion {num:2d}] PASS — {text}")


def graph_pool(n, dv, dc, count, girth_min=4, seed0=100):
    return [tanner.build_regular_graph(n, dv, dc, girth_min=girth_min,
                                       seed=seed0 + k) for k in range(count)]


# ---------------------------------------------------------------------------
# 1. operator contraction bounds

def test_criterion_01_contraction_suites():
    t0 = time.time()
    rng = np.random.default_rng(1)
    pools = [graph_pool(12, 3, 6, 25), graph_pool(12, 3, 4, 25)]
    wms_betas = (0.1, 0.49, 0.5 - 1e-6)
    checked_w = checked_a = 0
    for trial in range(1000):
        g = pools[trial % 2][(trial // 2) % 25]
        gamma = rng.normal(size=g.n) * 3
        mu = rng.normal(size=g.num_edges) * 10
        nu = rng.normal(size=g.num_edges) * 10
        d = np.max(np.abs(mu - nu))
        for beta in wms_betas:
            dw = np.max(np.abs(msgpass.wms_step(g, gamma, mu, beta)
                               - msgpass.wms_step(g, gamma, nu, beta)))
            assert dw <= beta * (g.dv - 1) * d + 1e-12
            checked_w += 1
        rate = (g.dv - 1) * (g.dc - 1)
        beta_a = rng.uniform(0.0, 1.0 / rate)
        ma = msgpass.AmpMessages(mu.copy(), rng.normal(size=g.num_edges) * 10)
        na = msgpass.AmpMessages(nu.copy(), rng.normal(size=g.num_edges) * 10)
        da = max(np.max(np.abs(ma.v2c0 - na.v2c0)),
                 np.max(np.abs(ma.v2c1 - na.v2c1)))
        sa = msgpass.amp_step(g, gamma, ma, beta_a)
        sb = msgpass.amp_step(g, gamma, na, beta_a)
        dout = max(np.max(np.abs(sa.v2c0 - sb.v2c0)),
                   np.max(np.abs(sa.v2c1 - sb.v2c1)))
        assert dout <= beta_a * rate * da + 1e-12
        checked_a += 1
    dt = time.time() - t0
    assert dt < 10.0
    report(1, f"{checked_w} WMS + {checked_a} AMP contraction checks, "
              f"0 violations, {dt:.1f}s")


# ---------------------------------------------------------------------------
# 2. fixed-point uniqueness under contraction

def test_criterion_02_fixed_point_uniqueness():
    t0 = time.time()
    rng = np.random.default_rng(2)
    pool = graph_pool(18, 3, 6, 10, seed0=200)
    beta = 0.49  # beta (dv-1) = 0.98 < 1
    for trial in range(100):
        g = pool[trial % 10]
        gamma = rng.normal(size=g.n) * 2
        fp_tol = 1e-10 * max(1.0, float(np.max(np.abs(gamma))))
        fps = []
        for _ in range(2):
            mu = rng.normal(size=g.num_edges) * 30
            for _ in range(4000):
                new = msgpass.wms_step(g, gamma, mu, beta)
                step = np.max(np.abs(new - mu))
                mu = new
                if step < fp_tol:
                    break
            assert step < fp_tol
            fps.append(mu)
        assert np.max(np.abs(fps[0] - fps[1])) < 10 * fp_tol
    dt = time.time() - t0
    assert dt < 30.0
    report(2, f"100 instances x 2 initializations agree within 10*fp_tol, "
              f"{dt:.1f}s")


# ---------------------------------------------------------------------------
# 3. AMP/WMS equivalence via message differences

def test_criterion_03_amp_wms_equivalence():
    rng = np.random.default_rng(3)
    pool = graph_pool(12, 3, 6, 10, seed0=300)
    for trial in range(100):
        g = pool[trial % 10]
        # bounded-magnitude regime so 1e-9 is meaningful in double precision
        beta = rng.uniform(0.0, 1.0 / ((g.dv - 1) * (g.dc - 1)))
        gamma = rng.normal(size=g.n) * 3
        mu = msgpass.wms_init(g, gamma)
        msgs = msgpass.amp_init(g, gamma)
        for _ in range(20):
            mu = msgpass.wms_step(g, gamma, mu, beta)
            msgs = msgpass.amp_step(g, gamma, msgs, beta)
            assert np.max(np.abs(msgs.diff() - mu)) < 1e-9
    report(3, "100 instances x 20 iterations: |AMP diff - WMS| < 1e-9")


# ---------------------------------------------------------------------------
# 4. deterministic counterexample: large beta breaks the certificate

def test_criterion_04_large_beta_counterexample():
    g = tanner.from_dense_matrix(np.ones((4, 5), dtype=np.uint8))
    gamma = chan.all_minus_one_llr(5)
    beta = 0.7  # > 2/3 = 1/(dv-1)
    mu = msgpass.wms_step(g, gamma, msgpass.wms_init(g, gamma), beta)
    assert np.all(mu > 1.0)  # after iteration 1 every message exceeds 1
    res = msgpass.run(g, gamma, msgpass.DecoderConfig(beta=beta, max_iters=200))
    assert res.status is msgpass.Status.DIVERGENT_CONSISTENT
    assert not res.hard.any()
    word, obj, _ = opt.exact_ml(g, gamma)
    cb = tanner.enumerate_codewords(g)
    max_w = cb.sum(axis=1).max()
    assert word.sum() == max_w and obj == -float(max_w)
    assert word.any()  # decoder output (all-zeros) is not the ML word
    report(4, f"divergent-consistent all-zeros output vs ML weight-{max_w} "
              "codeword")


# ---------------------------------------------------------------------------
# 5. statistical reproduction of the benchmark-code census

def test_criterion_05_census_reproduction(bench12, bench12_codebook):
    t0 = time.time()
    res = sim.run_counterexample_census(bench12, p=0.1, beta=0.8, iters=200,
                                        blocks=100_000, seed=2026,
                                        codebook=bench12_codebook)
    dt = time.time() - t0
    frac = res.returned_fraction
    disagree = res.returned_codewords - res.ml_agreements
    assert 0.899 <= frac <= 0.919
    assert disagree >= 1
    assert dt < 600.0
    report(5, f"returned-codeword fraction {frac:.5f} in [0.899, 0.919], "
              f"{disagree} non-ML codewords, {dt:.0f}s")


# ---------------------------------------------------------------------------
# 6. certified implies ML

def test_criterion_06_certified_implies_ml(bench12, bench12_codebook):
    t0 = time.time()
    g34 = tanner.build_regular_graph(16, 3, 4, girth_min=6, seed=600)
    codes = [(bench12, bench12_codebook),
             (g34, tanner.enumerate_codewords(g34))]
    for g, cb in codes:
        assert math.log2(len(cb)) <= 20
    beta = 0.4  # < 1/(dv-1)
    certified = 0
    rng = np.random.default_rng(6)
    for trial in range(10_000):
        g, cb = codes[trial % 2]
        p = rng.uniform(0.02, 0.12)
        spec = chan.Bsc(p)
        word = cb[rng.integers(len(cb))]
        gamma = chan.llr(spec, chan.sample(spec, word, rng))
        res = msgpass.run(g, gamma, msgpass.DecoderConfig(beta=beta,
                                                          max_iters=500))
        assert res.status is msgpass.Status.CONVERGED  # contraction regime
        cert = certify.certify_ml(g, gamma, res, beta)
        if cert.certified:
            certified += 1
            best = float((cb.astype(float) @ gamma).min())
            assert float(gamma @ res.hard) <= best + 1e-9
    dt = time.time() - t0
    assert certified > 1000  # the claim must not pass vacuously
    assert dt < 300.0
    report(6, f"10000 trials, {certified} certified, 0 ML disagreements, "
              f"{dt:.0f}s")


# ---------------------------------------------------------------------------
# 7. dual witness exactness at fixed points

def test_criterion_07_dual_witness_exactness(bench12):
    g24 = tanner.build_regular_graph(24, 3, 6, girth_min=4, seed=700)
    rng = np.random.default_rng(7)
    checked = certified = 0
    for trial in range(1000):
        g = (bench12, g24)[trial % 2]
        beta = rng.uniform(0.05, 0.49)
        if trial % 2:
            gamma = rng.normal(size=g.n) * 2  # adversarial, rarely certified
        else:
            spec = chan.Bsc(rng.uniform(0.02, 0.1))
            gamma = chan.llr(spec, chan.sample(spec, np.zeros(g.n, np.uint8),
                                               rng))
        cfg = msgpass.DecoderConfig(beta=beta, max_iters=2000)
        res = msgpass.run(g, gamma, cfg)
        assert res.status is msgpass.Status.CONVERGED
        fp_tol, _ = cfg.resolve(gamma)
        w = certify.build_dual_witness(g, gamma, res.final_messages, beta,
                                       fp_tol=g.dv * fp_tol)
        assert w.feasibility_residual <= g.dv * fp_tol
        checked += 1
        cert = certify.certify_ml(g, gamma, res, beta)
        if cert.certified:
            certified += 1
            assert cert.gap <= certify.default_tol_cert(gamma)
    assert certified > 100
    report(7, f"{checked} fixed points: feasibility <= dv*fp_tol; "
              f"{certified} certificates with gap <= tol_cert")


# ---------------------------------------------------------------------------
# 8. divergence rescue at the critical weight

def test_criterion_08_delta_reduction_rescue(bench12, bench12_codebook):
    t0 = time.time()
    spec = chan.Bsc(0.05)
    cfg = msgpass.DecoderConfig(beta=0.5, max_iters=400)
    cbf = bench12_codebook.astype(float)
    divergent = certified = 0
    trial = 0
    while divergent < 100 and trial < 600:
        gamma = chan.llr(spec, chan.sample(spec, np.zeros(12, np.uint8),
                                           np.random.default_rng([8, trial])))
        trial += 1
        res = msgpass.run(bench12, gamma, cfg)
        if res.status is not msgpass.Status.DIVERGENT_CONSISTENT:
            continue
        divergent += 1
        cert, delta, rerun = certify.delta_reduction_certify(
            bench12, gamma, cfg, result=res)
        assert rerun is not None
        assert rerun.status is msgpass.Status.CONVERGED
        assert np.array_equal(rerun.hard, res.hard_at_L0)
        if cert.certified:
            certified += 1
            best = float((cbf @ gamma).min())
            assert float(gamma @ rerun.hard) <= best + 1e-9
    dt = time.time() - t0
    assert divergent >= 100
    assert certified > 0
    report(8, f"{divergent} divergent-consistent instances rescued "
              f"({certified} certified, all ML-verified), {dt:.0f}s")


# ---------------------------------------------------------------------------
# 9. density-evolution thresholds

def test_criterion_09_de_thresholds():
    t0 = time.time()
    r1 = de.threshold(de.ThresholdQuery(dv=3, dc=6, beta=0.5, channel="bsc",
                                        population=1_000_000,
                                        bracket=(0.045, 0.07), seed=90))
    assert r1.flag == "ok" and abs(r1.value - 0.055) <= 0.002
    r2 = de.threshold(de.ThresholdQuery(dv=3, dc=6, beta=0.8, channel="bsc",
                                        population=1_000_000,
                                        bracket=(0.07, 0.1), seed=91))
    assert r2.flag == "ok" and abs(r2.value - 0.083) <= 0.002
    r3 = de.threshold(de.ThresholdQuery(dv=3, dc=6, beta=0.3, channel="bsc",
                                        population=1_000_000,
                                        bracket=(0.02, 0.4), max_iters=250,
                                        seed=92))
    assert r3.flag == "NoThreshold"
    dt = time.time() - t0
    assert dt < 1200.0
    report(9, f"beta=0.5 -> {r1.value:.4f}, beta=0.8 -> {r2.value:.4f}, "
              f"beta=0.3 -> NoThreshold, {dt:.0f}s")


# ---------------------------------------------------------------------------
# 10. WER vs inconsistency-rate curves at n=10^3

@pytest.fixture(scope="module")
def g1000():
    return tanner.build_regular_graph(1000, 3, 6, girth_min=6, seed=1)


def ci_overlap(lo1, hi1, lo2, hi2):
    return lo1 <= hi2 and lo2 <= hi1


def test_criterion_10_wer_vs_consistency(g1000):
    t0 = time.time()
    rows = {}
    for beta in (0.5, 0.49):
        camp = sim.Campaign(graph=g1000, channel_kind="bsc",
                            grid=[0.05, 0.06, 0.07],
                            decoders=[sim.DecoderSpec("wms", beta, 500)],
                            trials=300, master_seed=2026)
        _, rows[beta] = sim.run_wer_campaign(camp)
    for r in rows[0.5]:
        assert ci_overlap(r["wer_lo"], r["wer_hi"],
                          r["p_inconsistent_lo"], r["p_inconsistent_hi"]), r
    for r in rows[0.49]:
        assert r["p_inconsistent"] >= r["wer_lo"], r
    dt = time.time() - t0
    assert dt < 1800.0
    summary = "; ".join(
        f"p={r['param']}: wer={r['wer']:.3f} pinc={r['p_inconsistent']:.3f}"
        for r in rows[0.5])
    report(10, f"beta=0.5 CIs overlap at every point ({summary}); "
               f"beta=0.49 inconsistency dominates, {dt:.0f}s")


# ---------------------------------------------------------------------------
# 11. TRMP comparison at n=10^3

def test_criterion_11_trmp_comparison(g1000):
    t0 = time.time()

    def wer_rows(grid, decoders):
        camp = sim.Campaign(graph=g1000, channel_kind="bsc", grid=grid,
                            decoders=decoders, trials=200, master_seed=7)
        _, rows = sim.run_wer_campaign(camp)
        return {(r["param"], r["decoder"]): r for r in rows}

    # long-budget TRMP tracks plain min-sum in their shared waterfall
    rows = wer_rows([0.06, 0.07], [sim.DecoderSpec("wms", 1.0, 1000),
                                   sim.DecoderSpec("trmp", None, 1000)])
    for p in (0.06, 0.07):
        a = rows[(p, "wms-1-1000")]
        b = rows[(p, "trmp-uniform-1000")]
        assert ci_overlap(a["wer_lo"], a["wer_hi"], b["wer_lo"], b["wer_hi"]), (a, b)
    pair1 = {p: (rows[(p, 'wms-1-1000')]['wer'],
                 rows[(p, 'trmp-uniform-1000')]['wer']) for p in (0.06, 0.07)}

    # short-budget TRMP tracks the beta=0.5 curve in its waterfall
    rows = wer_rows([0.035, 0.04], [sim.DecoderSpec("wms", 0.5, 100),
                                    sim.DecoderSpec("trmp", None, 100)])
    for p in (0.035, 0.04):
        a = rows[(p, "wms-0.5-100")]
        b = rows[(p, "trmp-uniform-100")]
        assert ci_overlap(a["wer_lo"], a["wer_hi"], b["wer_lo"], b["wer_hi"]), (a, b)
    pair2 = {p: (rows[(p, 'wms-0.5-100')]['wer'],
                 rows[(p, 'trmp-uniform-100')]['wer']) for p in (0.035, 0.04)}
    dt = time.time() - t0
    report(11, f"trmp@1000 vs min-sum {pair1}; trmp@100 vs wms-0.5 {pair2}, "
               f"{dt:.0f}s")


# ---------------------------------------------------------------------------
# 12. LP relaxation sanity

def test_criterion_12_lp_sanity(bench12, bench12_codebook):
    rng = np.random.default_rng(12)
    g34 = tanner.build_regular_graph(12, 3, 4, girth_min=4, seed=120)
    codes = [(bench12, bench12_codebook),
             (g34, tanner.enumerate_codewords(g34))]
    integral = fractional = 0
    for trial in range(50):
        g, cb = codes[trial % 2]
        gamma = rng.normal(size=g.n) * 2
        prob = opt.build_lp(g, gamma)
        sol = opt.solve_lp(prob)
        _, f_ml, _ = opt.exact_ml(g, gamma, cb)
        assert sol.objective <= f_ml + 1e-7
        if sol.integral:
            integral += 1
            assert sol.objective == pytest.approx(f_ml, abs=1e-7)
        else:
            fractional += 1
        ok, msg = opt.verify_lp_optimality(prob, sol)
        assert ok, msg
    report(12, f"50 instances: f_LP <= f_ML, {integral} integral optima all "
               f"equal ML, {fractional} fractional, all reduced-cost checks ok")


# ---------------------------------------------------------------------------
# 13. supporting algebraic property suites at scale

def test_criterion_13_property_suites(bench12, bench12_codebook):
    t0 = time.time()
    rng = np.random.default_rng(13)
    cases = 10_000

    # max of differences bounds the difference of maxima (vectorized batch)
    f = rng.normal(size=(cases, 8)) * 10
    h = rng.normal(size=(cases, 8)) * 10
    assert np.all(np.max(np.abs(f - h), axis=1)
                  >= np.abs(np.max(f, axis=1) - np.max(h, axis=1)) - 1e-12)

    # the check rule (sign product x min magnitude) is nonexpansive
    def check_rule(v):
        return (np.prod(np.where(v >= 0, 1.0, -1.0), axis=1)
                * np.min(np.abs(v), axis=1))
    mu = rng.normal(size=(cases, 5)) * 5
    nu = np.where(rng.random((cases, 5)) < 0.2, -mu,
                  mu + rng.normal(size=(cases, 5)))
    d = np.abs(check_rule(mu) - check_rule(nu))
    assert np.all(np.max(np.abs(mu - nu), axis=1) >= d - 1e-12)

    # the operator preserves sign patterns and magnitude dominance on
    # consistent pairs above the gamma/delta floor
    g = bench12
    ev = g.edge_var
    for _ in range(cases):
        gamma = rng.normal(size=12) * 2
        delta = rng.uniform(0.5, 0.999)
        beta = delta / (g.dv - 1)
        x = bench12_codebook[rng.integers(len(bench12_codebook))]
        signs = np.where(x[ev] == 1, -1.0, 1.0)
        floor = np.max(np.abs(gamma)) / delta
        nu_m = floor * (1.0 + rng.random(g.num_edges))
        mu_m = nu_m * (1.0 + rng.random(g.num_edges))
        wm = msgpass.wms_step(g, gamma, signs * mu_m, beta)
        wn = msgpass.wms_step(g, gamma, signs * nu_m, beta)
        assert np.all(np.abs(wm) >= np.abs(wn) - 1e-12)
        assert np.array_equal(np.sign(wm), signs)
        assert np.array_equal(np.sign(wn), signs)

    # a delta close enough to 1 keeps the reduced-weight trajectory within
    # epsilon of the critical-weight trajectory for L iterations
    L = 10
    pool = graph_pool(12, 3, 6, 8, seed0=1300)
    for k in range(cases):
        g = pool[k % 8]
        gamma = rng.normal(size=12) * 2
        gnorm = np.max(np.abs(gamma))
        eps = rng.uniform(0.05, 0.5) * gnorm
        delta = 1.0 - 2.0 * eps / (L * (L + 1) * gnorm)
        b1 = 1.0 / (g.dv - 1)
        b2 = delta / (g.dv - 1)
        mu = msgpass.wms_init(g, gamma)
        mud = mu.copy()
        for _ in range(L):
            mu = msgpass.wms_step(g, gamma, mu, b1)
            mud = msgpass.wms_step(g, gamma, mud, b2)
            assert np.max(np.abs(mu - mud)) < eps
    dt = time.time() - t0
    assert dt < 30.0
    report(13, f"4 suites x {cases} cases, 0 violations, {dt:.1f}s")
