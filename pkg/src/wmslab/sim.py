"""Monte Carlo campaigns: WER/consistency curves, the adversarial census on
the small benchmark code, decoder comparisons, and divergence-rate probes.

Every (point, trial) pair owns a derived RNG stream, so campaigns are
deterministic, resumable, and parallelizable. Decoders at the same point
and trial share one noise realization (common random numbers).
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import dataclass, field, asdict

import numpy as np

from . import channel as chan
from . import certify, msgpass, tanner


@dataclass(frozen=True)
class DecoderSpec:
    algo: str  # "wms" | "trmp"
    param: float | None  # beta for wms; rho for trmp (None -> uniform rho)
    iters: int

    @property
    def label(self):
        p = "uniform" if self.param is None else f"{self.param:g}"
        return f"{self.algo}-{p}-{self.iters}"


@dataclass
class Campaign:
    graph: tanner.TannerGraph
    channel_kind: str  # "bsc" | "biawgn"
    grid: list  # channel parameters
    decoders: list  # DecoderSpec
    trials: int
    master_seed: int = 0
    out_dir: str | None = None
    checkpoint_every: int = 200
    certify_runs: bool = False

    def fingerprint(self):
        text = tanner.write_alist(self.graph)
        blob = json.dumps({
            "code": hashlib.sha256(text.encode()).hexdigest(),
            "channel": self.channel_kind, "grid": list(self.grid),
            "decoders": [d.label for d in self.decoders],
            "trials": self.trials, "seed": self.master_seed,
        }, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


RECORD_COLS = ["point", "param", "decoder", "trial", "status", "word_error",
               "consistent", "certified", "ml_agrees", "iters"]


@dataclass
class TrialRecord:
    point: int
    param: float
    decoder: str
    trial: int
    status: str
    word_error: bool
    consistent: bool
    certified: bool | None = None
    ml_agrees: bool | None = None
    iters: int = 0


def wilson_interval(k, n, z=1.96):
    """Wilson 95% score interval for a binomial proportion."""
    if n == 0:
        return 0.0, 1.0
    phat = k / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _trial_rng(master_seed, point, trial):
    return np.random.default_rng([master_seed, point, trial])


def _spec_for(kind, param):
    if kind == "bsc":
        return chan.Bsc(p=param)
    if kind == "biawgn":
        return chan.Biawgn(sigma=param)
    raise ValueError(f"unknown channel kind {kind!r}")


def _decode_one(graph, gamma, dec: DecoderSpec, certify_runs=False):
    if dec.algo == "wms":
        cfg = msgpass.DecoderConfig(beta=dec.param, max_iters=dec.iters)
        res = msgpass.run(graph, gamma, cfg)
        certified = None
        if certify_runs and res.status is msgpass.Status.CONVERGED:
            cert = certify.certify_ml(graph, gamma, res, dec.param)
            certified = cert.certified
        return (res.hard, res.status.value, res.consistency.wms_consistent,
                certified, res.iters_run)
    if dec.algo == "trmp":
        rho = dec.param if dec.param is not None else msgpass.trmp_uniform_rho(graph)
        hard, tie, state, iters = msgpass.run_trmp(graph, gamma, rho, dec.iters)
        return hard, "trmp", False, None, iters
    raise ValueError(f"unknown decoder algo {dec.algo!r}")


def _load_done(path):
    done = set()
    if path and os.path.exists(path):
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                done.add((int(row["point"]), row["decoder"], int(row["trial"])))
    return done


def run_wer_campaign(campaign: Campaign):
    """All-zeros transmission over the channel grid.

    Returns (records, summary). Summary rows carry WER and inconsistency
    rates with Wilson 95% intervals per (point, decoder). With out_dir set,
    per-trial records append to records.csv and completed trials are skipped
    on resume.
    """
    graph = campaign.graph
    zeros = np.zeros(graph.n, dtype=np.uint8)
    rec_path = None
    writer = None
    fh = None
    if campaign.out_dir:
        os.makedirs(campaign.out_dir, exist_ok=True)
        rec_path = os.path.join(campaign.out_dir, "records.csv")
        with open(os.path.join(campaign.out_dir, "manifest.json"), "w") as mh:
            json.dump({"fingerprint": campaign.fingerprint(),
                       "master_seed": campaign.master_seed}, mh, indent=2)
    done = _load_done(rec_path)
    records = []
    if rec_path:
        new_file = not os.path.exists(rec_path)
        fh = open(rec_path, "a", newline="")
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(RECORD_COLS)
        if done:
            with open(rec_path, newline="") as rh:
                for row in csv.DictReader(rh):
                    records.append(_record_from_row(row))
    try:
        for p_idx, param in enumerate(campaign.grid):
            spec = _spec_for(campaign.channel_kind, param)
            for t in range(campaign.trials):
                if done and all((p_idx, d.label, t) in done
                                for d in campaign.decoders):
                    continue
                rng = _trial_rng(campaign.master_seed, p_idx, t)
                obs = chan.sample(spec, zeros, rng)
                gamma = chan.llr(spec, obs)
                for dec in campaign.decoders:
                    if (p_idx, dec.label, t) in done:
                        continue
                    hard, status, consistent, certified, iters = _decode_one(
                        graph, gamma, dec, campaign.certify_runs)
                    rec = TrialRecord(
                        point=p_idx, param=param, decoder=dec.label, trial=t,
                        status=status, word_error=bool(np.any(hard != zeros)),
                        consistent=bool(consistent), certified=certified,
                        iters=iters)
                    records.append(rec)
                    if writer:
                        writer.writerow(_record_to_row(rec))
                        if len(records) % campaign.checkpoint_every == 0:
                            fh.flush()
    finally:
        if fh:
            fh.close()
    return records, summarize(campaign, records)


def _record_to_row(r: TrialRecord):
    return [r.point, r.param, r.decoder, r.trial, r.status,
            int(r.word_error), int(r.consistent),
            "" if r.certified is None else int(r.certified),
            "" if r.ml_agrees is None else int(r.ml_agrees), r.iters]


def _record_from_row(row):
    opt_bool = lambda s: None if s == "" else bool(int(s))
    return TrialRecord(
        point=int(row["point"]), param=float(row["param"]),
        decoder=row["decoder"], trial=int(row["trial"]), status=row["status"],
        word_error=bool(int(row["word_error"])),
        consistent=bool(int(row["consistent"])),
        certified=opt_bool(row["certified"]),
        ml_agrees=opt_bool(row["ml_agrees"]), iters=int(row["iters"]))


def summarize(campaign: Campaign, records):
    """Per (point, decoder) WER and inconsistency rates with Wilson CIs."""
    rows = []
    for p_idx, param in enumerate(campaign.grid):
        for dec in campaign.decoders:
            sub = [r for r in records
                   if r.point == p_idx and r.decoder == dec.label]
            n = len(sub)
            we = sum(r.word_error for r in sub)
            inc = sum(not r.consistent for r in sub)
            wer_lo, wer_hi = wilson_interval(we, n)
            inc_lo, inc_hi = wilson_interval(inc, n)
            rows.append({
                "point": p_idx, "param": param, "decoder": dec.label,
                "trials": n, "wer": we / n if n else 0.0,
                "wer_lo": wer_lo, "wer_hi": wer_hi,
                "p_inconsistent": inc / n if n else 0.0,
                "p_inconsistent_lo": inc_lo, "p_inconsistent_hi": inc_hi})
    return rows


def summary_to_csv(rows, path):
    if not rows:
        with open(path, "w") as fh:
            fh.write("")
        return
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for r in rows:
            w.writerow(r)


# ---------------------------------------------------------------------------
# Census on a small code: how often does the decoder return a codeword, and
# how often is that codeword actually the ML word?

@dataclass
class CensusResult:
    blocks: int
    returned_codewords: int
    ml_agreements: int
    inconsistent: int

    @property
    def returned_fraction(self):
        return self.returned_codewords / self.blocks if self.blocks else 0.0


def run_counterexample_census(graph, p, beta, iters, blocks, seed,
                              random_codewords=True, codebook=None):
    """Decode `blocks` noisy transmissions and compare every returned
    codeword against the exact ML minimizer (enumerated once)."""
    if codebook is None:
        codebook = tanner.enumerate_codewords(graph)
    spec = chan.Bsc(p=p)
    cfg = msgpass.DecoderConfig(beta=beta, max_iters=iters)
    cb = codebook.astype(np.float64)
    returned = 0
    agree = 0
    inconsistent = 0
    for b in range(blocks):
        rng = _trial_rng(seed, 0, b)
        word = codebook[rng.integers(len(codebook))] if random_codewords \
            else codebook[0]
        gamma = chan.llr(spec, chan.sample(spec, word, rng))
        res = msgpass.run(graph, gamma, cfg)
        if not res.consistency.wms_consistent:
            inconsistent += 1
        if graph.is_codeword(res.hard):
            returned += 1
            best = float((cb @ gamma).min())
            if float(gamma @ res.hard) <= best + 1e-9:
                agree += 1
    return CensusResult(blocks=blocks, returned_codewords=returned,
                        ml_agreements=agree, inconsistent=inconsistent)


def run_trmp_comparison(graph, channel_kind, grid, trials, master_seed,
                        wms_betas=(0.5, 0.8, 1.0), wms_iters=200,
                        trmp_iter_grid=(100, 1000), out_dir=None):
    """Five-curve comparison with common random numbers: weighted min-sum at
    several weights vs TRMP at uniform rho with two iteration budgets."""
    decoders = [DecoderSpec("wms", b, wms_iters) for b in wms_betas]
    decoders += [DecoderSpec("trmp", None, it) for it in trmp_iter_grid]
    campaign = Campaign(graph=graph, channel_kind=channel_kind, grid=list(grid),
                        decoders=decoders, trials=trials,
                        master_seed=master_seed, out_dir=out_dir)
    return run_wer_campaign(campaign)


def run_conjecture_probe(graph, grid, trials, master_seed, iters=200):
    """Fraction of trials classified divergent-consistent at the critical
    weight beta = 1/(dv-1), per channel parameter."""
    beta = 1.0 / (graph.dv - 1)
    cfg = msgpass.DecoderConfig(beta=beta, max_iters=iters)
    zeros = np.zeros(graph.n, dtype=np.uint8)
    rows = []
    for p_idx, p in enumerate(grid):
        spec = chan.Bsc(p=p)
        hits = 0
        for t in range(trials):
            rng = _trial_rng(master_seed, p_idx, t)
            gamma = chan.llr(spec, chan.sample(spec, zeros, rng))
            res = msgpass.run(graph, gamma, cfg)
            if res.status is msgpass.Status.DIVERGENT_CONSISTENT:
                hits += 1
        lo, hi = wilson_interval(hits, trials)
        rows.append({"param": p, "trials": trials,
                     "divergent_consistent_rate": hits / trials if trials else 0.0,
                     "lo": lo, "hi": hi})
    return rows
