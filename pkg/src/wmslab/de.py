"""Sampled density evolution for weighted min-sum on regular ensembles.

Tracks the variable-to-check message density under the all-zeros-codeword
assumption with a population of N samples, and locates noise thresholds by
bisection on the channel parameter.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import channel as chan

TARGET_ERR = 1e-6
STAGNATION_WINDOW = 100
STAGNATION_FACTOR = 100.0


@dataclass(frozen=True)
class ThresholdQuery:
    dv: int
    dc: int
    beta: float
    channel: str = "bsc"  # "bsc" | "biawgn"
    target: float = TARGET_ERR
    max_iters: int = 500
    population: int = 1_000_000
    bisect_tol: float = 5e-4
    bracket: tuple | None = None  # (low-noise end, high-noise end)
    seed: int = 0


@dataclass
class ThresholdResult:
    query: ThresholdQuery
    value: float | None  # channel parameter at the threshold
    flag: str  # "ok" | "NoThreshold"
    evaluations: int


class BracketError(RuntimeError):
    """Both bracket ends succeed: the bracket does not straddle a threshold."""


def error_probability(samples):
    """P(message < 0) + half the mass at exactly zero."""
    return float(np.mean(samples < 0) + 0.5 * np.mean(samples == 0))


def de_step(samples, dv, dc, beta, llr_draw, rng):
    """One density-evolution iteration by population resampling.

    Check side: dc-1 draws, sign product times min magnitude. Variable side:
    dv-1 check outputs plus a fresh channel LLR, gamma + beta * sum.
    """
    n = len(samples)
    need = n * (dv - 1)
    picks = samples[rng.integers(0, n, size=(need, dc - 1))]
    signs = np.where(picks >= 0, 1.0, -1.0).prod(axis=1)
    chk = signs * np.abs(picks).min(axis=1)
    gamma = llr_draw(n, rng)
    return gamma + beta * chk.reshape(n, dv - 1).sum(axis=1)


def run_de(dv, dc, beta, llr_draw, population, seed, max_iters=500,
           target=TARGET_ERR):
    """Iterate DE until the error estimator clears the target.

    Returns (success, final error, iterations). Gives up early when the
    running minimum has not improved for a while and sits far above target.
    """
    rng = np.random.default_rng(seed)
    samples = llr_draw(population, rng)
    best = np.inf
    best_iter = 0
    for it in range(1, max_iters + 1):
        samples = de_step(samples, dv, dc, beta, llr_draw, rng)
        err = error_probability(samples)
        if err < target:
            return True, err, it
        if err < best:
            best = err
            best_iter = it
        elif (it - best_iter > STAGNATION_WINDOW
              and err > STAGNATION_FACTOR * target):
            # the running minimum has stalled far from the target: the
            # population has settled at a nonzero error level
            return False, err, it
    return False, error_probability(samples), max_iters


def _spec_for(kind, param):
    if kind == "bsc":
        return chan.Bsc(p=param)
    if kind == "biawgn":
        return chan.Biawgn(sigma=param)
    raise ValueError(f"unknown channel kind {kind!r}")


def _default_bracket(kind):
    # (low-noise end, high-noise end)
    return (0.002, 0.45) if kind == "bsc" else (0.2, 2.0)


def threshold(query: ThresholdQuery) -> ThresholdResult:
    """Bisection on the channel parameter for the largest decodable noise.

    The low-noise end must succeed and the high-noise end must fail; failure
    already at the low end means the ensemble never decodes and is reported
    as NoThreshold; success at both ends raises BracketError.
    """
    lo, hi = query.bracket or _default_bracket(query.channel)
    evals = 0

    def ok_at(param, k):
        nonlocal evals
        evals += 1
        draw = chan.llr_sampler(_spec_for(query.channel, param))
        success, _, _ = run_de(query.dv, query.dc, query.beta, draw,
                               query.population, [query.seed, k],
                               max_iters=query.max_iters, target=query.target)
        return success

    if not ok_at(lo, 0):
        return ThresholdResult(query=query, value=None, flag="NoThreshold",
                               evaluations=evals)
    if ok_at(hi, 1):
        raise BracketError(
            f"decoding succeeds at both bracket ends ({lo}, {hi})")
    k = 2
    while hi - lo > query.bisect_tol:
        mid = 0.5 * (lo + hi)
        if ok_at(mid, k):
            lo = mid
        else:
            hi = mid
        k += 1
    return ThresholdResult(query=query, value=0.5 * (lo + hi), flag="ok",
                           evaluations=evals)


def threshold_curve(dv, dc, channel_kind, betas, population=1_000_000,
                    seed=0, **kwargs):
    """Threshold per beta on a grid; returns a list of row dicts."""
    rows = []
    for k, beta in enumerate(betas):
        q = ThresholdQuery(dv=dv, dc=dc, beta=beta, channel=channel_kind,
                           population=population, seed=seed + k, **kwargs)
        try:
            res = threshold(q)
            value, flag = res.value, res.flag
        except BracketError as exc:
            value, flag = None, f"BracketError: {exc}"
        rows.append({"dv": dv, "dc": dc, "beta": beta,
                     "channel": channel_kind,
                     "param": "p" if channel_kind == "bsc" else "sigma",
                     "threshold_or_flag": value if value is not None else flag,
                     "N": population, "iters": q.max_iters, "seed": q.seed})
    return rows


def curve_to_csv(rows):
    buf = io.StringIO()
    cols = ["dv", "dc", "beta", "channel", "param", "threshold_or_flag",
            "N", "iters", "seed"]
    w = csv.DictWriter(buf, fieldnames=cols)
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()
