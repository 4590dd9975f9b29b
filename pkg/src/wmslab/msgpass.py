"""Message-passing decoders: weighted min-sum, attenuated max-product, TRMP.

All operators are pure functions over flat per-directed-edge numpy arrays
(edge layout from TannerGraph). `run` drives a WMS trajectory and classifies
it as converged / divergent-consistent / oscillating / max-iters.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

CLAMP = 1e12


class Status(enum.Enum):
    CONVERGED = "Converged"
    DIVERGENT_CONSISTENT = "DivergentConsistent"
    OSCILLATING = "Oscillating"
    MAX_ITERS = "MaxIters"


@dataclass(frozen=True)
class DecoderConfig:
    """Knobs for a WMS trajectory run.

    fp_tol / div_threshold default to None and are resolved against the
    input LLR scale: 1e-10 * max(1, ||gamma||_inf) and 100 * ||gamma||_inf.
    """

    beta: float
    max_iters: int = 200
    fp_tol: float | None = None
    div_threshold: float | None = None
    div_window: int = 10
    trmp_rho: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if self.fp_tol is not None and not self.fp_tol > 0:
            raise ValueError("fp_tol must be positive")
        if self.div_window < 1:
            raise ValueError("div_window must be >= 1")

    def resolve(self, gamma):
        """Concrete (fp_tol, div_threshold) for a given LLR vector."""
        scale = float(np.max(np.abs(gamma))) if len(gamma) else 1.0
        fp = self.fp_tol if self.fp_tol is not None else 1e-10 * max(1.0, scale)
        div = self.div_threshold if self.div_threshold is not None else 100.0 * scale
        return fp, div


@dataclass
class DecodeResult:
    hard: np.ndarray
    status: Status
    iters_run: int
    final_messages: np.ndarray
    consistency: object = None  # ConsistencyReport, attached at the end of run
    certificate: object = None
    tie: bool = False
    saturated: bool = False
    # divergent-consistent bookkeeping (None unless the run qualifies)
    L0: int | None = None
    L1: int | None = None
    hard_at_L0: np.ndarray | None = None
    mu_L0_inf: float | None = None
    osc_period: int | None = None


def sgn(x):
    """Sign with sgn(0) := +1, elementwise."""
    return np.where(np.asarray(x) >= 0, 1.0, -1.0)


def wms_init(graph, gamma):
    """Initial v2c messages: every edge of variable i carries gamma_i."""
    return np.asarray(gamma, dtype=np.float64)[graph.edge_var]


def wms_c2v(graph, mu):
    """Check replies per directed edge: sign product times min magnitude
    over the check's other incoming messages."""
    vals = mu[graph.chk_edges]  # (m, dc)
    signs = sgn(vals)
    tot_sign = signs.prod(axis=1, keepdims=True)
    excl_sign = tot_sign * signs  # divide out own sign (+-1)
    mags = np.abs(vals)
    part = np.partition(mags, 1, axis=1)
    amin = np.argmin(mags, axis=1)
    cols = np.arange(vals.shape[1])
    excl_min = np.where(cols == amin[:, None], part[:, 1:2], part[:, 0:1])
    out = np.empty_like(mu)
    out[graph.chk_edges] = excl_sign * excl_min
    return out


def wms_v2c(graph, gamma, c2v, beta):
    gamma = np.asarray(gamma, dtype=np.float64)
    tot = c2v[graph.var_edges].sum(axis=1)
    return gamma[graph.edge_var] + beta * (tot[graph.edge_var] - c2v)


def wms_step(graph, gamma, mu, beta):
    """One synchronous WMS iteration W[mu]."""
    return wms_v2c(graph, gamma, wms_c2v(graph, mu), beta)


def beliefs(graph, gamma, mu, beta, c2v=None):
    """Per-bit beliefs gamma_i + beta * sum of all incoming check replies."""
    if c2v is None:
        c2v = wms_c2v(graph, mu)
    return np.asarray(gamma, dtype=np.float64) + beta * c2v[graph.var_edges].sum(axis=1)


def hard_decision(graph, gamma, mu, beta, c2v=None):
    """Hard word from the belief signs; returns (bits, tie_flag)."""
    bel = beliefs(graph, gamma, mu, beta, c2v=c2v)
    bits = (bel < 0).astype(np.uint8)  # sgn(0) = +1 maps belief 0 to bit 0
    return bits, bool(np.any(bel == 0))


def _signs_consistent(graph, gamma, mu, c2v, beta):
    """Fast boolean version of the three WMS sign conditions.

    Any exact zero (message or belief) counts as a tie and fails.
    """
    if np.any(mu == 0.0) or np.any(c2v == 0.0):
        return False
    sv = mu[graph.var_edges] > 0  # (n, dv)
    if not np.all(sv == sv[:, :1]):
        return False
    if not np.all((c2v > 0) == (mu > 0)):
        return False
    bel = beliefs(graph, gamma, mu, beta, c2v=c2v)
    if np.any(bel == 0.0):
        return False
    return bool(np.all((bel > 0) == sv[:, 0]))


def run(graph, gamma, config: DecoderConfig) -> DecodeResult:
    """Run WMS from the canonical initialization and classify the trajectory.

    Termination: fixed point (step inf-norm < fp_tol), divergent-consistent
    (min magnitude above the divergence threshold and sign-consistent for
    div_window consecutive iterations; the run then continues only to locate
    L1), or max_iters (sub-classified Oscillating when the message sign
    pattern revisited an earlier state with period >= 2).
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    fp_tol, div_threshold = config.resolve(gamma)
    gnorm = float(np.max(np.abs(gamma))) if len(gamma) else 0.0

    mu = wms_init(graph, gamma)
    saturated = False
    status = Status.MAX_ITERS
    iters = 0

    seen_signs = {}
    osc_period = None
    div_streak = 0
    streak_start = None  # first iter of the current consistent+magnitude run
    L0 = None
    L1 = None
    hard_at_L0 = None
    mu_L0_inf = None
    divergent = False

    for it in range(1, config.max_iters + 1):
        c2v = wms_c2v(graph, mu)
        new = wms_v2c(graph, gamma, c2v, config.beta)
        if np.any(np.abs(new) > CLAMP):
            np.clip(new, -CLAMP, CLAMP, out=new)
            saturated = True
        step = float(np.max(np.abs(new - mu))) if len(new) else 0.0
        mu = new
        iters = it

        key = np.packbits(mu > 0).tobytes()
        prev = seen_signs.get(key)
        if prev is not None and osc_period is None and it - prev >= 2:
            osc_period = it - prev
        seen_signs[key] = it

        if not divergent and step < fp_tol:
            status = Status.CONVERGED
            break

        c2v_new = wms_c2v(graph, mu)
        consistent = _signs_consistent(graph, gamma, mu, c2v_new, config.beta)
        min_abs = float(np.min(np.abs(mu))) if len(mu) else 0.0

        if not divergent:
            if consistent and min_abs >= 2.0 * gnorm and it > 2:
                if streak_start is None:
                    streak_start = it
                    hard_at_L0, _ = hard_decision(graph, gamma, mu, config.beta,
                                                  c2v=c2v_new)
                    mu_L0_inf = float(np.max(np.abs(mu)))
            else:
                streak_start = None
                hard_at_L0 = None
                mu_L0_inf = None
                L1 = None

        if (L1 is None and mu_L0_inf is not None
                and min_abs >= mu_L0_inf + 2.0 * gnorm):
            L1 = it

        if consistent and min_abs > div_threshold:
            div_streak += 1
        else:
            div_streak = 0

        if not divergent and div_streak >= config.div_window:
            divergent = True
            status = Status.DIVERGENT_CONSISTENT
            L0 = streak_start if streak_start is not None else it - config.div_window + 1

        if divergent and L1 is not None:
            break

    if status is Status.MAX_ITERS and osc_period is not None:
        status = Status.OSCILLATING

    final_c2v = wms_c2v(graph, mu)
    hard, tie = hard_decision(graph, gamma, mu, config.beta, c2v=final_c2v)

    from . import certify  # deferred: certify imports this module's helpers
    report = certify.check_wms_consistency(graph, gamma, mu, config.beta)

    return DecodeResult(
        hard=hard, status=status, iters_run=iters, final_messages=mu,
        consistency=report, tie=tie, saturated=saturated,
        L0=L0, L1=L1, hard_at_L0=hard_at_L0, mu_L0_inf=mu_L0_inf,
        osc_period=osc_period)


# ---------------------------------------------------------------------------
# Attenuated max-product (two values per edge)

@dataclass
class AmpMessages:
    v2c0: np.ndarray  # mu_{i->j}(0) per directed edge
    v2c1: np.ndarray  # mu_{i->j}(1)

    def diff(self):
        return self.v2c0 - self.v2c1

    def copy(self):
        return AmpMessages(self.v2c0.copy(), self.v2c1.copy())


def amp_init(graph, gamma):
    gamma = np.asarray(gamma, dtype=np.float64)
    return AmpMessages(v2c0=gamma[graph.edge_var],
                       v2c1=np.zeros(graph.num_edges))


def amp_c2v(graph, msgs: AmpMessages):
    """Check replies (C0, C1) per edge: the max total over the check's other
    incoming edges, constrained so the full local word has even parity.

    Computed in O(dc) per check: take each edge's larger value, record the
    parity of the argmax pattern, and pay the smallest flip cost
    |mu(0) - mu(1)| when the required parity disagrees.
    """
    m0 = msgs.v2c0[graph.chk_edges]  # (m, dc)
    m1 = msgs.v2c1[graph.chk_edges]
    base = np.maximum(m0, m1)
    bits = (m1 > m0)  # argmax bit per edge; ties resolve to 0
    flip = np.abs(m0 - m1)

    tot = base.sum(axis=1, keepdims=True)
    parity = bits.sum(axis=1, keepdims=True) & 1

    part = np.partition(flip, 1, axis=1)
    amin = np.argmin(flip, axis=1)
    cols = np.arange(flip.shape[1])
    excl_flip = np.where(cols == amin[:, None], part[:, 1:2], part[:, 0:1])

    sum_excl = tot - base  # sum over the other edges
    par_excl = parity ^ bits  # parity over the other edges

    # required parity of the others equals the target bit x
    c0 = sum_excl - np.where(par_excl == 0, 0.0, excl_flip)
    c1 = sum_excl - np.where(par_excl == 1, 0.0, excl_flip)

    C0 = np.empty(graph.num_edges)
    C1 = np.empty(graph.num_edges)
    C0[graph.chk_edges] = c0
    C1[graph.chk_edges] = c1
    return C0, C1


def amp_step(graph, gamma, msgs: AmpMessages, beta) -> AmpMessages:
    """One synchronous attenuated max-product iteration A[mu]."""
    gamma = np.asarray(gamma, dtype=np.float64)
    C0, C1 = amp_c2v(graph, msgs)
    t0 = C0[graph.var_edges].sum(axis=1)
    t1 = C1[graph.var_edges].sum(axis=1)
    ev = graph.edge_var
    v2c0 = gamma[ev] + beta * (t0[ev] - C0)
    v2c1 = beta * (t1[ev] - C1)
    return AmpMessages(v2c0=v2c0, v2c1=v2c1)


def run_amp(graph, gamma, beta, max_iters=200, fp_tol=None):
    """Iterate AMP to a fixed point; returns (messages, iters, converged)."""
    gamma = np.asarray(gamma, dtype=np.float64)
    if fp_tol is None:
        fp_tol = 1e-10 * max(1.0, float(np.max(np.abs(gamma))) if len(gamma) else 1.0)
    msgs = amp_init(graph, gamma)
    for it in range(1, max_iters + 1):
        new = amp_step(graph, gamma, msgs, beta)
        step = max(float(np.max(np.abs(new.v2c0 - msgs.v2c0))),
                   float(np.max(np.abs(new.v2c1 - msgs.v2c1))))
        msgs = new
        if step < fp_tol:
            return msgs, it, True
    return msgs, max_iters, False


# ---------------------------------------------------------------------------
# Tree-reweighted max-product

@dataclass
class TrmpState:
    v2c: np.ndarray
    c2v: np.ndarray


def trmp_uniform_rho(graph):
    """Uniform edge-appearance probability (n(1 + dc/dv) - 1)/|E|."""
    return (graph.n * (1.0 + graph.dc / graph.dv) - 1.0) / graph.num_edges


def trmp_init(graph, gamma):
    gamma = np.asarray(gamma, dtype=np.float64)
    return TrmpState(v2c=gamma[graph.edge_var], c2v=np.zeros(graph.num_edges))


def trmp_step(graph, gamma, state: TrmpState, rho) -> TrmpState:
    """One TRMP iteration: check replies from the current v2c, then v2c from
    the fresh replies, so rho=1 collapses to exactly one min-sum step."""
    gamma = np.asarray(gamma, dtype=np.float64)
    ms = wms_c2v(graph, state.v2c)
    c2v = rho * ms - (1.0 - rho) * state.v2c
    tot = c2v[graph.var_edges].sum(axis=1)
    ev = graph.edge_var
    v2c = gamma[ev] + rho * (tot[ev] - c2v) - (1.0 - rho) * c2v
    np.clip(v2c, -CLAMP, CLAMP, out=v2c)
    return TrmpState(v2c=v2c, c2v=c2v)


def trmp_hard_decision(graph, gamma, state: TrmpState, rho):
    bel = np.asarray(gamma, dtype=np.float64) + rho * state.c2v[graph.var_edges].sum(axis=1)
    return (bel < 0).astype(np.uint8), bool(np.any(bel == 0))


def run_trmp(graph, gamma, rho, max_iters, fp_tol=None):
    """Iterate TRMP for up to max_iters (early exit at a fixed point);
    returns (hard bits, tie flag, state, iters)."""
    gamma = np.asarray(gamma, dtype=np.float64)
    if fp_tol is None:
        fp_tol = 1e-10 * max(1.0, float(np.max(np.abs(gamma))) if len(gamma) else 1.0)
    state = trmp_init(graph, gamma)
    for it in range(1, max_iters + 1):
        new = trmp_step(graph, gamma, state, rho)
        step = float(np.max(np.abs(new.v2c - state.v2c)))
        state = new
        if step < fp_tol:
            break
    hard, tie = trmp_hard_decision(graph, gamma, state, rho)
    return hard, tie, state, it
