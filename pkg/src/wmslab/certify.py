"""Optimality certification for message-passing fixed points.

Implements the sign-consistency conditions, the dual witness built from a
fixed point, the per-check local-minimizer test, the ML certificate, and the
delta-reduction procedure that rescues certificates from divergent-but-
consistent trajectories at the critical weight beta = 1/(dv-1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import msgpass, opt


class CertifyError(RuntimeError):
    """Precondition violated (wrong status, not a fixed point, ...)."""


@dataclass
class ConsistencyReport:
    wms_consistent: bool
    violations: list = field(default_factory=list)  # (condition, index)
    amp_consistent: bool | None = None
    amp_violations: list = field(default_factory=list)

    def to_dict(self):
        return {"wms_consistent": self.wms_consistent,
                "violations": [list(v) for v in self.violations],
                "amp_consistent": self.amp_consistent,
                "amp_violations": [list(v) for v in self.amp_violations]}


@dataclass
class DualWitness:
    tau: np.ndarray  # per directed edge
    objective: float
    feasibility_residual: float


@dataclass
class Certificate:
    kind: str  # "MLCertified" | "NotCertified"
    reason: str = ""
    f_candidate: float | None = None
    g_witness: float | None = None
    gap: float | None = None
    delta: float | None = None
    witness: DualWitness | None = None

    @property
    def certified(self):
        return self.kind == "MLCertified"

    def to_json(self, graph=None):
        d = {"kind": self.kind, "reason": self.reason,
             "f_candidate": self.f_candidate, "g_witness": self.g_witness,
             "gap": self.gap, "delta": self.delta}
        if self.witness is not None:
            d["dual_objective"] = self.witness.objective
            d["feasibility_residual"] = self.witness.feasibility_residual
            if graph is not None:
                d["tau"] = {f"{i},{j}": self.witness.tau[e]
                            for (i, j), e in graph.edge_index.items()}
            else:
                d["tau"] = list(map(float, self.witness.tau))
        return json.dumps(d, indent=2)


def check_wms_consistency(graph, gamma, mu, beta) -> ConsistencyReport:
    """Evaluate the three sign conditions; exact zeros are tie violations.

    Condition 1: all outgoing messages of a bit share one sign.
    Condition 2: each check reply agrees in sign with the bit's messages.
    Condition 3: the bit's belief agrees in sign with its messages.
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    c2v = msgpass.wms_c2v(graph, mu)
    violations = []
    for e in np.flatnonzero(mu == 0.0):
        violations.append(("tie", int(e)))
    for e in np.flatnonzero(c2v == 0.0):
        violations.append(("tie", int(e)))
    sv = mu[graph.var_edges] > 0  # (n, dv)
    bad1 = np.flatnonzero(np.any(sv != sv[:, :1], axis=1))
    violations.extend((1, int(i)) for i in bad1)
    bad2 = np.flatnonzero((c2v > 0) != (mu > 0))
    violations.extend((2, int(e)) for e in bad2)
    bel = msgpass.beliefs(graph, gamma, mu, beta, c2v=c2v)
    for i in np.flatnonzero(bel == 0.0):
        violations.append(("tie", int(i)))
    bad3 = np.flatnonzero((bel > 0) != sv[:, 0])
    violations.extend((3, int(i)) for i in bad3)
    return ConsistencyReport(wms_consistent=not violations,
                             violations=violations)


def check_amp_consistency(graph, msgs: msgpass.AmpMessages):
    """Per-edge argmax bits must agree within every variable node and the
    resulting word must satisfy all checks.

    Returns (ok, word or None, violations)."""
    diff = msgs.diff()
    violations = []
    for e in np.flatnonzero(diff == 0.0):
        violations.append(("tie", int(e)))
    xe = (diff < 0).astype(np.uint8)  # argmax bit per edge
    per_var = xe[graph.var_edges]
    bad = np.flatnonzero(np.any(per_var != per_var[:, :1], axis=1))
    violations.extend(("edge-disagreement", int(i)) for i in bad)
    word = per_var[:, 0].copy()
    if not violations and not graph.is_codeword(word):
        violations.append(("not-a-codeword", -1))
    ok = not violations
    return ok, (word if ok else None), violations


def build_dual_witness(graph, gamma, mu_star, beta, fp_tol=None) -> DualWitness:
    """Per-edge multipliers tau from a WMS fixed point.

    tau_{i,j} = (mu_{i->j} - beta (dv-1) mu_{i<-j}) / dv; at a true fixed
    point they split gamma_i exactly across the bit's edges.
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    if not graph.regular:
        raise CertifyError("dual witness requires a regular graph")
    if fp_tol is None:
        fp_tol = 1e-10 * max(1.0, float(np.max(np.abs(gamma))))
    resid = float(np.max(np.abs(msgpass.wms_step(graph, gamma, mu_star, beta)
                                - mu_star)))
    if resid >= fp_tol:
        raise CertifyError(f"not a fixed point: step residual {resid:.3e}")
    c2v = msgpass.wms_c2v(graph, mu_star)
    tau = (mu_star - beta * (graph.dv - 1) * c2v) / graph.dv
    feas = float(np.max(np.abs(tau[graph.var_edges].sum(axis=1) - gamma)))
    obj = opt.dual_objective(graph, tau)
    return DualWitness(tau=tau, objective=obj, feasibility_residual=feas)


def check_local_minimizer(tau_j, mu_j):
    """Brute-force check that the hard-decision local word minimizes the
    tau inner product over even-weight words. Returns (ok, unique)."""
    tau_j = np.asarray(tau_j, dtype=np.float64)
    mu_j = np.asarray(mu_j, dtype=np.float64)
    words = opt.even_weight_words(len(tau_j))
    vals = words @ tau_j
    best = float(vals.min())
    hd = (mu_j < 0).astype(np.uint8)
    hd_val = float(hd @ tau_j)
    ok = hd_val <= best + 1e-9 * (1.0 + abs(best))
    unique = int(np.sum(vals <= best + 1e-12)) == 1
    return ok, unique


def default_tol_cert(gamma):
    return 1e-7 * (1.0 + float(np.abs(gamma).sum()))


def certify_ml(graph, gamma, result: msgpass.DecodeResult, beta,
               fp_tol=None, tol_cert=None) -> Certificate:
    """ML certificate for a converged run: sign-consistency, codeword
    membership, local-minimizer checks, and a small duality gap."""
    gamma = np.asarray(gamma, dtype=np.float64)
    if result.status is not msgpass.Status.CONVERGED:
        raise CertifyError(f"certify_ml requires Converged, got {result.status}")
    if tol_cert is None:
        tol_cert = default_tol_cert(gamma)

    if result.tie:
        return Certificate(kind="NotCertified", reason="tie")
    report = result.consistency or check_wms_consistency(
        graph, gamma, result.final_messages, beta)
    if not report.wms_consistent:
        return Certificate(kind="NotCertified", reason="not-consistent")
    hard = result.hard
    if not graph.is_codeword(hard):
        return Certificate(kind="NotCertified", reason="not-a-codeword")
    try:
        witness = build_dual_witness(graph, gamma, result.final_messages,
                                     beta, fp_tol=fp_tol)
    except CertifyError as exc:
        return Certificate(kind="NotCertified", reason=str(exc))
    mu = result.final_messages
    for j, nbrs in enumerate(graph.chk_adj):
        eidx = [graph.edge_index[(i, j)] for i in nbrs]
        ok, _ = check_local_minimizer(witness.tau[eidx], mu[eidx])
        if not ok:
            return Certificate(kind="NotCertified",
                               reason=f"local-minimizer failed at check {j}",
                               witness=witness)
    f = float(gamma @ hard)
    gap = f - witness.objective
    if gap > tol_cert:
        return Certificate(kind="NotCertified", reason="duality gap",
                           f_candidate=f, g_witness=witness.objective,
                           gap=gap, witness=witness)
    return Certificate(kind="MLCertified", f_candidate=f,
                       g_witness=witness.objective, gap=gap, witness=witness)


def delta_reduction_certify(graph, gamma, config: msgpass.DecoderConfig,
                            result: msgpass.DecodeResult | None = None,
                            rerun_max_iters=None):
    """Certificate rescue at the critical weight beta = 1/(dv-1).

    A divergent-but-consistent run fixes hard decisions at iteration L0;
    the growth milestone L1 sets delta = 1 - 1/(L1(L1+1)), and the decoder
    is rerun at the reduced weight delta/(dv-1), which contracts. The rerun
    must converge to a consistent fixed point with the same hard decisions,
    after which the ordinary ML certificate applies.

    Returns (certificate, delta, rerun result or None).
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    if not graph.regular:
        raise CertifyError("requires a regular graph")
    crit = 1.0 / (graph.dv - 1)
    if abs(config.beta - crit) > 1e-12:
        raise CertifyError(f"beta must equal 1/(dv-1) = {crit}")
    if result is None:
        result = msgpass.run(graph, gamma, config)
    if result.status is not msgpass.Status.DIVERGENT_CONSISTENT:
        raise CertifyError(
            f"requires a DivergentConsistent run, got {result.status}")
    if result.L0 is None or result.hard_at_L0 is None:
        return Certificate(kind="NotCertified", reason="no-L0"), None, None
    if result.L1 is None:
        return Certificate(kind="NotCertified", reason="no-L1"), None, None

    L1 = result.L1
    delta = 1.0 - 1.0 / (L1 * (L1 + 1))
    beta_d = delta / (graph.dv - 1)
    if rerun_max_iters is None:
        # contraction rate delta: roughly L1(L1+1) ln(1/fp_tol) iterations
        rerun_max_iters = min(500_000, int(30 * L1 * (L1 + 1) * 25) + 200)
    # the reduced-weight run is a contraction; its fixed point can sit above
    # any magnitude threshold, so divergence detection is disabled
    rerun_cfg = msgpass.DecoderConfig(
        beta=beta_d, max_iters=rerun_max_iters, fp_tol=config.fp_tol,
        div_threshold=float("inf"), div_window=config.div_window)
    rerun = msgpass.run(graph, gamma, rerun_cfg)
    if rerun.status is not msgpass.Status.CONVERGED:
        return (Certificate(kind="NotCertified",
                            reason="delta-reduction-failed: rerun did not converge"),
                delta, rerun)
    if not np.array_equal(rerun.hard, result.hard_at_L0):
        return (Certificate(kind="NotCertified",
                            reason="delta-reduction-failed: hard decisions differ"),
                delta, rerun)
    cert = certify_ml(graph, gamma, rerun, beta_d, fp_tol=rerun_cfg.fp_tol)
    cert.delta = delta
    return cert, delta, rerun


def amp_reward_identity_check(graph, gamma, msgs: msgpass.AmpMessages, beta):
    """Residual of the fixed-point reward identity: the sum of per-edge
    optimal values equals dv * sum_i (1-x_i) gamma_i / (1 - beta(dv-1)(dc-1)).
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    if not graph.regular:
        raise CertifyError("requires a regular graph")
    ok, word, _ = check_amp_consistency(graph, msgs)
    if not ok:
        raise CertifyError("requires an AMP-consistent fixed point")
    diff = msgs.diff()
    chosen = np.where(diff < 0, msgs.v2c1, msgs.v2c0)
    lhs = float(chosen.sum())
    denom = 1.0 - beta * (graph.dv - 1) * (graph.dc - 1)
    rhs = graph.dv * float(((1.0 - word) * gamma).sum()) / denom
    return abs(lhs - rhs)
