"""Exact decoding oracles: ML by codeword enumeration, the local-codeword
LP relaxation with a self-contained simplex solver, and the dual objective.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import tanner

LP_DC_CAP = 16
DUAL_DC_CAP = 20
PIVOT_TOL = 1e-9


class OptError(RuntimeError):
    pass


@lru_cache(maxsize=64)
def even_weight_words(d):
    """All even-weight binary words of length d as a (2^(d-1), d) uint8
    array, ordered by (weight, lexicographic position of the support)."""
    if d > DUAL_DC_CAP:
        raise OptError(f"local enumeration capped at degree {DUAL_DC_CAP}, got {d}")
    rows = []
    for w in range(0, d + 1, 2):
        for supp in combinations(range(d), w):
            v = np.zeros(d, dtype=np.uint8)
            v[list(supp)] = 1
            rows.append(v)
    return np.array(rows, dtype=np.uint8)


def exact_ml(graph, gamma, codebook=None):
    """Minimize <gamma, x> over all codewords by enumeration.

    Returns (word, objective, minimizers) where minimizers holds every row
    index of the codebook attaining the minimum (ties surfaced, not hidden).
    Pass a cached codebook from tanner.enumerate_codewords to amortize
    repeated calls on the same graph.
    """
    if codebook is None:
        codebook = tanner.enumerate_codewords(graph)
    gamma = np.asarray(gamma, dtype=np.float64)
    obj = codebook.astype(np.float64) @ gamma
    best = float(obj.min())
    idx = np.flatnonzero(obj <= best + 1e-12)
    return codebook[idx[0]].copy(), best, idx


def dual_objective(graph, tau):
    """Sum over checks of the minimum tau-sum over even-weight local words."""
    total = 0.0
    tau = np.asarray(tau, dtype=np.float64)
    for j, nbrs in enumerate(graph.chk_adj):
        tj = np.array([tau[graph.edge_index[(i, j)]] for i in nbrs])
        words = even_weight_words(len(nbrs))
        total += float((words @ tj).min())
    return total


# ---------------------------------------------------------------------------
# LP relaxation over local-codeword indicators

@dataclass
class LpProblem:
    """Standard-form LP min c.z, A z = b, z >= 0.

    Columns: x_0..x_{n-1}, then per check (ascending) one zeta per even
    subset of its neighborhood in even_weight_words order. Rows: one
    normalization per check, then one coupling row per directed edge.
    """

    graph: object
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    col_names: list
    row_names: list


@dataclass
class LpSolution:
    x: np.ndarray
    objective: float
    integral: bool
    z: np.ndarray
    basis: np.ndarray
    iterations: int


def build_lp(graph, gamma) -> LpProblem:
    gamma = np.asarray(gamma, dtype=np.float64)
    if any(len(a) > LP_DC_CAP for a in graph.chk_adj):
        raise OptError(f"check degree exceeds LP cap {LP_DC_CAP}")
    n = graph.n
    col_names = [f"x{i}" for i in range(n)]
    blocks = []  # (check j, words, col offset)
    off = n
    for j, nbrs in enumerate(graph.chk_adj):
        words = even_weight_words(len(nbrs))
        blocks.append((j, nbrs, words, off))
        for r, w in enumerate(words):
            supp = tuple(int(t) for t in np.flatnonzero(w))
            col_names.append(f"z{j}_{supp}")
        off += len(words)
    ncols = off
    nrows = graph.m + graph.num_edges
    A = np.zeros((nrows, ncols))
    b = np.zeros(nrows)
    row_names = []
    for j, nbrs, words, o in blocks:
        A[j, o:o + len(words)] = 1.0
        b[j] = 1.0
        row_names.append(f"norm{j}")
    r = graph.m
    edge_rows = {}
    for j, nbrs, words, o in blocks:
        for s, i in enumerate(nbrs):
            A[r, o:o + len(words)] = words[:, s]
            A[r, i] = -1.0
            edge_rows[(i, j)] = r
            row_names.append(f"edge{i}_{j}")
            r += 1
    c = np.zeros(ncols)
    c[:n] = gamma
    return LpProblem(graph=graph, c=c, A=A, b=b,
                     col_names=col_names, row_names=row_names)


def _simplex(A, b, c, basis, tol=PIVOT_TOL, max_iters=None):
    """Dense revised-tableau simplex with Bland's rule from a feasible basis.

    Returns (z, basis, iterations). A is modified in place along with b.
    """
    m, n = A.shape
    if max_iters is None:
        max_iters = 50 * (m + n) * max(m, 10)
    for it in range(max_iters):
        # reduced costs from the current tableau (A restricted to basis = I)
        cb = c[basis]
        red = c - cb @ A
        red[basis] = 0.0
        enter = -1
        for jcol in range(n):  # Bland: smallest index with negative cost
            if red[jcol] < -tol:
                enter = jcol
                break
        if enter < 0:
            z = np.zeros(n)
            z[basis] = b
            return z, basis, it
        col = A[:, enter]
        pos = col > tol
        if not pos.any():
            raise OptError("LP is unbounded")
        ratios = np.full(m, np.inf)
        ratios[pos] = b[pos] / col[pos]
        rmin = ratios.min()
        cand = np.flatnonzero(ratios <= rmin + tol)
        leave = cand[np.argmin(basis[cand])]  # Bland on the leaving variable
        piv = A[leave, enter]
        A[leave] /= piv
        b[leave] /= piv
        for r in range(m):
            if r != leave and abs(A[r, enter]) > 1e-14:
                f = A[r, enter]
                A[r] -= f * A[leave]
                b[r] -= f * b[leave]
        b[b < 0] = np.where(b[b < 0] > -1e-9, 0.0, b[b < 0])
        basis[leave] = enter
    raise OptError(f"simplex stalled after {max_iters} iterations")


def solve_lp(problem: LpProblem) -> LpSolution:
    """Two-phase primal simplex; artificial variables carry a big-M cost in
    phase 2 so they stay at zero without an explicit pivot-out pass."""
    A0, b0, c0 = problem.A, problem.b, problem.c
    m, n = A0.shape
    # orient rows so b >= 0, then append artificials
    A = A0.copy()
    b = b0.copy()
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0
    Afull = np.hstack([A, np.eye(m)])
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis = np.arange(n, n + m)
    z1, basis, it1 = _simplex(Afull.copy(), b.copy(), c1, basis.copy())
    if z1[n:].sum() > 1e-7:
        raise OptError("LP infeasible (phase 1 positive)")
    # rebuild the tableau for the phase-1 basis and reoptimize with real costs
    B = Afull[:, basis]
    Binv = np.linalg.inv(B)
    T = Binv @ Afull
    bt = Binv @ b
    bt[np.abs(bt) < 1e-12] = 0.0
    big_m = 1e7 * (1.0 + float(np.abs(c0).max(initial=0.0)))
    c2 = np.concatenate([c0, np.full(m, big_m)])
    z, basis, it2 = _simplex(T, bt, c2, basis)
    if (z[n:] > 1e-7).any():
        raise OptError("artificial variable positive at optimum")
    zfull = z[:n]
    x = zfull[:problem.graph.n]
    obj = float(c0 @ zfull)
    integral = bool(np.all(np.minimum(np.abs(x), np.abs(1 - x)) <= 1e-7))
    return LpSolution(x=x.copy(), objective=obj, integral=integral,
                      z=zfull, basis=basis.copy(), iterations=it1 + it2)


def verify_lp_optimality(problem: LpProblem, sol: LpSolution, tol=1e-6):
    """Independent optimality check: feasibility residuals plus nonnegative
    reduced costs computed from scratch via the basis inverse."""
    A, b, c = problem.A, problem.b, problem.c
    res = float(np.max(np.abs(A @ sol.z - b)))
    if res > 1e-7:
        return False, f"feasibility residual {res:.3e}"
    if (sol.z < -1e-8).any():
        return False, "negative variable"
    m, n = A.shape
    # rows were sign-flipped inside solve_lp wherever b < 0; mirror that here
    flip = np.where(b < 0, -1.0, 1.0)
    Aor = A * flip[:, None]
    Afull = np.hstack([Aor, np.eye(m)])
    big_m = 1e7 * (1.0 + float(np.abs(c).max(initial=0.0)))
    cfull = np.concatenate([c, np.full(m, big_m)])
    B = Afull[:, sol.basis]
    try:
        y = np.linalg.solve(B.T, cfull[sol.basis])
    except np.linalg.LinAlgError:
        return False, "singular basis"
    red = c - Aor.T @ y
    worst = float(red.min())
    if worst < -tol:
        return False, f"negative reduced cost {worst:.3e}"
    return True, "ok"


def lp_dump(problem: LpProblem) -> str:
    """Plain-text dump of the LP for debugging (not a stable format)."""
    lines = ["min " + " + ".join(
        f"{problem.c[k]:g}*{problem.col_names[k]}"
        for k in np.flatnonzero(problem.c != 0))]
    for r in range(problem.A.shape[0]):
        terms = " + ".join(
            f"{problem.A[r, k]:g}*{problem.col_names[k]}"
            for k in np.flatnonzero(problem.A[r] != 0))
        lines.append(f"{problem.row_names[r]}: {terms} = {problem.b[r]:g}")
    return "\n".join(lines) + "\n"
