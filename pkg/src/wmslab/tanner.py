"""Tanner graphs for LDPC codes: construction, alist I/O, GF(2) linear algebra.

A graph is stored with sorted adjacency lists and a stable directed-edge
indexing (edges grouped by variable node, neighbors ascending), so message
layouts are reproducible across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

ENUMERATION_CAP = 28


class GraphError(ValueError):
    """Structural problem with a parity-check matrix or graph parameters."""


class ConstructionError(RuntimeError):
    """Random graph construction could not meet the girth target."""

    def __init__(self, msg, best_girth=None):
        super().__init__(msg)
        self.best_girth = best_girth


class AlistError(ValueError):
    """Malformed alist text; carries the offending line number (1-based)."""

    def __init__(self, msg, line=None):
        super().__init__(msg if line is None else f"line {line}: {msg}")
        self.line = line


@dataclass(frozen=True)
class TannerGraph:
    """Bipartite code graph with directed-edge indexing.

    Edge e runs over variable-to-check edges sorted by (variable, check).
    For regular graphs `var_edges` / `chk_edges` give the edge ids incident
    to each node as dense (n, dv) / (m, dc) matrices.
    """

    n: int
    m: int
    var_adj: tuple  # per variable, sorted tuple of check indices
    chk_adj: tuple  # per check, sorted tuple of variable indices
    dv: int | None = None
    dc: int | None = None

    # derived, filled in __post_init__
    edge_var: np.ndarray = field(default=None, repr=False, compare=False)
    edge_chk: np.ndarray = field(default=None, repr=False, compare=False)
    edge_index: dict = field(default=None, repr=False, compare=False)
    var_edges: np.ndarray = field(default=None, repr=False, compare=False)
    chk_edges: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        seen = set()
        for i, nbrs in enumerate(self.var_adj):
            for j in nbrs:
                if (i, j) in seen:
                    raise GraphError(f"parallel edge ({i},{j})")
                seen.add((i, j))
        other = {(i, j) for j, nbrs in enumerate(self.chk_adj) for i in nbrs}
        if seen != other:
            raise GraphError("var_adj and chk_adj describe different edge sets")

        ev, ec, eidx = [], [], {}
        for i, nbrs in enumerate(self.var_adj):
            for j in nbrs:
                eidx[(i, j)] = len(ev)
                ev.append(i)
                ec.append(j)
        object.__setattr__(self, "edge_var", np.asarray(ev, dtype=np.intp))
        object.__setattr__(self, "edge_chk", np.asarray(ec, dtype=np.intp))
        object.__setattr__(self, "edge_index", eidx)

        if self.dv is not None:
            if any(len(a) != self.dv for a in self.var_adj):
                raise GraphError(f"graph is not variable-regular with dv={self.dv}")
            object.__setattr__(
                self, "var_edges",
                np.arange(self.num_edges, dtype=np.intp).reshape(self.n, self.dv))
        if self.dc is not None:
            if any(len(a) != self.dc for a in self.chk_adj):
                raise GraphError(f"graph is not check-regular with dc={self.dc}")
            ce = np.empty((self.m, self.dc), dtype=np.intp)
            for j, nbrs in enumerate(self.chk_adj):
                for s, i in enumerate(nbrs):
                    ce[j, s] = eidx[(i, j)]
            object.__setattr__(self, "chk_edges", ce)

    @property
    def num_edges(self):
        return len(self.edge_var) if self.edge_var is not None else sum(
            len(a) for a in self.var_adj)

    @property
    def regular(self):
        return self.dv is not None and self.dc is not None

    def parity_matrix(self):
        """Dense m x n parity-check matrix (uint8)."""
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        for i, nbrs in enumerate(self.var_adj):
            for j in nbrs:
                H[j, i] = 1
        return H

    def syndrome(self, bits):
        bits = np.asarray(bits, dtype=np.uint8)
        return (self.parity_matrix() @ bits) % 2

    def is_codeword(self, bits):
        bits = np.asarray(bits, dtype=np.uint8)
        for j, nbrs in enumerate(self.chk_adj):
            if int(bits[list(nbrs)].sum()) % 2:
                return False
        return True


def _graph_from_adj(var_adj, chk_adj):
    """Build a TannerGraph, detecting regular degrees."""
    var_adj = tuple(tuple(sorted(a)) for a in var_adj)
    chk_adj = tuple(tuple(sorted(a)) for a in chk_adj)
    dvs = {len(a) for a in var_adj}
    dcs = {len(a) for a in chk_adj}
    dv = dvs.pop() if len(dvs) == 1 else None
    dc = dcs.pop() if len(dcs) == 1 else None
    return TannerGraph(n=len(var_adj), m=len(chk_adj),
                       var_adj=var_adj, chk_adj=chk_adj, dv=dv, dc=dc)


def from_dense_matrix(H) -> TannerGraph:
    """Graph with an edge (i, j) wherever H[j][i] = 1."""
    H = np.asarray(H, dtype=np.uint8)
    if H.ndim != 2 or H.size == 0:
        raise GraphError("H must be a nonempty 2-d binary matrix")
    m, n = H.shape
    for j in range(m):
        if not H[j].any():
            raise GraphError(f"empty row {j}")
    for i in range(n):
        if not H[:, i].any():
            raise GraphError(f"empty column {i}")
    var_adj = [np.flatnonzero(H[:, i]).tolist() for i in range(n)]
    chk_adj = [np.flatnonzero(H[j]).tolist() for j in range(m)]
    return _graph_from_adj(var_adj, chk_adj)


def girth(graph: TannerGraph):
    """Exact length of the shortest cycle, or math.inf for forests.

    Runs a truncated BFS from every variable node; the current best cycle
    length bounds the search depth.
    """
    best = math.inf
    adj = _node_adj(graph)
    for s in range(graph.n):  # every cycle passes through a variable node
        limit = best / 2
        dist = {s: 0}
        parent = {s: -1}
        frontier = [s]
        d = 0
        while frontier and d < limit:
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w == parent[u]:
                        continue
                    if w in dist:
                        cand = dist[u] + dist[w] + 1
                        if cand < best:
                            best = cand
                            limit = best / 2
                    else:
                        dist[w] = dist[u] + 1
                        parent[w] = u
                        nxt.append(w)
            frontier = nxt
            d += 1
    return best


def _node_adj(graph):
    """Adjacency over the union node set: vars 0..n-1, checks n..n+m-1."""
    n = graph.n
    adj = [[] for _ in range(n + graph.m)]
    for i, nbrs in enumerate(graph.var_adj):
        for j in nbrs:
            adj[i].append(n + j)
            adj[n + j].append(i)
    return adj


def _short_cycle_edge(graph, bound):
    """Some variable-check edge lying on a cycle shorter than `bound`.

    Returns (i, j) or None. Found by BFS from each variable node, with path
    reconstruction at the first closing edge below the bound.
    """
    adj = _node_adj(graph)
    n = graph.n
    for s in range(n):
        dist = {s: 0}
        parent = {s: -1}
        frontier = [s]
        while frontier:
            if dist[frontier[0]] >= bound / 2:
                break
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w == parent[u]:
                        continue
                    if w in dist:
                        if dist[u] + dist[w] + 1 < bound:
                            # walk up from the deeper endpoint: any tree edge
                            # on either branch lies on this cycle
                            x = u if dist[u] >= dist[w] else w
                            p = parent[x]
                            if p == -1:
                                continue
                            a, b = (x, p - n) if x < n else (p, x - n)
                            return (a, b)
                    else:
                        dist[w] = dist[u] + 1
                        parent[w] = u
                        nxt.append(w)
            frontier = nxt
    return None


def build_regular_graph(n, dv, dc, girth_min=4, seed=0,
                        max_attempts=50, max_swaps=None) -> TannerGraph:
    """Random (dv, dc)-regular bipartite graph with girth >= girth_min.

    Configuration-model pairing with rejection of parallel edges, then edge
    swaps to break cycles shorter than the target. Deterministic given seed.
    """
    if n < 1 or dv < 1 or dc < 1:
        raise GraphError("n, dv, dc must be positive")
    if (n * dv) % dc != 0:
        raise GraphError(f"n*dv = {n * dv} not divisible by dc = {dc}")
    if girth_min < 4 or girth_min % 2:
        raise GraphError("girth_min must be even and >= 4")
    m = n * dv // dc
    if dv > m or dc > n:
        raise GraphError("degrees exceed the opposite side's node count")
    rng = np.random.default_rng(seed)
    if max_swaps is None:
        max_swaps = 200 + 20 * n * dv

    best_girth = 0
    for _ in range(max_attempts):
        edges = _pair_sockets(n, m, dv, dc, rng)
        if edges is None:
            continue
        g = _swap_to_girth(edges, n, m, girth_min, rng, max_swaps)
        if g is not None:
            return g
    # report the best girth from a final diagnostic attempt
    edges = _pair_sockets(n, m, dv, dc, rng)
    if edges is not None:
        best_girth = girth(_edges_to_graph(edges, n, m))
    raise ConstructionError(
        f"girth >= {girth_min} not reached within budget "
        f"(best observed girth {best_girth})", best_girth=best_girth)


def _pair_sockets(n, m, dv, dc, rng, tries=20):
    """Configuration-model pairing; parallel edges are repaired by random
    socket swaps rather than rejecting the whole sample."""
    num_edges = n * dv
    for _ in range(tries):
        var_l = np.repeat(np.arange(n), dv).tolist()
        chk_s = np.repeat(np.arange(m), dc)
        rng.shuffle(chk_s)
        chk_l = chk_s.tolist()
        count = {}
        for pr in zip(var_l, chk_l):
            count[pr] = count.get(pr, 0) + 1
        dups = [k for k in range(num_edges) if count[(var_l[k], chk_l[k])] > 1]
        budget = 200 * num_edges
        while dups and budget > 0:
            idx = dups.pop()
            pr = (var_l[idx], chk_l[idx])
            if count.get(pr, 0) <= 1:
                continue
            while budget > 0:
                budget -= 1
                r = int(rng.integers(num_edges))
                if var_l[r] == var_l[idx] or chk_l[r] == chk_l[idx]:
                    continue
                new1 = (var_l[idx], chk_l[r])
                new2 = (var_l[r], chk_l[idx])
                if count.get(new1, 0) or count.get(new2, 0):
                    continue
                pr2 = (var_l[r], chk_l[r])
                count[pr] -= 1
                count[pr2] -= 1
                count[new1] = 1
                count[new2] = 1
                chk_l[idx], chk_l[r] = chk_l[r], chk_l[idx]
                if count.get(pr2, 0) > 1:
                    dups.append(r)
                break
            else:
                break
        if not dups and all(v <= 1 for v in count.values()):
            return set(zip(var_l, chk_l))
    return None


def _edges_to_graph(edges, n, m):
    var_adj = [[] for _ in range(n)]
    chk_adj = [[] for _ in range(m)]
    for i, j in edges:
        var_adj[i].append(j)
        chk_adj[j].append(i)
    return _graph_from_adj(var_adj, chk_adj)


def _bip_dist(var_adj, chk_adj, src_var, dst_chk, excl, cap):
    """Shortest path length from a variable to a check, skipping edges in
    `excl`; capped search, returns `cap` when no shorter path exists."""
    seen = {src_var}  # vars as i, checks as n+j with n = len(var_adj)
    n = len(var_adj)
    frontier = [src_var]
    for depth in range(1, cap):
        nxt = []
        for u in frontier:
            if u < n:
                for j in var_adj[u]:
                    if (u, j) in excl:
                        continue
                    if n + j == n + dst_chk:
                        return depth
                    if n + j not in seen:
                        seen.add(n + j)
                        nxt.append(n + j)
            else:
                for i in chk_adj[u - n]:
                    if (i, u - n) in excl:
                        continue
                    if i not in seen:
                        seen.add(i)
                        nxt.append(i)
        frontier = nxt
        if not frontier:
            break
    return cap


def _swap_to_girth(edges, n, m, girth_min, rng, max_swaps):
    """Break short cycles by edge swaps, accepting only swaps whose new
    edges provably create no cycle below the girth target."""
    edge_list = sorted(edges)
    edge_set = set(edge_list)
    var_adj = [set() for _ in range(n)]
    chk_adj = [set() for _ in range(m)]
    for i, j in edge_set:
        var_adj[i].add(j)
        chk_adj[j].add(i)
    cap = girth_min  # distances at or beyond girth_min - 1 are safe
    for _ in range(max_swaps):
        g = _edges_to_graph(edge_set, n, m)
        bad = _short_cycle_edge(g, girth_min)
        if bad is None:
            return g
        i1, j1 = bad
        swapped = False
        for _ in range(400):
            i2, j2 = edge_list[rng.integers(len(edge_list))]
            if i1 == i2 or j1 == j2:
                continue
            if (i1, j2) in edge_set or (i2, j1) in edge_set:
                continue
            excl = {(i1, j1), (i2, j2)}
            # each new edge alone must not close a short cycle, and the two
            # together must not form one through both old endpoints
            if _bip_dist(var_adj, chk_adj, i1, j2, excl, cap) < girth_min - 1:
                continue
            if _bip_dist(var_adj, chk_adj, i2, j1, excl, cap) < girth_min - 1:
                continue
            if (_bip_dist(var_adj, chk_adj, i1, j1, excl, cap)
                    + _bip_dist(var_adj, chk_adj, i2, j2, excl, cap)
                    + 2 < girth_min):
                continue
            for old, new in (((i1, j1), (i1, j2)), ((i2, j2), (i2, j1))):
                edge_set.remove(old)
                edge_set.add(new)
                edge_list[edge_list.index(old)] = new
                var_adj[old[0]].discard(old[1])
                chk_adj[old[1]].discard(old[0])
                var_adj[new[0]].add(new[1])
                chk_adj[new[1]].add(new[0])
            swapped = True
            break
        if not swapped:
            return None
    return None


# ---------------------------------------------------------------------------
# alist interchange format (MacKay convention)

def write_alist(graph: TannerGraph) -> str:
    lines = [f"{graph.n} {graph.m}"]
    col_deg = [len(a) for a in graph.var_adj]
    row_deg = [len(a) for a in graph.chk_adj]
    lines.append(f"{max(col_deg)} {max(row_deg)}")
    lines.append(" ".join(str(d) for d in col_deg))
    lines.append(" ".join(str(d) for d in row_deg))
    mc, mr = max(col_deg), max(row_deg)
    for a in graph.var_adj:
        ent = [j + 1 for j in a] + [0] * (mc - len(a))
        lines.append(" ".join(str(x) for x in ent))
    for a in graph.chk_adj:
        ent = [i + 1 for i in a] + [0] * (mr - len(a))
        lines.append(" ".join(str(x) for x in ent))
    return "\n".join(lines) + "\n"


def parse_alist(text: str) -> TannerGraph:
    raw = text.splitlines()
    rows = [(k + 1, line.split()) for k, line in enumerate(raw) if line.strip()]
    pos = 0

    def take(expect_len=None):
        nonlocal pos
        if pos >= len(rows):
            raise AlistError("unexpected end of input",
                             line=rows[-1][0] + 1 if rows else 1)
        lineno, toks = rows[pos]
        pos += 1
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise AlistError("non-integer token", line=lineno) from None
        if expect_len is not None and len(vals) != expect_len:
            raise AlistError(
                f"expected {expect_len} entries, got {len(vals)}", line=lineno)
        return lineno, vals

    _, hdr = take(2)
    n, m = hdr
    if n < 1 or m < 1:
        raise AlistError("n and m must be positive", line=rows[0][0])
    _, (max_col, max_row) = take(2)
    _, col_deg = take(n)
    _, row_deg = take(m)
    if max(col_deg) != max_col or max(row_deg) != max_row:
        raise AlistError("declared max degree mismatches degree lists",
                         line=rows[1][0])

    var_adj = []
    for i in range(n):
        lineno, ent = take()
        nbrs = [x - 1 for x in ent if x != 0]
        if len(nbrs) != col_deg[i]:
            raise AlistError(
                f"column {i}: {len(nbrs)} neighbors, declared {col_deg[i]}",
                line=lineno)
        if any(j < 0 or j >= m for j in nbrs):
            raise AlistError(f"column {i}: check index out of range", line=lineno)
        var_adj.append(sorted(nbrs))
    chk_adj = []
    for j in range(m):
        lineno, ent = take()
        nbrs = [x - 1 for x in ent if x != 0]
        if len(nbrs) != row_deg[j]:
            raise AlistError(
                f"row {j}: {len(nbrs)} neighbors, declared {row_deg[j]}",
                line=lineno)
        if any(i < 0 or i >= n for i in nbrs):
            raise AlistError(f"row {j}: variable index out of range", line=lineno)
        chk_adj.append(sorted(nbrs))

    ve = {(i, j) for i, a in enumerate(var_adj) for j in a}
    ce = {(i, j) for j, a in enumerate(chk_adj) for i in a}
    if ve != ce:
        raise AlistError("column and row adjacency disagree", line=rows[0][0])
    return _graph_from_adj(var_adj, chk_adj)


# ---------------------------------------------------------------------------
# GF(2) linear algebra

def gf2_row_reduce(H):
    """Row echelon form over GF(2); returns (reduced matrix, pivot columns)."""
    A = (np.asarray(H) & 1).astype(np.uint8).copy()
    if A.ndim != 2:
        raise GraphError("matrix must be 2-d")
    mm, nn = A.shape
    pivots = []
    r = 0
    for c in range(nn):
        if r >= mm:
            break
        hit = np.flatnonzero(A[r:, c])
        if hit.size == 0:
            continue
        p = r + int(hit[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        others = np.flatnonzero(A[:, c])
        others = others[others != r]
        if others.size:
            A[others] ^= A[r]
        pivots.append(c)
        r += 1
    return A, pivots


def gf2_rank(H) -> int:
    return len(gf2_row_reduce(H)[1])


def gf2_nullspace(H):
    """Basis of the GF(2) null space of H, one uint8 vector per free column."""
    A, pivots = gf2_row_reduce(H)
    n = A.shape[1]
    pivset = set(pivots)
    free = [c for c in range(n) if c not in pivset]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.uint8)
        v[f] = 1
        for r, c in enumerate(pivots):
            v[c] = A[r, f]
        basis.append(v)
    return basis


def enumerate_codewords(graph: TannerGraph, cap=ENUMERATION_CAP):
    """All codewords as a (2**k, n) uint8 array, k = n - rank(H).

    Rows are emitted in Gray-code order off the null-space basis; row 0 is
    the all-zeros codeword.
    """
    H = graph.parity_matrix()
    basis = gf2_nullspace(H)
    k = len(basis)
    if k > cap:
        raise GraphError(
            f"code dimension {k} exceeds enumeration cap {cap}")
    out = np.zeros((1 << k, graph.n), dtype=np.uint8)
    cur = np.zeros(graph.n, dtype=np.uint8)
    for idx in range(1, 1 << k):
        bit = (idx & -idx).bit_length() - 1  # Gray-code flip position
        cur ^= basis[bit]
        out[idx] = cur
    return out
