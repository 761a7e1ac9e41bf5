"""Co-modularity scores and the significance screen for co-communities.

The residual matrix B = A - d_x d_y^T / d_pp is never materialized; every
score is computed from per-block edge counts and degree sums, so the whole
k_x*k_y grid costs O(nnz + m log l).

Group labels are 1-based with 0 meaning "unassigned" (isolated or filtered
nodes); label-0 nodes belong to no block.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .network import BipartiteNetwork


@dataclass
class CoClustering:
    """A partition of X-nodes into k_x groups and Y-nodes into k_y groups.

    z_x[i] in {0..k_x}, z_y[j] in {0..k_y}; 0 = unassigned. row_order and
    col_order are display permutations of the group indices 1..k.
    """

    z_x: np.ndarray
    z_y: np.ndarray
    k_x: int
    k_y: int
    row_order: np.ndarray | None = None
    col_order: np.ndarray | None = None

    def __post_init__(self):
        self.z_x = np.asarray(self.z_x, dtype=np.int64)
        self.z_y = np.asarray(self.z_y, dtype=np.int64)
        if self.z_x.min(initial=0) < 0 or self.z_x.max(initial=0) > self.k_x:
            raise ValueError("z_x labels must lie in 0..k_x")
        if self.z_y.min(initial=0) < 0 or self.z_y.max(initial=0) > self.k_y:
            raise ValueError("z_y labels must lie in 0..k_y")
        if self.row_order is None:
            self.row_order = np.arange(1, self.k_x + 1)
        if self.col_order is None:
            self.col_order = np.arange(1, self.k_y + 1)

    def group_x(self, p: int) -> np.ndarray:
        return np.flatnonzero(self.z_x == p)

    def group_y(self, q: int) -> np.ndarray:
        return np.flatnonzero(self.z_y == q)


@dataclass
class CoCommunitySet:
    """All k_x*k_y candidate pairings with scores; T counts the significant ones."""

    pairs: list[dict]
    alpha: float
    T: int = field(init=False)

    def __post_init__(self):
        self.T = sum(1 for rec in self.pairs if rec["significant"])

    def significant_pairs(self) -> list[tuple[int, int]]:
        return [(rec["p"], rec["q"]) for rec in self.pairs if rec["significant"]]

    def to_json(self) -> str:
        out = {
            "alpha": self.alpha,
            "T": self.T,
            "pairs": [
                {
                    "p": rec["p"],
                    "q": rec["q"],
                    "Q_local": rec["Q_local"],
                    "z": rec["z"],
                    "p_value": rec["p_value"],
                    "p_fdr": rec["p_fdr"],
                    "significant": rec["significant"],
                    **({"degenerate": True} if rec.get("degenerate") else {}),
                }
                for rec in self.pairs
            ],
        }
        return json.dumps(out, indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "CoCommunitySet":
        doc = json.loads(text)
        pairs = [dict(rec) for rec in doc["pairs"]]
        return CoCommunitySet(pairs=pairs, alpha=doc["alpha"])


def residual_matrix_entry(net: BipartiteNetwork, i: int, j: int) -> float:
    """B_ij = A_ij - d_x[i] d_y[j] / d_pp."""
    if net.d_pp == 0:
        raise ValueError("empty network")
    return float(net.adjacency[i, j]) - net.d_x[i] * net.d_y[j] / net.d_pp


def block_statistics(net: BipartiteNetwork, clustering: CoClustering):
    """Per-block edge counts, degree sums, and local co-modularities.

    Returns (edges, Dx, Dy, Q) where edges and Q are k_x x k_y, Dx/Dy are the
    per-group degree sums. Label-0 nodes are excluded. Summation order within
    blocks is fixed ascending (i, j), so results are scheduling-independent.
    """
    if net.d_pp == 0:
        raise ValueError("empty network")
    kx, ky = clustering.k_x, clustering.k_y
    zx, zy = clustering.z_x, clustering.z_y
    rows, cols = net.edge_arrays()
    zr, zc = zx[rows], zy[cols]
    ok = (zr > 0) & (zc > 0)
    flat = (zr[ok] - 1) * ky + (zc[ok] - 1)
    edges = np.bincount(flat, minlength=kx * ky).reshape(kx, ky).astype(float)
    Dx = np.zeros(kx)
    np.add.at(Dx, zx[zx > 0] - 1, net.d_x[zx > 0])
    Dy = np.zeros(ky)
    np.add.at(Dy, zy[zy > 0] - 1, net.d_y[zy > 0])
    Q = (edges - np.outer(Dx, Dy) / net.d_pp) / net.d_pp
    return edges, Dx, Dy, Q


def local_comodularity(net: BipartiteNetwork, gx, gy) -> float:
    """(1/d_pp) * sum of B_ij over the block gx x gy (0-based member indices)."""
    if net.d_pp == 0:
        raise ValueError("empty network")
    gx = np.asarray(list(gx), dtype=np.int64)
    gy = np.asarray(list(gy), dtype=np.int64)
    if gx.size == 0 or gy.size == 0:
        warnings.warn("local co-modularity of an empty block is 0", stacklevel=2)
        return 0.0
    sub = net.adjacency[gx][:, gy]
    inside = sub.sum()
    return float((inside - net.d_x[gx].sum() * net.d_y[gy].sum() / net.d_pp) / net.d_pp)


def comodularity(net: BipartiteNetwork, clustering: CoClustering, C) -> float:
    """Co-modularity Q_XY: sum of local co-modularities over the pairs in C.

    C is an iterable of 1-based (p, q) group pairs; duplicates are ignored.
    """
    C = list(dict.fromkeys((int(p), int(q)) for p, q in C))
    if not C:
        return 0.0
    _, _, _, Q = block_statistics(net, clustering)
    return float(sum(Q[p - 1, q - 1] for p, q in C))


def row_column_comodularity(net: BipartiteNetwork, clustering: CoClustering):
    """Q_row[p] = sum_q |Q_local(p,q)|; Q_col[q] = sum_p |Q_local(p,q)|."""
    _, _, _, Q = block_statistics(net, clustering)
    return np.abs(Q).sum(axis=1), np.abs(Q).sum(axis=0)


def global_comodularity(net: BipartiteNetwork, clustering: CoClustering) -> float:
    """Grand absolute block-residual sum; the restart selection objective."""
    _, _, _, Q = block_statistics(net, clustering)
    return float(np.abs(Q).sum())


def bh_fdr(p_values, alpha: float):
    """Benjamini-Hochberg step-up.

    Returns (adjusted p-values, reject mask). Adjusted p is the step-up
    cumulative minimum of n*p_(i)/i capped at 1; the mask rejects 1..i* for
    the largest i* with p_(i*) <= i*·alpha/n.
    """
    p = np.asarray(p_values, dtype=float)
    n = p.size
    if n == 0:
        return np.array([]), np.array([], dtype=bool)
    order = np.argsort(p, kind="stable")
    ranked = p[order] * n / np.arange(1, n + 1)
    adjusted_sorted = np.minimum(np.minimum.accumulate(ranked[::-1])[::-1], 1.0)
    adjusted = np.empty(n)
    adjusted[order] = adjusted_sorted
    passing = np.flatnonzero(p[order] <= np.arange(1, n + 1) * alpha / n)
    reject = np.zeros(n, dtype=bool)
    if passing.size:
        reject[order[: passing[-1] + 1]] = True
    return adjusted, reject


def _clamped_variance_sums(dx_sorted, dy_sorted, d_pp):
    """sum over a block of mu(1-mu), mu = d_i d_j/d_pp clamped to [0, 1].

    Cells with d_i d_j >= d_pp have mu = 1 and contribute 0; the rest are
    separable, so sorted-degree prefix sums plus a searchsorted cut suffice.
    """
    c1 = np.concatenate(([0.0], np.cumsum(dy_sorted)))
    c2 = np.concatenate(([0.0], np.cumsum(dy_sorted.astype(float) ** 2)))
    dx_pos = dx_sorted[dx_sorted > 0]
    if dx_pos.size == 0 or dy_sorted.size == 0:
        return 0.0
    cuts = np.searchsorted(dy_sorted, d_pp / dx_pos, side="right")
    s1 = float((dx_pos * c1[cuts]).sum()) / d_pp
    s2 = float((dx_pos.astype(float) ** 2 * c2[cuts]).sum()) / d_pp**2
    return s1 - s2


def screen_cocommunities(
    net: BipartiteNetwork,
    clustering: CoClustering,
    alpha: float,
    sided: str = "one",
) -> CoCommunitySet:
    """Score and test every (p, q) pairing; BH-FDR across the full grid.

    The null variance of a block's score is (1/d_pp^2) * sum mu_ij (1-mu_ij)
    with mu_ij = d_x[i] d_y[j]/d_pp clamped to [0, 1]. One-sided upper-tail
    p-values by default (only positive scores can be significant); set
    sided="two" for the two-sided variant.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if sided not in ("one", "two"):
        raise ValueError("sided must be 'one' or 'two'")
    edges, Dx, Dy, Q = block_statistics(net, clustering)
    kx, ky = clustering.k_x, clustering.k_y
    dx_groups = [np.sort(net.d_x[clustering.z_x == p + 1]) for p in range(kx)]
    dy_groups = [np.sort(net.d_y[clustering.z_y == q + 1]) for q in range(ky)]
    var = np.zeros((kx, ky))
    for p in range(kx):
        for q in range(ky):
            var[p, q] = _clamped_variance_sums(dx_groups[p], dy_groups[q], net.d_pp)
    var /= net.d_pp**2

    z = np.zeros((kx, ky))
    pvals = np.ones((kx, ky))
    ok = var > 0
    z[ok] = Q[ok] / np.sqrt(var[ok])
    if sided == "one":
        pvals[ok] = norm.sf(z[ok])
    else:
        pvals[ok] = 2 * norm.sf(np.abs(z[ok]))
    nx = np.array([g.size for g in dx_groups])
    ny = np.array([g.size for g in dy_groups])
    nonempty = (nx[:, None] > 0) & (ny[None, :] > 0)
    degenerate = ~ok & nonempty
    pvals[degenerate] = np.where(Q[degenerate] > 0, 0.0, 1.0)

    adjusted, _ = bh_fdr(pvals.ravel(), alpha)
    adjusted = adjusted.reshape(kx, ky)
    significant = (adjusted < alpha) & (Q > 0)
    pairs = []
    for p in range(kx):
        for q in range(ky):
            pairs.append(
                {
                    "p": p + 1,
                    "q": q + 1,
                    "Q_local": float(Q[p, q]),
                    "z": float(z[p, q]),
                    "p_value": float(pvals[p, q]),
                    "p_fdr": float(adjusted[p, q]),
                    "significant": bool(significant[p, q]),
                    "degenerate": bool(degenerate[p, q]),
                }
            )
    return CoCommunitySet(pairs=pairs, alpha=alpha)
