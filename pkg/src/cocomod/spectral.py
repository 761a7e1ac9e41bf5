"""Regularized spectral co-clustering driven by global co-modularity restarts.

Pipeline: build the degree-normalized co-Laplacian (optionally inflating the
degree diagonals by the median degree), take its top-k singular triplets,
embed each side in singular-vector columns 2..k, filter low-leverage nodes
out of k-means, and keep the restart whose joint assignment maximizes the
global co-modularity. Zero-degree nodes never enter the spectral step and
receive label 0.
"""

from __future__ import annotations

import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import aslinearoperator, svds

from .comod import CoClustering, CoCommunitySet, block_statistics, screen_cocommunities
from .network import BipartiteNetwork

# Operators at or below this many entries may be densified for the exact
# decomposition fallback (needed when k is too close to min(m, l) for an
# iterative solver).
_DENSE_BUDGET = 50_000_000


@dataclass
class SpectralDecomposition:
    """Top-k singular triplets, descending, with a fixed sign convention.

    Each left vector has nonnegative entry sum (first nonzero entry positive
    on an exact tie); right vectors follow from the decomposition identity.
    """

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    k: int
    residual_estimate: float


@dataclass
class DetectionReport:
    best: CoClustering
    best_Q_global: float
    restart_trace: np.ndarray
    seed: int
    parameters: dict

    def to_json(self) -> str:
        doc = {
            "best_Q_global": self.best_Q_global,
            "seed": self.seed,
            "parameters": self.parameters,
            "k_x": self.best.k_x,
            "k_y": self.best.k_y,
            "z_x": self.best.z_x.tolist(),
            "z_y": self.best.z_y.tolist(),
            "row_order": self.best.row_order.tolist(),
            "col_order": self.best.col_order.tolist(),
            "restart_trace": [float(v) for v in self.restart_trace],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    def trace_csv(self) -> str:
        out = io.StringIO()
        out.write("restart,Q_global,best_so_far\n")
        best = -np.inf
        for i, v in enumerate(self.restart_trace, start=1):
            best = max(best, v)
            out.write(f"{i},{v!r},{best!r}\n")
        return out.getvalue()


def co_laplacian(net: BipartiteNetwork, regularized: bool = True) -> sp.csr_matrix:
    """Degree-normalized adjacency D_x^{-1/2} A D_y^{-1/2} as a sparse matrix.

    With `regularized`, both degree diagonals are inflated by the median of
    the respective degree vector before normalization. The result supports
    matrix-vector products (`@`) and is never densified here.
    """
    dx = net.d_x.astype(float)
    dy = net.d_y.astype(float)
    if regularized:
        tx, ty = np.median(dx), np.median(dy)
        if (tx == 0 and (dx == 0).any()) or (ty == 0 and (dy == 0).any()):
            raise ValueError(
                "median degree is zero while zero-degree nodes are present; "
                "drop isolated nodes before building the co-Laplacian"
            )
        dx = dx + tx
        dy = dy + ty
    else:
        for name, ids, d in (("X", net.x_ids, dx), ("Y", net.y_ids, dy)):
            zero = np.flatnonzero(d == 0)
            if zero.size:
                raise ValueError(
                    f"unregularized co-Laplacian needs positive degrees; "
                    f"{name}-node {ids[zero[0]]!r} (index {zero[0] + 1}) is isolated"
                )
    sx = sp.diags(1.0 / np.sqrt(dx))
    sy = sp.diags(1.0 / np.sqrt(dy))
    return (sx @ net.adjacency @ sy).tocsr()


def _fix_signs(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    for col in range(u.shape[1]):
        s = u[:, col].sum()
        if s == 0.0:
            nz = np.flatnonzero(u[:, col])
            s = u[nz[0], col] if nz.size else 1.0
        if s < 0:
            u[:, col] = -u[:, col]
            v[:, col] = -v[:, col]
    return u, v


def truncated_svd(op, k: int, tol: float = 1e-10, seed: int = 0) -> SpectralDecomposition:
    """Top-k singular triplets of a linear operator.

    Uses implicitly-restarted Lanczos bidiagonalization (ARPACK) with a
    seeded start vector; falls back to an exact dense decomposition when k is
    too close to min(m, l) for the iterative solver. Trailing singular values
    below tol*sigma_1 relative noise floor are reported as exact zeros with
    orthonormal fillers retained.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m, l = op.shape
    if k < 1 or k > min(m, l):
        raise ValueError(f"k must lie in 1..min(m, l) = {min(m, l)}")

    if k >= min(m, l) - 1 or min(m, l) < 10:
        if m * l > _DENSE_BUDGET:
            raise ValueError(
                "k too close to min(m, l) for the iterative solver and the "
                "operator is too large to densify; reduce k"
            )
        if sp.issparse(op):
            dense = op.toarray()
        elif isinstance(op, np.ndarray):
            dense = np.asarray(op, dtype=float)
        else:
            dense = aslinearoperator(op) @ np.eye(l)
        u, s, vt = np.linalg.svd(dense, full_matrices=False)
        u, s, v = u[:, :k].copy(), s[:k].copy(), vt[:k].T.copy()
    else:
        v0 = np.random.default_rng([seed, 0x5BD]).standard_normal(min(m, l))
        try:
            u, s, vt = svds(aslinearoperator(op), k=k, tol=tol, v0=v0, maxiter=max(m, l) * 20)
        except Exception as exc:  # ArpackNoConvergence and friends
            raise ValueError(f"truncated SVD did not converge: {exc}") from exc
        order = np.argsort(s)[::-1]
        u, s, v = u[:, order], s[order], vt[order, :].T

    if s[0] > 0:
        s = np.where(s < 1e-13 * s[0], 0.0, s)
    u, v = _fix_signs(np.ascontiguousarray(u), np.ascontiguousarray(v))
    residual = float(s[-1] / s[0]) if s[0] > 0 else 0.0
    return SpectralDecomposition(
        singular_values=s, left_vectors=u, right_vectors=v, k=k, residual_estimate=residual
    )


def lloyd_kmeans(points: np.ndarray, k: int, rng: np.random.Generator, max_iter: int = 100):
    """Plain Lloyd iteration to an assignment fixed point (or max_iter).

    Initialization samples k distinct data points uniformly. A cluster that
    empties keeps its previous centroid. Returns (labels, centroids).
    """
    n = points.shape[0]
    if n < k:
        raise ValueError(f"k-means needs at least k={k} points, got {n}")
    centroids = points[rng.choice(n, size=k, replace=False)].copy()
    labels = None
    for _ in range(max_iter):
        d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            members = labels == c
            if members.any():
                centroids[c] = points[members].mean(axis=0)
    return labels, centroids


def _nearest(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


def _worker_count() -> int:
    cap = os.environ.get("COCOMOD_THREADS", "1")
    try:
        return max(1, int(cap))
    except ValueError:
        return 1


def spectral_coclustering(
    net: BipartiteNetwork,
    k_x: int,
    k_y: int,
    restarts: int = 250,
    seed: int = 0,
    alpha: float = 0.05,
    leverage_threshold: float = 0.3,
    regularized: bool = True,
    normalize_rows: bool = False,
    svd_tol: float = 1e-10,
    sided: str = "one",
) -> tuple[DetectionReport, CoCommunitySet]:
    """Detect co-communities: embed, cluster with restarts, screen, order.

    Each restart draws its own RNG stream from (seed, restart index), runs
    k-means independently on the X and Y embeddings, and scores the joint
    assignment by global co-modularity; the winner is the lexicographic max
    of (Q_global, -restart index), so concurrent and serial execution agree.
    """
    m, l = net.m, net.l
    if not (2 <= k_x <= m and 2 <= k_y <= l):
        raise ValueError("need 2 <= k_x <= m and 2 <= k_y <= l")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")

    active_x = np.flatnonzero(~net.isolated_x)
    active_y = np.flatnonzero(~net.isolated_y)
    if active_x.size < k_x or active_y.size < k_y:
        raise ValueError("fewer connected nodes than requested groups")
    sub = net.adjacency[active_x][:, active_y]
    dxs = net.d_x[active_x].astype(float)
    dys = net.d_y[active_y].astype(float)
    if regularized:
        dxs = dxs + np.median(dxs)
        dys = dys + np.median(dys)
    lap = (sp.diags(1.0 / np.sqrt(dxs)) @ sub @ sp.diags(1.0 / np.sqrt(dys))).tocsr()

    k = max(k_x, k_y)
    decomp = truncated_svd(lap, k=k, tol=svd_tol, seed=seed)
    if decomp.singular_values[k - 1] <= 0:
        raise ValueError(
            f"operator has fewer than {k} nonzero singular directions; choose smaller k"
        )
    emb_x = decomp.left_vectors[:, 1:k_x]
    emb_y = decomp.right_vectors[:, 1:k_y]

    # Leverage uses the full retained subspace (leading vector included) so a
    # cluster sitting exactly at the embedding origin is not filtered away.
    lev_x = np.linalg.norm(decomp.left_vectors[:, :k_x], axis=1)
    lev_y = np.linalg.norm(decomp.right_vectors[:, :k_y], axis=1)
    core_x = lev_x >= leverage_threshold * lev_x.mean()
    core_y = lev_y >= leverage_threshold * lev_y.mean()
    if not core_x.any() or not core_y.any():
        raise ValueError("leverage filtering removed every node; lower the threshold")
    if core_x.sum() < k_x or core_y.sum() < k_y:
        raise ValueError("too few high-leverage nodes for k-means; lower the threshold")
    if normalize_rows:
        emb_x = emb_x / np.maximum(np.linalg.norm(emb_x, axis=1), 1e-300)[:, None]
        emb_y = emb_y / np.maximum(np.linalg.norm(emb_y, axis=1), 1e-300)[:, None]

    points_x, points_y = emb_x[core_x], emb_y[core_y]

    def run_restart(index: int) -> tuple[float, np.ndarray, np.ndarray]:
        rng = np.random.default_rng([seed, index])
        labels_x, cent_x = lloyd_kmeans(points_x, k_x, rng)
        labels_y, cent_y = lloyd_kmeans(points_y, k_y, rng)
        zx = np.zeros(m, dtype=np.int64)
        zy = np.zeros(l, dtype=np.int64)
        zx[active_x[core_x]] = labels_x + 1
        zy[active_y[core_y]] = labels_y + 1
        if (~core_x).any():
            zx[active_x[~core_x]] = _nearest(emb_x[~core_x], cent_x) + 1
        if (~core_y).any():
            zy[active_y[~core_y]] = _nearest(emb_y[~core_y], cent_y) + 1
        clustering = CoClustering(z_x=zx, z_y=zy, k_x=k_x, k_y=k_y)
        _, _, _, Q = block_statistics(net, clustering)
        return float(np.abs(Q).sum()), zx, zy

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_restart, range(restarts)))
    else:
        results = [run_restart(i) for i in range(restarts)]

    trace = np.array([q for q, _, _ in results])
    winner = max(range(restarts), key=lambda i: (results[i][0], -i))
    best_q, zx, zy = results[winner]

    clustering = CoClustering(z_x=zx, z_y=zy, k_x=k_x, k_y=k_y)
    cocommunities = screen_cocommunities(net, clustering, alpha, sided=sided)
    _, _, _, Q = block_statistics(net, clustering)
    q_row = np.abs(Q).sum(axis=1)
    q_col = np.abs(Q).sum(axis=0)
    clustering.row_order = np.argsort(-q_row, kind="stable") + 1
    clustering.col_order = np.argsort(-q_col, kind="stable") + 1

    report = DetectionReport(
        best=clustering,
        best_Q_global=best_q,
        restart_trace=trace,
        seed=seed,
        parameters={
            "k_x": k_x,
            "k_y": k_y,
            "restarts": restarts,
            "alpha": alpha,
            "regularized": regularized,
            "leverage_threshold": leverage_threshold,
            "normalize_rows": normalize_rows,
            "sided": sided,
        },
    )
    return report, cocommunities
