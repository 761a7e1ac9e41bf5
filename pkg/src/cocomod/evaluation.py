"""Recovery scoring against planted truth and covariate enrichment tests."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.stats import hypergeom

from .comod import CoClustering, CoCommunitySet, bh_fdr, block_statistics
from .network import BipartiteNetwork


def nmi(labels_a, labels_b) -> float:
    """Normalized mutual information I(A;B)/sqrt(H(A)H(B)), natural logs.

    Defined as 1 when both partitions are the same single cluster and 0 when
    exactly one side has zero entropy.
    """
    a = np.asarray(labels_a, dtype=np.int64)
    b = np.asarray(labels_b, dtype=np.int64)
    if a.size == 0 or b.size == 0:
        raise ValueError("empty label vectors")
    if a.shape != b.shape:
        raise ValueError("label vectors must have equal length")
    table = np.zeros((a.max() + 1, b.max() + 1))
    np.add.at(table, (a, b), 1.0)
    return _nmi_from_table(table)


def _nmi_from_table(table: np.ndarray) -> float:
    n = table.sum()
    pij = table / n
    pi = pij.sum(axis=1)
    pj = pij.sum(axis=0)
    ha = -float((pi[pi > 0] * np.log(pi[pi > 0])).sum())
    hb = -float((pj[pj > 0] * np.log(pj[pj > 0])).sum())
    if ha == 0.0 and hb == 0.0:
        # identical single clusters iff the one occupied cell coincides
        return 1.0
    if ha == 0.0 or hb == 0.0:
        return 0.0
    mask = pij > 0
    mi = float((pij[mask] * np.log(pij[mask] / np.outer(pi, pj)[mask])).sum())
    return mi / np.sqrt(ha * hb)


def membership_labels(z: np.ndarray, axis: int, q_local: np.ndarray, pairs) -> np.ndarray:
    """Label each node by the co-community containing its group.

    `pairs` is an ordered list of 1-based (p, q); label = 1-based position of
    the pair in the list. A group in no pair gets 0; a group in several is
    labeled by the pair with the largest local co-modularity (earlier pair on
    ties). q_local is the k_x x k_y matrix of local co-modularities.
    """
    k = q_local.shape[axis]
    group_label = np.zeros(k + 1, dtype=np.int64)
    best = np.full(k + 1, -np.inf)
    for t, (p, q) in enumerate(pairs, start=1):
        g = (p, q)[axis]
        score = q_local[p - 1, q - 1]
        if score > best[g]:
            best[g] = score
            group_label[g] = t
    return group_label[z]


def nmi_cells(
    z_x_a, z_y_a, pairs_a, z_x_b, z_y_b, pairs_b
) -> float:
    """Pair-counting NMI over adjacency cells.

    Each (i, j) cell is labeled by whether the pair of nodes appears together
    in some co-community; the score is the NMI of the two binary cell
    labelings. Computed from group contingency tables, never per cell.
    """
    z_x_a = np.asarray(z_x_a); z_y_a = np.asarray(z_y_a)
    z_x_b = np.asarray(z_x_b); z_y_b = np.asarray(z_y_b)
    nxa = max(int(z_x_a.max()), max((p for p, _ in pairs_a), default=0)) + 1
    nya = max(int(z_y_a.max()), max((q for _, q in pairs_a), default=0)) + 1
    nxb = max(int(z_x_b.max()), max((p for p, _ in pairs_b), default=0)) + 1
    nyb = max(int(z_y_b.max()), max((q for _, q in pairs_b), default=0)) + 1
    cx = np.zeros((nxa, nxb))
    np.add.at(cx, (z_x_a, z_x_b), 1.0)
    cy = np.zeros((nya, nyb))
    np.add.at(cy, (z_y_a, z_y_b), 1.0)
    in_a = np.zeros((nxa, nya), dtype=bool)
    for p, q in pairs_a:
        in_a[p, q] = True
    in_b = np.zeros((nxb, nyb), dtype=bool)
    for p, q in pairs_b:
        in_b[p, q] = True
    n = z_x_a.size * z_y_a.size
    n11 = np.einsum("pq,rs,pr,qs->", in_a, in_b, cx, cy)
    na = np.einsum("pq,pr,qs->", in_a, cx, cy)
    nb = np.einsum("rs,pr,qs->", in_b, cx, cy)
    table = np.array([[n11, na - n11], [nb - n11, n - na - nb + n11]])
    return _nmi_from_table(table)


@dataclass
class RecoveryReport:
    nmi_x: float
    nmi_y: float
    nmi_mean: float
    nmi_cells: float
    T_detected: int
    T_planted: int
    confusion_x: list
    confusion_y: list

    def to_json(self) -> str:
        return json.dumps(
            {
                "nmi_x": self.nmi_x,
                "nmi_y": self.nmi_y,
                "nmi_mean": self.nmi_mean,
                "nmi_cells": self.nmi_cells,
                "T_detected": self.T_detected,
                "T_planted": self.T_planted,
                "confusion_x": self.confusion_x,
                "confusion_y": self.confusion_y,
            },
            indent=2,
            sort_keys=True,
        )


def evaluate_recovery(
    net: BipartiteNetwork,
    truth_z_x,
    truth_z_y,
    planted_pairs,
    detected: CoClustering,
    cocommunities: CoCommunitySet,
) -> RecoveryReport:
    """Score detected co-communities against the planted structure.

    Nodes are labeled by co-community membership (0 when their group is in no
    significant pair) on each side; nmi_x/nmi_y compare those labelings with
    the planted ones, and nmi_mean is their average. nmi_cells is the
    pair-counting variant over adjacency cells.
    """
    truth_z_x = np.asarray(truth_z_x, dtype=np.int64)
    truth_z_y = np.asarray(truth_z_y, dtype=np.int64)
    if truth_z_x.size != net.m or truth_z_y.size != net.l:
        raise ValueError("truth labels do not match network dimensions")
    planted_pairs = [(int(p), int(q)) for p, q in planted_pairs]
    k_x_true = int(truth_z_x.max())
    k_y_true = int(truth_z_y.max())

    truth_clustering = CoClustering(
        z_x=truth_z_x, z_y=truth_z_y, k_x=k_x_true, k_y=k_y_true
    )
    _, _, _, q_truth = block_statistics(net, truth_clustering)
    _, _, _, q_det = block_statistics(net, detected)

    sig_pairs = cocommunities.significant_pairs()
    det_x = membership_labels(detected.z_x, 0, q_det, sig_pairs)
    det_y = membership_labels(detected.z_y, 1, q_det, sig_pairs)
    true_x = membership_labels(truth_z_x, 0, q_truth, planted_pairs)
    true_y = membership_labels(truth_z_y, 1, q_truth, planted_pairs)

    nmi_x = nmi(true_x, det_x)
    nmi_y = nmi(true_y, det_y)
    cells = nmi_cells(
        truth_z_x, truth_z_y, planted_pairs, detected.z_x, detected.z_y, sig_pairs
    )

    conf_x = np.zeros((k_x_true + 1, detected.k_x + 1), dtype=np.int64)
    np.add.at(conf_x, (truth_z_x, detected.z_x), 1)
    conf_y = np.zeros((k_y_true + 1, detected.k_y + 1), dtype=np.int64)
    np.add.at(conf_y, (truth_z_y, detected.z_y), 1)

    return RecoveryReport(
        nmi_x=float(nmi_x),
        nmi_y=float(nmi_y),
        nmi_mean=float(0.5 * (nmi_x + nmi_y)),
        nmi_cells=float(cells),
        T_detected=cocommunities.T,
        T_planted=len(planted_pairs),
        confusion_x=conf_x.tolist(),
        confusion_y=conf_y.tolist(),
    )


@dataclass
class EnrichmentReport:
    records: list
    alpha: float
    universe_size: int
    notes: list

    def to_json(self) -> str:
        return json.dumps(
            {
                "alpha": self.alpha,
                "universe_size": self.universe_size,
                "notes": self.notes,
                "tests": self.records,
            },
            indent=2,
            sort_keys=True,
        )


def load_covariates(source) -> dict[str, str]:
    """Parse a `node_id <TAB> covariate_group` TSV into a mapping."""
    from .network import _as_lines

    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(_as_lines(source), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        parts = raw.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise ValueError(f"malformed covariate line {lineno}: {raw!r}")
        mapping[parts[0].strip()] = parts[1].strip()
    return mapping


def fisher_enrichment(
    net: BipartiteNetwork,
    clustering: CoClustering,
    cocommunities: CoCommunitySet,
    covariates: dict[str, str],
    alpha: float = 0.05,
) -> EnrichmentReport:
    """One-sided hypergeometric overlap tests, BH-FDR corrected.

    The universe is the set of covariate-covered node ids present in the
    network (both sides pooled); each significant co-community contributes
    its member ids on both sides. Empty covariate groups are skipped with a
    note.
    """
    covered: dict[str, str] = {}
    for ids in (net.x_ids, net.y_ids):
        for nid in ids:
            if nid in covariates:
                covered[nid] = covariates[nid]
    universe = sorted(covered)
    n_universe = len(universe)
    groups: dict[str, set[str]] = {}
    for nid, grp in covered.items():
        groups.setdefault(grp, set()).add(nid)

    notes = []
    for grp in sorted(set(covariates.values()) - set(groups)):
        notes.append(f"covariate group {grp!r} has no covered nodes; skipped")

    records = []
    pvals = []
    for p, q in cocommunities.significant_pairs():
        members = {net.x_ids[i] for i in np.flatnonzero(clustering.z_x == p)}
        members |= {net.y_ids[j] for j in np.flatnonzero(clustering.z_y == q)}
        members &= set(universe)
        for grp in sorted(groups):
            overlap = len(members & groups[grp])
            expected = len(members) * len(groups[grp]) / n_universe if n_universe else 0.0
            pv = float(
                hypergeom.sf(overlap - 1, n_universe, len(groups[grp]), len(members))
            )
            records.append(
                {
                    "p": p,
                    "q": q,
                    "covariate_group": grp,
                    "community_size": len(members),
                    "group_size": len(groups[grp]),
                    "overlap": overlap,
                    "expected": expected,
                    "direction": "over" if overlap > expected else "under_or_equal",
                    "p_value": pv,
                }
            )
            pvals.append(pv)

    if pvals:
        adjusted, _ = bh_fdr(np.array(pvals), alpha)
        for rec, padj in zip(records, adjusted):
            rec["p_fdr"] = float(padj)
            rec["significant"] = bool(padj < alpha)
    return EnrichmentReport(
        records=records, alpha=alpha, universe_size=n_universe, notes=notes
    )
