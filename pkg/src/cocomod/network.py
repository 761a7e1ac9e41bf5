"""Bipartite network container and edge-list I/O.

A network connects m X-nodes to l Y-nodes through an unweighted 0/1
adjacency structure. Group labels, spectral embeddings and block scores all
operate on the indices defined here; node ids are external strings kept only
for I/O and reporting. Node indices are 0-based in the Python API and 1-based
in emitted reports.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

_SIGN_TOKENS = {"+": 1, "+1": 1, "-": -1, "-1": -1}


@dataclass(frozen=True)
class BipartiteNetwork:
    """Immutable bipartite 0/1 network.

    Attributes
    ----------
    adjacency : scipy.sparse.csr_matrix
        m x l matrix with entries in {0, 1}; duplicates are collapsed.
    x_ids, y_ids : list of str
        External labels, index-aligned with the adjacency axes.
    d_x, d_y : ndarray
        Degree vectors (row and column sums).
    d_pp : int
        Total edge count; equals sum(d_x) == sum(d_y).
    edge_signs : dict[(int, int), int]
        Optional per-edge sign metadata (+1/-1). Ignored by every
        algorithm; carried for visualization only.
    isolated_x, isolated_y : ndarray
        Boolean flags for zero-degree nodes (typically sidecar-declared).
    """

    adjacency: sp.csr_matrix
    x_ids: tuple[str, ...]
    y_ids: tuple[str, ...]
    d_x: np.ndarray
    d_y: np.ndarray
    d_pp: int
    edge_signs: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.adjacency.shape[0]

    @property
    def l(self) -> int:
        return self.adjacency.shape[1]

    @property
    def isolated_x(self) -> np.ndarray:
        return self.d_x == 0

    @property
    def isolated_y(self) -> np.ndarray:
        return self.d_y == 0

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoints as parallel (rows, cols) index arrays, (i,j)-sorted."""
        coo = self.adjacency.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return coo.row[order], coo.col[order]

    def validate(self) -> None:
        """Check the degree/edge-count consistency invariants."""
        a = self.adjacency
        if a.nnz and (a.data != 1).any():
            raise ValueError("adjacency entries must be 0/1")
        dx = np.asarray(a.sum(axis=1)).ravel().astype(np.int64)
        dy = np.asarray(a.sum(axis=0)).ravel().astype(np.int64)
        if not np.array_equal(dx, self.d_x) or not np.array_equal(dy, self.d_y):
            raise ValueError("stored degree vectors disagree with adjacency")
        if dx.sum() != self.d_pp or dy.sum() != self.d_pp:
            raise ValueError("degree sums disagree with total edge count")


def from_edges(
    edges,
    x_ids=None,
    y_ids=None,
    m: int | None = None,
    l: int | None = None,
    edge_signs: dict | None = None,
) -> BipartiteNetwork:
    """Build a network from an iterable of (i, j) index pairs.

    Duplicate pairs collapse to a single edge. `m`/`l` may exceed the largest
    index to retain isolated nodes.
    """
    edges = list(edges)
    if m is None:
        m = 1 + max((i for i, _ in edges), default=-1)
    if l is None:
        l = 1 + max((j for _, j in edges), default=-1)
    rows = np.fromiter((i for i, _ in edges), dtype=np.int64, count=len(edges))
    cols = np.fromiter((j for _, j in edges), dtype=np.int64, count=len(edges))
    data = np.ones(len(edges))
    a = sp.coo_matrix((data, (rows, cols)), shape=(m, l)).tocsr()
    a.data[:] = 1.0  # collapse duplicates to a 0/1 matrix
    dx = np.asarray(a.sum(axis=1)).ravel().astype(np.int64)
    dy = np.asarray(a.sum(axis=0)).ravel().astype(np.int64)
    if x_ids is None:
        x_ids = tuple(f"x{i + 1}" for i in range(m))
    if y_ids is None:
        y_ids = tuple(f"y{j + 1}" for j in range(l))
    net = BipartiteNetwork(
        adjacency=a,
        x_ids=tuple(x_ids),
        y_ids=tuple(y_ids),
        d_x=dx,
        d_y=dy,
        d_pp=int(dx.sum()),
        edge_signs=dict(edge_signs or {}),
    )
    net.validate()
    return net


def _as_lines(source):
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8").splitlines()
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        return source.read().splitlines()
    return list(source)


def load_edge_list(source, x_nodes=None, y_nodes=None) -> BipartiteNetwork:
    """Parse a TSV edge list into a BipartiteNetwork.

    Each non-comment line is ``x_id <TAB> y_id [<TAB> sign]`` with sign one of
    +, -, +1, -1. Lines starting with ``#`` are comments. Nodes are indexed in
    first-appearance order; ids pre-registered through the optional
    `x_nodes`/`y_nodes` sidecars (iterables of ids) come first and may remain
    isolated.

    Raises
    ------
    ValueError
        On a malformed line (message carries the 1-based line number) or when
        the input contains no edges.
    """
    x_index: dict[str, int] = {}
    y_index: dict[str, int] = {}
    for nid in _as_lines(x_nodes) if x_nodes is not None else ():
        nid = nid.strip()
        if nid and not nid.startswith("#"):
            x_index.setdefault(nid, len(x_index))
    for nid in _as_lines(y_nodes) if y_nodes is not None else ():
        nid = nid.strip()
        if nid and not nid.startswith("#"):
            y_index.setdefault(nid, len(y_index))

    edges: list[tuple[int, int]] = []
    signs: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(_as_lines(source), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) not in (2, 3) or not parts[0].strip() or not parts[1].strip():
            raise ValueError(f"malformed edge-list line {lineno}: {raw!r}")
        xid, yid = parts[0].strip(), parts[1].strip()
        i = x_index.setdefault(xid, len(x_index))
        j = y_index.setdefault(yid, len(y_index))
        if len(parts) == 3:
            token = parts[2].strip()
            if token not in _SIGN_TOKENS:
                raise ValueError(f"bad sign token on line {lineno}: {token!r}")
            signs.setdefault((i, j), _SIGN_TOKENS[token])
        edges.append((i, j))
    if not edges:
        raise ValueError("no edges")
    return from_edges(
        edges,
        x_ids=list(x_index),
        y_ids=list(y_index),
        m=len(x_index),
        l=len(y_index),
        edge_signs=signs,
    )


def write_edge_list(net: BipartiteNetwork, target) -> None:
    """Write the network as a TSV edge list, edges sorted by (i, j)."""
    rows, cols = net.edge_arrays()
    lines = []
    for i, j in zip(rows.tolist(), cols.tolist()):
        sign = net.edge_signs.get((i, j))
        if sign is None:
            lines.append(f"{net.x_ids[i]}\t{net.y_ids[j]}")
        else:
            lines.append(f"{net.x_ids[i]}\t{net.y_ids[j]}\t{'+1' if sign > 0 else '-1'}")
    text = "\n".join(lines) + "\n"
    if isinstance(target, (str, Path)):
        Path(target).write_text(text, encoding="utf-8")
    else:
        target.write(text)


def write_node_lists(net: BipartiteNetwork, x_target, y_target) -> None:
    """Write one-id-per-line sidecars preserving the index order."""
    for ids, target in ((net.x_ids, x_target), (net.y_ids, y_target)):
        text = "\n".join(ids) + "\n"
        if isinstance(target, (str, Path)):
            Path(target).write_text(text, encoding="utf-8")
        else:
            target.write(text)


def degrees(net: BipartiteNetwork) -> tuple[np.ndarray, np.ndarray, int]:
    """Return (d_x, d_y, d_pp)."""
    return net.d_x, net.d_y, net.d_pp


def density(net: BipartiteNetwork) -> float:
    """Plug-in edge density d_pp / (m*l)."""
    if net.m == 0 or net.l == 0:
        raise ValueError("density undefined for an empty node set")
    return net.d_pp / (net.m * net.l)
