"""Heatmap ordering and SVG rendering of detected co-communities.

Groups are ordered by decreasing row/column co-modularity so the strongest
co-communities congregate toward the top-left; nodes inside a group are
ordered by decreasing degree and unassigned (label 0) nodes come last.
Output is deterministic: no timestamps, attributes in fixed order.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET

import numpy as np

from .comod import CoClustering, CoCommunitySet, block_statistics
from .network import BipartiteNetwork

_COLOR_POS = "#2ca02c"
_COLOR_NEG = "#d62728"
_COLOR_PLAIN = "#1f77b4"


def _side_permutation(z: np.ndarray, order: np.ndarray, degree: np.ndarray) -> np.ndarray:
    blocks = []
    for g in list(order) + [0]:
        members = np.flatnonzero(z == g)
        if members.size:
            members = members[np.lexsort((members, -degree[members]))]
        blocks.append(members)
    return np.concatenate(blocks)


def order_for_visualization(
    net: BipartiteNetwork, clustering: CoClustering, cocommunities: CoCommunitySet | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Node-level (row permutation, column permutation), 0-based indices."""
    _, _, _, q = block_statistics(net, clustering)
    row_order = np.argsort(-np.abs(q).sum(axis=1), kind="stable") + 1
    col_order = np.argsort(-np.abs(q).sum(axis=0), kind="stable") + 1
    perm_x = _side_permutation(clustering.z_x, row_order, net.d_x)
    perm_y = _side_permutation(clustering.z_y, col_order, net.d_y)
    return perm_x, perm_y


def render_heatmap(
    net: BipartiteNetwork,
    permutations: tuple[np.ndarray, np.ndarray],
    clustering: CoClustering,
    cocommunities: CoCommunitySet,
    cell_size: float = 2.0,
    max_nodes: int = 2000,
    downsample: bool = False,
) -> str:
    """Render the permuted adjacency matrix as a standalone SVG document.

    One rectangle per edge; signed edges are green (+) or red (-), unsigned
    blue. Black lines separate the group blocks and significant co-community
    blocks carry a heavier outline. Statistics are never downsampled, only
    the rendered rows/columns (uniform stride, declared in the metadata).
    """
    perm_x, perm_y = permutations
    perm_x = np.asarray(perm_x, dtype=np.int64)
    perm_y = np.asarray(perm_y, dtype=np.int64)
    if sorted(perm_x.tolist()) != list(range(net.m)) or sorted(perm_y.tolist()) != list(range(net.l)):
        raise ValueError("permutations must cover all nodes exactly once")

    stride_x = stride_y = 1
    if net.m > max_nodes or net.l > max_nodes:
        if not downsample:
            raise ValueError(
                f"render of {net.m}x{net.l} exceeds the {max_nodes}-node cap; "
                "enable downsampling or raise max_nodes"
            )
        stride_x = max(1, -(-net.m // max_nodes))
        stride_y = max(1, -(-net.l // max_nodes))
    keep_x = perm_x[::stride_x]
    keep_y = perm_y[::stride_y]
    pos_x = {node: r for r, node in enumerate(keep_x.tolist())}
    pos_y = {node: c for c, node in enumerate(keep_y.tolist())}

    width = len(keep_y) * cell_size
    height = len(keep_x) * cell_size
    svg = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "width": f"{width:g}",
            "height": f"{height:g}",
            "viewBox": f"0 0 {width:g} {height:g}",
        },
    )
    meta = {
        "m": net.m,
        "l": net.l,
        "stride_x": stride_x,
        "stride_y": stride_y,
        "cell_size": cell_size,
    }
    desc = ET.SubElement(svg, "desc")
    desc.text = json.dumps(meta, sort_keys=True)
    ET.SubElement(svg, "rect", {"x": "0", "y": "0", "width": f"{width:g}",
                                "height": f"{height:g}", "fill": "white"})

    edges_group = ET.SubElement(svg, "g", {"class": "edges"})
    rows, cols = net.edge_arrays()
    for i, j in zip(rows.tolist(), cols.tolist()):
        r = pos_x.get(i)
        c = pos_y.get(j)
        if r is None or c is None:
            continue
        sign = net.edge_signs.get((i, j))
        color = _COLOR_PLAIN if sign is None else (_COLOR_POS if sign > 0 else _COLOR_NEG)
        ET.SubElement(
            edges_group,
            "rect",
            {
                "x": f"{c * cell_size:g}",
                "y": f"{r * cell_size:g}",
                "width": f"{cell_size:g}",
                "height": f"{cell_size:g}",
                "fill": color,
            },
        )

    # block extents in display coordinates, per group label
    def extents(keep, z):
        spans = {}
        for r, node in enumerate(keep.tolist()):
            g = int(z[node])
            if g == 0:
                continue
            lo, hi = spans.get(g, (r, r))
            spans[g] = (min(lo, r), max(hi, r))
        return spans

    span_x = extents(keep_x, clustering.z_x)
    span_y = extents(keep_y, clustering.z_y)

    lines_group = ET.SubElement(svg, "g", {"class": "partitions", "stroke": "black",
                                           "stroke-width": "0.5"})
    cuts_r = sorted({hi + 1 for _, hi in span_x.values() if hi + 1 < len(keep_x)})
    cuts_c = sorted({hi + 1 for _, hi in span_y.values() if hi + 1 < len(keep_y)})
    for r in cuts_r:
        y = r * cell_size
        ET.SubElement(lines_group, "line", {"x1": "0", "y1": f"{y:g}",
                                            "x2": f"{width:g}", "y2": f"{y:g}"})
    for c in cuts_c:
        x = c * cell_size
        ET.SubElement(lines_group, "line", {"x1": f"{x:g}", "y1": "0",
                                            "x2": f"{x:g}", "y2": f"{height:g}"})

    outlines = ET.SubElement(svg, "g", {"class": "cocommunities", "fill": "none",
                                        "stroke": "black", "stroke-width": "1.5"})
    for p, q in cocommunities.significant_pairs():
        if p not in span_x or q not in span_y:
            continue
        rlo, rhi = span_x[p]
        clo, chi = span_y[q]
        ET.SubElement(
            outlines,
            "rect",
            {
                "x": f"{clo * cell_size:g}",
                "y": f"{rlo * cell_size:g}",
                "width": f"{(chi - clo + 1) * cell_size:g}",
                "height": f"{(rhi - rlo + 1) * cell_size:g}",
            },
        )
    return ET.tostring(svg, encoding="unicode")
