"""Render the adjacency matrix before and after co-community ordering.

Ordering groups by decreasing row/column co-modularity pulls the strongest
co-communities toward the top-left corner of the heatmap; the contrast with
an unordered rendering is the quickest visual check that detection found
real structure. Writes two SVG files into the working directory.
"""

from pathlib import Path

import numpy as np

from cocomod import (
    CoClustering,
    GeneratorConfig,
    order_for_visualization,
    render_heatmap,
    sample_network,
    screen_cocommunities,
    spectral_coclustering,
)

cfg = GeneratorConfig(
    m=240, l=200, k_x=4, k_y=4, T=4,
    theta_in=6.0, theta_out=1.0,
    pareto_shape=2.0, pareto_lower=1.0, pareto_upper=8.0,
    target_rho_out=0.02, seed=5,
)
net, truth = sample_network(cfg)
report, cocommunities = spectral_coclustering(net, 4, 4, restarts=80, seed=2)

# detected ordering: strongest blocks congregate top-left
perms = order_for_visualization(net, report.best, cocommunities)
svg = render_heatmap(net, perms, report.best, cocommunities, cell_size=3.0)
Path("heatmap_ordered.svg").write_text(svg, encoding="utf-8")

# baseline: identity permutation with a trivial single-group clustering
flat = CoClustering(
    z_x=np.ones(net.m, dtype=int), z_y=np.ones(net.l, dtype=int), k_x=1, k_y=1
)
flat_cocoms = screen_cocommunities(net, flat, alpha=0.05)
baseline = render_heatmap(
    net, (np.arange(net.m), np.arange(net.l)), flat, flat_cocoms, cell_size=3.0
)
Path("heatmap_unordered.svg").write_text(baseline, encoding="utf-8")

print(f"detected {cocommunities.T} significant co-communities")
print("wrote heatmap_ordered.svg (outlined blocks, top-left concentration)")
print("wrote heatmap_unordered.svg (same edges, arrival order)")
