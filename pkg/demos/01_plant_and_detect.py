"""Plant co-communities in a bipartite network, detect them, score recovery.

A co-community pairs a group of X-nodes with a group of Y-nodes whose mutual
edge density exceeds what their degrees alone would predict. This script
samples a medium-sized network with three planted co-communities, runs the
spectral detection pipeline, and compares the result against the ground
truth.
"""

import numpy as np

from cocomod import (
    GeneratorConfig,
    evaluate_recovery,
    sample_network,
    spectral_coclustering,
)

cfg = GeneratorConfig(
    m=300, l=240,                  # X- and Y-node counts
    k_x=4, k_y=4, T=4,             # groups per side and planted pairings
    theta_in=5.0, theta_out=1.0,   # block effect on the logit scale
    pareto_shape=2.0, pareto_lower=1.0, pareto_upper=8.0,
    target_rho_out=0.02,           # calibrated between-block density
    planted_pairs=[(1, 1), (2, 2), (3, 3), (4, 4)],
    seed=1,
)
net, truth = sample_network(cfg)
print(f"network: {net.m} x {net.l}, {net.d_pp} edges "
      f"(rho_in={truth.realized_rho_in:.3f}, rho_out={truth.realized_rho_out:.4f})")
print(f"planted pairs: {truth.planted_pairs}")

report, cocommunities = spectral_coclustering(
    net, k_x=4, k_y=4, restarts=100, seed=7, alpha=0.05
)
print(f"\nbest global co-modularity over 100 restarts: {report.best_Q_global:.4f}")
print(f"significant co-communities (of {4 * 4} candidates): {cocommunities.T}")
for rec in sorted(cocommunities.pairs, key=lambda r: -r["Q_local"]):
    if rec["significant"]:
        print(f"  groups ({rec['p']},{rec['q']}): Q_local={rec['Q_local']:+.4f} "
              f"z={rec['z']:.1f} p_fdr={rec['p_fdr']:.2e}")

recovery = evaluate_recovery(
    net, truth.z_x_true, truth.z_y_true, truth.planted_pairs,
    report.best, cocommunities,
)
print(f"\nrecovery vs ground truth: nmi_x={recovery.nmi_x:.3f} "
      f"nmi_y={recovery.nmi_y:.3f} mean={recovery.nmi_mean:.3f} "
      f"(cell variant {recovery.nmi_cells:.3f})")

# the convergence trace: the running maximum should flatten well before the end
running = np.maximum.accumulate(report.restart_trace)
flat_from = int(np.argmax(running == running[-1]))
print(f"restart objective reached its maximum at restart {flat_from + 1}/100")
