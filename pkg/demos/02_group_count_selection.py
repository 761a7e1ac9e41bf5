"""Choose the number of row and column groups from the data itself.

The top singular triplet of the adjacency matrix acts as a discretely
sampled factorization of the network's smooth generating surface. Sorting
the singular vectors and fitting their central slopes yields directional
max-gradient estimates; a steeper direction needs more groups. The
anisotropy factor gamma splits a shared budget between the two sides, and a
z-test on gamma^2 decides whether an uneven split is warranted at all.
"""

from cocomod import (
    BipartiteNetwork,
    GeneratorConfig,
    anisotropy_test,
    estimate_gradients,
    sample_network,
    select_k,
)
from cocomod.bandwidth import GradientEstimates, SideFit

# a symmetric instance: identical margins, square blocks -> expect gamma ~ 1
cfg = GeneratorConfig(
    m=800, l=800, k_x=4, k_y=4, T=4,
    theta_in=3.0, theta_out=1.0,
    pareto_shape=3.0, pareto_lower=1.0, pareto_upper=10.0,
    target_rho_out=0.02,
    planted_pairs=[(i, i) for i in range(1, 5)],
    seed=0,
)
net, _ = sample_network(cfg)
grads = estimate_gradients(net)
print(f"symmetric instance: nu={grads.nu:.3f}, slopes "
      f"p_x={grads.p_x:.2e} p_y={grads.p_y:.2e}")
est = select_k(net)
print(f"  gamma_hat={est.gamma_hat:.3f}, anisotropy p={est.p_value:.3f}, "
      f"rejected={est.anisotropy_rejected}")
print(f"  chosen group counts: k_x={est.k_x}, k_y={est.k_y} "
      f"(bandwidths {est.h_x:.0f} and {est.h_y:.0f} nodes per group)")

# transposing the network swaps the roles of the two sides exactly
net_t = BipartiteNetwork(
    adjacency=net.adjacency.T.tocsr(), x_ids=net.y_ids, y_ids=net.x_ids,
    d_x=net.d_y, d_y=net.d_x, d_pp=net.d_pp,
)
est_t = select_k(net_t)
print(f"\ntranspose check: unrounded counts {est.k_x_raw:.3f}/{est.k_y_raw:.3f} "
      f"become {est_t.k_x_raw:.3f}/{est_t.k_y_raw:.3f}")

# when the fitted gradients genuinely disagree, the test rejects and the
# group budget splits: here gamma^2 = 1.5 with tau = 0.1 gives z = 5
p_x, b_x, p_y, b_y = 1e-4, 0.03, 1.5e-4, 0.03
fits = GradientEstimates(
    nu=1.0,
    x=SideFit(p_x, b_x, 0.0025 * p_x**2, 0.0025 * b_x**2, 0.0, 100),
    y=SideFit(p_y, b_y, 0.0025 * p_y**2, 0.0025 * b_y**2, 0.0, 100),
    window=0.5, m=1000, l=1000, rho_hat=0.01,
)
gamma_sq, tau_sq, z, p, reject = anisotropy_test(fits)
print(f"\nsynthetic uneven gradients: gamma^2={gamma_sq:.2f}, z={z:.1f}, "
      f"p={p:.2e}, rejected={reject}")
