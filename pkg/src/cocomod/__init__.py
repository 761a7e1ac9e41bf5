"""Co-community detection in bipartite networks.

Detects, scores, orders, and validates co-communities by maximizing
co-modularity through regularized spectral co-clustering, with data-driven
selection of the group counts and a planted-structure simulator for
verification.
"""

from .bandwidth import (
    BandwidthEstimate,
    GradientEstimates,
    anisotropy_test,
    estimate_gradients,
    k_from_bandwidth,
    select_k,
)
from .comod import (
    CoClustering,
    CoCommunitySet,
    bh_fdr,
    block_statistics,
    comodularity,
    global_comodularity,
    local_comodularity,
    residual_matrix_entry,
    row_column_comodularity,
    screen_cocommunities,
)
from .evaluation import (
    EnrichmentReport,
    RecoveryReport,
    evaluate_recovery,
    fisher_enrichment,
    load_covariates,
    nmi,
    nmi_cells,
)
from .generator import GeneratorConfig, GroundTruth, bounded_pareto, calibrate_offset, sample_network
from .network import (
    BipartiteNetwork,
    degrees,
    density,
    from_edges,
    load_edge_list,
    write_edge_list,
    write_node_lists,
)
from .spectral import (
    DetectionReport,
    SpectralDecomposition,
    co_laplacian,
    lloyd_kmeans,
    spectral_coclustering,
    truncated_svd,
)
from .viz import order_for_visualization, render_heatmap

__version__ = "0.1.0"

__all__ = [
    "BandwidthEstimate",
    "BipartiteNetwork",
    "CoClustering",
    "CoCommunitySet",
    "DetectionReport",
    "EnrichmentReport",
    "GeneratorConfig",
    "GradientEstimates",
    "GroundTruth",
    "RecoveryReport",
    "SpectralDecomposition",
    "anisotropy_test",
    "bh_fdr",
    "block_statistics",
    "bounded_pareto",
    "calibrate_offset",
    "co_laplacian",
    "comodularity",
    "degrees",
    "density",
    "estimate_gradients",
    "evaluate_recovery",
    "fisher_enrichment",
    "from_edges",
    "global_comodularity",
    "k_from_bandwidth",
    "lloyd_kmeans",
    "load_covariates",
    "load_edge_list",
    "local_comodularity",
    "nmi",
    "nmi_cells",
    "order_for_visualization",
    "render_heatmap",
    "residual_matrix_entry",
    "row_column_comodularity",
    "sample_network",
    "screen_cocommunities",
    "select_k",
    "spectral_coclustering",
    "truncated_svd",
    "write_edge_list",
    "write_node_lists",
]
