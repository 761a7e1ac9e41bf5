import io

import numpy as np
import pytest
import scipy.sparse as sp

from cocomod import (
    GeneratorConfig,
    co_laplacian,
    from_edges,
    load_edge_list,
    lloyd_kmeans,
    sample_network,
    spectral_coclustering,
    truncated_svd,
)

from conftest import random_connected_net


def test_co_laplacian_complete(complete_net):
    lap = co_laplacian(complete_net, regularized=False)
    assert np.allclose(lap.toarray(), 0.5)
    decomp = truncated_svd(lap, k=2)
    assert np.allclose(decomp.singular_values, [1.0, 0.0], atol=1e-12)


def test_co_laplacian_regularized_identity(identity_net):
    lap = co_laplacian(identity_net, regularized=True)
    assert np.allclose(lap.toarray(), np.eye(2) / 2)
    decomp = truncated_svd(lap, k=2)
    assert np.allclose(decomp.singular_values, [0.5, 0.5])


def test_co_laplacian_unregularized_rejects_isolated():
    net = load_edge_list(io.StringIO("a\tp\n"), x_nodes=["a", "ghost"])
    with pytest.raises(ValueError, match="ghost"):
        co_laplacian(net, regularized=False)


def test_perron_direction_on_connected_networks():
    rng = np.random.default_rng(31)
    for trial in range(5):
        net = random_connected_net(rng, 40, 30, 0.15)
        lap = co_laplacian(net, regularized=False)
        decomp = truncated_svd(lap, k=3, seed=trial)
        assert decomp.singular_values[0] == pytest.approx(1.0, abs=1e-8)
        u = decomp.left_vectors[:, 0]
        ref = np.sqrt(net.d_x)
        cos = abs(u @ ref) / np.linalg.norm(ref)
        assert cos > 1 - 1e-8


def test_truncated_svd_identity_and_rank1():
    decomp = truncated_svd(np.eye(3), k=3)
    assert np.allclose(decomp.singular_values, 1.0)
    u = np.array([[2.0], [0.0]])
    v = np.array([[3.0], [0.0], [0.0]])
    decomp = truncated_svd(u @ v.T, k=2)
    assert np.allclose(decomp.singular_values, [6.0, 0.0])
    # fillers stay orthonormal
    assert np.allclose(decomp.left_vectors.T @ decomp.left_vectors, np.eye(2), atol=1e-10)


def test_truncated_svd_matches_dense_oracle():
    rng = np.random.default_rng(5)
    for trial in range(5):
        mat = sp.random(
            200, 150, density=0.05, random_state=np.random.RandomState(trial), format="csr"
        )
        decomp = truncated_svd(mat, k=10, seed=trial)
        dense = np.linalg.svd(mat.toarray(), compute_uv=False)[:10]
        assert np.max(np.abs(decomp.singular_values - dense)) <= 1e-8 * dense[0]
        # orthonormality
        u, v = decomp.left_vectors, decomp.right_vectors
        assert np.allclose(u.T @ u, np.eye(10), atol=1e-8)
        assert np.allclose(v.T @ v, np.eye(10), atol=1e-8)


def test_truncated_svd_sign_convention():
    rng = np.random.default_rng(8)
    mat = rng.random((20, 15))
    decomp = truncated_svd(mat, k=5, seed=0)
    sums = decomp.left_vectors.sum(axis=0)
    assert (sums >= -1e-12).all()
    # decomposition identity after the sign fix
    approx = decomp.left_vectors @ np.diag(decomp.singular_values) @ decomp.right_vectors.T
    dense_s = np.linalg.svd(mat, compute_uv=False)
    resid = np.linalg.norm(mat - approx) / np.linalg.norm(mat)
    tail = np.sqrt((dense_s[5:] ** 2).sum()) / np.linalg.norm(mat)
    assert resid == pytest.approx(tail, abs=1e-10)


def test_truncated_svd_rejects_bad_k():
    with pytest.raises(ValueError):
        truncated_svd(np.eye(4), k=0)
    with pytest.raises(ValueError):
        truncated_svd(np.eye(4), k=5)


def test_lloyd_kmeans_separated_clusters():
    rng = np.random.default_rng(0)
    pts = np.concatenate([rng.normal(0, 0.05, (30, 2)), rng.normal(3, 0.05, (20, 2))])
    labels, cents = lloyd_kmeans(pts, 2, np.random.default_rng(1))
    assert len(set(labels[:30])) == 1
    assert len(set(labels[30:])) == 1
    assert labels[0] != labels[-1]


def test_two_block_exact_recovery():
    lines = [f"a{i}\tp{j}" for i in range(5) for j in range(4)]
    lines += [f"b{i}\tq{j}" for i in range(6) for j in range(5)]
    net = load_edge_list(io.StringIO("\n".join(lines)))
    report, cocoms = spectral_coclustering(net, 2, 2, restarts=20, seed=3)
    zx, zy = report.best.z_x, report.best.z_y
    assert len(set(zx[:5])) == 1 and len(set(zx[5:])) == 1 and zx[0] != zx[5]
    assert len(set(zy[:4])) == 1 and len(set(zy[4:])) == 1 and zy[0] != zy[4]
    # analytic Q_global: four blocks of |20 - 20*20/50|/50
    assert report.best_Q_global == pytest.approx(0.96, abs=1e-12)
    assert set(cocoms.significant_pairs()) == {(1, 1), (2, 2)} or set(
        cocoms.significant_pairs()
    ) == {(1, 2), (2, 1)}


def test_detection_deterministic_and_trace_monotone():
    net, _ = sample_network(GeneratorConfig(m=240, l=180, k_x=4, k_y=3, T=3, seed=2))
    rep1, cc1 = spectral_coclustering(net, 4, 3, restarts=30, seed=9)
    rep2, cc2 = spectral_coclustering(net, 4, 3, restarts=30, seed=9)
    assert rep1.to_json() == rep2.to_json()
    assert cc1.to_json() == cc2.to_json()
    running = np.maximum.accumulate(rep1.restart_trace)
    assert (np.diff(running) >= 0).all()
    assert rep1.best_Q_global == running[-1]


def test_labels_invariant_under_edge_order():
    rng = np.random.default_rng(44)
    net = random_connected_net(rng, 60, 50, 0.1)
    rows, cols = net.edge_arrays()
    edges = list(zip(rows.tolist(), cols.tolist()))
    shuffled = edges[:]
    rng.shuffle(shuffled)
    net2 = from_edges(shuffled, m=60, l=50)
    rep1, _ = spectral_coclustering(net, 3, 3, restarts=10, seed=5)
    rep2, _ = spectral_coclustering(net2, 3, 3, restarts=10, seed=5)
    assert (rep1.best.z_x == rep2.best.z_x).all()
    assert (rep1.best.z_y == rep2.best.z_y).all()


def test_isolated_nodes_get_label_zero():
    net = load_edge_list(
        io.StringIO("\n".join(
            [f"a{i}\tp{j}" for i in range(5) for j in range(4)]
            + [f"b{i}\tq{j}" for i in range(5) for j in range(4)]
        )),
        x_nodes=[f"a{i}" for i in range(5)] + [f"b{i}" for i in range(5)] + ["ghost"],
    )
    report, _ = spectral_coclustering(net, 2, 2, restarts=10, seed=1)
    assert report.best.z_x[-1] == 0
    assert (report.best.z_x[:-1] > 0).all()


def test_group_orders_sorted_by_row_column_scores():
    net, _ = sample_network(GeneratorConfig(m=240, l=180, k_x=4, k_y=3, T=3, seed=6))
    report, _ = spectral_coclustering(net, 4, 3, restarts=20, seed=4)
    from cocomod import row_column_comodularity

    q_row, q_col = row_column_comodularity(net, report.best)
    assert (np.diff(q_row[report.best.row_order - 1]) <= 1e-15).all()
    assert (np.diff(q_col[report.best.col_order - 1]) <= 1e-15).all()


def test_error_when_k_too_large():
    net = load_edge_list(io.StringIO("a\tp\nb\tq\n"))
    with pytest.raises(ValueError):
        spectral_coclustering(net, 5, 2, restarts=5, seed=0)


def test_detected_partition_attains_max_profile_likelihood():
    """Two planted co-communities, exhaustive search over 2x2 partitions."""
    from oracles import exhaustive_two_block_scores

    hits = 0
    for trial in range(5):
        cfg = GeneratorConfig(
            m=10, l=10, k_x=2, k_y=2, T=2,
            theta_in=9.0, theta_out=1.0,
            pareto_shape=2.0, pareto_lower=1.0, pareto_upper=4.0,
            target_rho_out=0.25,
            planted_pairs=[(1, 1), (2, 2)],
            seed=trial,
        )
        net, truth = sample_network(cfg)
        if (net.d_x == 0).any() or (net.d_y == 0).any():
            continue
        report, _ = spectral_coclustering(net, 2, 2, restarts=60, seed=trial)
        _, ll = exhaustive_two_block_scores(net.adjacency.toarray())
        sbits = int((2 ** np.arange(net.m) * (report.best.z_x == 1)).sum())
        rbits = int((2 ** np.arange(net.l) * (report.best.z_y == 1)).sum())
        assert ll[sbits, rbits] >= ll.max() - 1e-9
        hits += 1
    assert hits >= 3  # enough informative instances actually ran


def test_threaded_restarts_match_serial(monkeypatch):
    net, _ = sample_network(GeneratorConfig(m=240, l=180, k_x=4, k_y=3, T=3, seed=2))
    rep_serial, cc_serial = spectral_coclustering(net, 4, 3, restarts=16, seed=9)
    monkeypatch.setenv("COCOMOD_THREADS", "4")
    rep_threaded, cc_threaded = spectral_coclustering(net, 4, 3, restarts=16, seed=9)
    assert rep_serial.to_json() == rep_threaded.to_json()
    assert cc_serial.to_json() == cc_threaded.to_json()


def test_error_when_leverage_filters_everything():
    net, _ = sample_network(GeneratorConfig(m=240, l=180, k_x=4, k_y=3, T=3, seed=2))
    with pytest.raises(ValueError, match="leverage|high-leverage"):
        spectral_coclustering(net, 4, 3, restarts=5, seed=0, leverage_threshold=1e9)
