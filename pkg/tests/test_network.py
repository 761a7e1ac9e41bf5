import io

import numpy as np
import pytest

from cocomod import (
    degrees,
    density,
    from_edges,
    load_edge_list,
    write_edge_list,
    write_node_lists,
)

from conftest import random_net


def test_two_line_load():
    net = load_edge_list(io.StringIO("a\tp\nb\tq\n"))
    assert (net.m, net.l, net.d_pp) == (2, 2, 2)
    assert net.x_ids == ("a", "b")
    assert net.y_ids == ("p", "q")


def test_duplicate_edges_collapse():
    net = load_edge_list(io.StringIO("a\tp\na\tp\n"))
    assert net.d_pp == 1
    assert net.adjacency.nnz == 1


def test_shared_y_degrees():
    net = load_edge_list(io.StringIO("a\tp\nb\tp\nb\tq\nc\tq\n"))
    assert net.d_y[net.y_ids.index("p")] == 2
    assert net.d_pp == 4


def test_comments_and_blank_lines_skipped():
    net = load_edge_list(io.StringIO("# header\n\na\tp\n  \nb\tq\n"))
    assert net.d_pp == 2


def test_malformed_line_reports_number():
    with pytest.raises(ValueError, match="line 3"):
        load_edge_list(io.StringIO("a\tp\nb\tq\nnot a line\n"))


def test_empty_input_rejected():
    with pytest.raises(ValueError, match="no edges"):
        load_edge_list(io.StringIO("# only comments\n"))


def test_bad_sign_token_rejected():
    with pytest.raises(ValueError, match="sign"):
        load_edge_list(io.StringIO("a\tp\tmaybe\n"))


def test_signs_are_metadata_only():
    net = load_edge_list(io.StringIO("a\tp\t+\nb\tq\t-1\n"))
    assert net.edge_signs == {(0, 0): 1, (1, 1): -1}
    assert net.d_pp == 2
    assert (net.adjacency.data == 1).all()


def test_degrees_complete_and_identity(identity_net, complete_net):
    dx, dy, dpp = degrees(complete_net)
    assert dx.tolist() == [2, 2] and dy.tolist() == [2, 2] and dpp == 4
    dx, dy, dpp = degrees(identity_net)
    assert dx.tolist() == [1, 1] and dy.tolist() == [1, 1] and dpp == 2


def test_degrees_hand_count():
    net = from_edges([(0, 0), (1, 0), (2, 1)])
    assert net.d_y.tolist() == [2, 1]
    assert net.d_pp == 3


def test_density_values(identity_net, complete_net):
    assert density(complete_net) == 1.0
    assert density(identity_net) == 0.5


def test_sidecar_isolated_nodes_retained():
    net = load_edge_list(
        io.StringIO("a\tp\n"),
        x_nodes=["ghost", "a"],
        y_nodes=["p"],
    )
    assert net.m == 2
    assert net.x_ids == ("ghost", "a")
    assert net.isolated_x.tolist() == [True, False]
    assert net.d_pp == 1


def test_plain_roundtrip_idempotent():
    text = "a\tp\nb\tp\nb\tq\t-\nc\tq\n"
    net = load_edge_list(io.StringIO(text))
    buf = io.StringIO()
    write_edge_list(net, buf)
    net2 = load_edge_list(io.StringIO(buf.getvalue()))
    buf2 = io.StringIO()
    write_edge_list(net2, buf2)
    assert buf.getvalue() == buf2.getvalue()
    assert net2.x_ids == net.x_ids and net2.y_ids == net.y_ids
    assert net2.edge_signs == net.edge_signs


def test_sidecar_roundtrip_exact():
    rng = np.random.default_rng(42)
    for trial in range(20):
        net = random_net(rng, int(rng.integers(2, 20)), int(rng.integers(2, 20)), 0.2)
        ebuf, xbuf, ybuf = io.StringIO(), io.StringIO(), io.StringIO()
        write_edge_list(net, ebuf)
        write_node_lists(net, xbuf, ybuf)
        net2 = load_edge_list(
            io.StringIO(ebuf.getvalue()),
            x_nodes=io.StringIO(xbuf.getvalue()),
            y_nodes=io.StringIO(ybuf.getvalue()),
        )
        assert net2.x_ids == net.x_ids and net2.y_ids == net.y_ids
        assert (net2.adjacency != net.adjacency).nnz == 0


def test_degree_consistency_random():
    rng = np.random.default_rng(7)
    for trial in range(25):
        net = random_net(rng, int(rng.integers(1, 30)), int(rng.integers(1, 30)), 0.15)
        net.validate()
        assert net.d_x.sum() == net.d_y.sum() == net.d_pp


def test_density_rejects_empty_dimensions():
    net = from_edges([], m=0, l=0)
    with pytest.raises(ValueError):
        density(net)


def test_null_network_density_near_calibration_target():
    from cocomod import GeneratorConfig, sample_network

    cfg = GeneratorConfig(theta_in=1.0, theta_out=1.0, seed=5)
    net, _ = sample_network(cfg)
    assert density(net) == pytest.approx(0.0013, rel=0.4)
