import json
from pathlib import Path

from cocomod.cli import main

MILD_CONFIG = {
    "m": 150, "l": 120, "k_x": 3, "k_y": 3, "T": 3,
    "theta_in": 6.0, "theta_out": 1.0,
    "pareto_shape": 2.0, "pareto_lower": 1.0, "pareto_upper": 8.0,
    "target_rho_out": 0.02,
}


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def generate(tmp_path, capsys, seed="7"):
    edges = tmp_path / "edges.tsv"
    truth = tmp_path / "truth.json"
    cfg = tmp_path / "gen.json"
    cfg.write_text(json.dumps(MILD_CONFIG), encoding="utf-8")
    code = main(["generate", "--seed", seed, "--edges", str(edges),
                 "--truth", str(truth), "--config", str(cfg)])
    assert code == 0
    return edges, truth


def test_unknown_flag_is_usage_error(capsys):
    assert main(["detect", "--bogus"]) == 1
    assert "usage error" in capsys.readouterr().err


def test_missing_file_is_data_error(capsys):
    assert main(["select-k", "/nonexistent/edges.tsv"]) == 2


def test_generate_then_detect_deterministic(tmp_path, capsys):
    edges, truth = generate(tmp_path, capsys)
    out1 = tmp_path / "d1.json"
    out2 = tmp_path / "d2.json"
    base = ["detect", str(edges), "--kx", "3", "--ky", "3",
            "--restarts", "20", "--alpha", "0.05", "--seed", "7"]
    assert main(base + ["--out", str(out1)]) == 0
    assert main(base + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_detect_without_k_uses_select_k(tmp_path, capsys):
    edges, truth = generate(tmp_path, capsys)
    code, out = run(["select-k", str(edges)], capsys)
    assert code == 0
    est = json.loads(out)
    det = tmp_path / "det.json"
    assert main(["detect", str(edges), "--restarts", "10", "--seed", "3",
                 "--out", str(det)]) == 0
    doc = json.loads(det.read_text())
    assert doc["k_x"] == est["k_x"]
    assert doc["k_y"] == est["k_y"]


def test_full_pipeline_with_schemas(tmp_path, capsys):
    import jsonschema
    from referencing import Registry, Resource

    schema_dir = Path(__file__).resolve().parents[1] / "src" / "cocomod" / "schemas"
    schemas = {
        p.name: json.loads(p.read_text()) for p in schema_dir.glob("*.json")
    }
    registry = Registry().with_resources(
        (name, Resource.from_contents(doc)) for name, doc in schemas.items()
    )

    def check(doc, name):
        jsonschema.validate(doc, schemas[name], registry=registry)

    edges, truth = generate(tmp_path, capsys)
    check(json.loads(truth.read_text()), "truth.json")

    det = tmp_path / "det.json"
    trace = tmp_path / "trace.csv"
    assert main(["detect", str(edges), "--kx", "3", "--ky", "3", "--restarts", "15",
                 "--seed", "5", "--out", str(det), "--trace-csv", str(trace)]) == 0
    detection = json.loads(det.read_text())
    check(detection, "detection.json")
    check(detection["cocommunities"], "cocommunities.json")
    lines = trace.read_text().splitlines()
    assert lines[0] == "restart,Q_global,best_so_far"
    assert len(lines) == 16

    code, out = run(["select-k", str(edges)], capsys)
    assert code == 0
    check(json.loads(out), "bandwidth.json")

    code, out = run(["evaluate", "--edges", str(edges), "--truth", str(truth),
                     "--detection", str(det)], capsys)
    assert code == 0
    recovery = json.loads(out)
    check(recovery, "recovery.json")
    assert recovery["nmi_mean"] > 0.5  # strong planted signal at theta 30

    cov = tmp_path / "cov.tsv"
    cov.write_text("x1\tA\nx2\tA\nx3\tB\ny1\tA\ny2\tB\n", encoding="utf-8")
    code, out = run(["enrich", "--edges", str(edges), "--detection", str(det),
                     "--covariates", str(cov)], capsys)
    assert code == 0
    check(json.loads(out), "enrichment.json")

    svg_path = tmp_path / "plot.svg"
    assert main(["plot", str(edges), "--detection", str(det),
                 "--out", str(svg_path)]) == 0
    import xml.etree.ElementTree as ET

    ET.fromstring(svg_path.read_text())


def test_plot_reproducible_bytes(tmp_path, capsys):
    edges, truth = generate(tmp_path, capsys)
    det = tmp_path / "det.json"
    assert main(["detect", str(edges), "--kx", "3", "--ky", "3", "--restarts", "10",
                 "--seed", "5", "--out", str(det)]) == 0
    s1 = tmp_path / "p1.svg"
    s2 = tmp_path / "p2.svg"
    assert main(["plot", str(edges), "--detection", str(det), "--out", str(s1)]) == 0
    assert main(["plot", str(edges), "--detection", str(det), "--out", str(s2)]) == 0
    assert s1.read_bytes() == s2.read_bytes()


def test_config_overrides_flags(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"restarts": 5}), encoding="utf-8")
    edges, truth = generate(tmp_path, capsys)
    det = tmp_path / "det.json"
    assert main(["detect", str(edges), "--kx", "3", "--ky", "3", "--restarts", "50",
                 "--seed", "1", "--config", str(cfg), "--out", str(det)]) == 0
    doc = json.loads(det.read_text())
    assert doc["parameters"]["restarts"] == 5
    assert len(doc["restart_trace"]) == 5
