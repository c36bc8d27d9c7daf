"""End-to-end command tests through the click runner."""

import csv
import json

import pytest
from click.testing import CliRunner

from diclique import motif_report, project, read_bipartite, read_digraph
from diclique.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def _write_config(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=1))
    return path


def _single_cell_doc(**overrides):
    doc = {
        "schema_version": 1,
        "seed": 5,
        "model": {"n": 60, "m": 40, "gamma": 0.02},
        "weights": {
            "x": {"kind": "constant", "value": 1.0},
            "y": {"kind": "constant", "value": 1.0},
            "z": {"kind": "constant", "value": 1.0},
        },
        "kernel": {"kind": "epsilon_min", "epsilon": 0.8},
        "replicates": 2,
    }
    doc.update(overrides)
    return doc


def _read_dir(out_dir):
    return {p.name: p.read_bytes() for p in sorted(out_dir.iterdir()) if p.is_file()}


def _run(runner, out_dir, *args, **kwargs):
    return runner.invoke(main, ["--out", str(out_dir), *args],
                         catch_exceptions=False, **kwargs)


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def test_generate_writes_graphs_and_metadata(tmp_path, runner):
    config = _write_config(tmp_path, "run.json", _single_cell_doc())
    out = tmp_path / "out"
    result = _run(runner, out, "generate", "--config", str(config))
    assert result.exit_code == 0, result.output

    h = read_bipartite(out / "bipartite.txt")
    d = read_digraph(out / "digraph.txt")
    assert (h.n, h.m) == (60, 40)
    # The serialized digraph is exactly the projection of the serialized
    # bipartite graph.
    assert project(h).edge_array().tolist() == d.edge_array().tolist()

    metadata = json.loads((out / "metadata.json").read_text())
    assert metadata["seed"] == 5
    assert metadata["params"]["n"] == 60
    assert metadata["edge_counts"]["digraph"] == d.edge_count


def test_generate_is_reproducible(tmp_path, runner):
    config = _write_config(tmp_path, "run.json", _single_cell_doc())
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert _run(runner, out1, "generate", "--config", str(config)).exit_code == 0
    assert _run(runner, out2, "generate", "--config", str(config)).exit_code == 0
    assert _read_dir(out1) == _read_dir(out2)


def test_generate_cli_seed_overrides_config_seed(tmp_path, runner):
    config = _write_config(tmp_path, "run.json", _single_cell_doc(seed=5))
    alt = _write_config(tmp_path, "alt.json", _single_cell_doc(seed=99))
    out1, out2, out3 = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    _run(runner, out1, "generate", "--config", str(config))
    _run(runner, out2, "--seed", "99", "generate", "--config", str(config))
    _run(runner, out3, "generate", "--config", str(alt))
    assert _read_dir(out2) == _read_dir(out3)
    assert _read_dir(out1) != _read_dir(out2)


def test_generate_requires_exactly_one_source(tmp_path, runner):
    config = _write_config(tmp_path, "run.json", _single_cell_doc())
    out = tmp_path / "out"
    neither = _run(runner, out, "generate")
    assert neither.exit_code == 2
    assert "exactly one of" in neither.output

    bipartite = tmp_path / "h.txt"
    bipartite.write_text("# bipartite n=2 m=2\nA 0 0\nS 0 1\n")
    both = _run(runner, out, "generate", "--config", str(config),
                "--from-bipartite", str(bipartite))
    assert both.exit_code == 2


def test_generate_rejects_sweep_configs(tmp_path, runner):
    doc = _single_cell_doc(model={"n": [10, 20], "m": 5, "gamma": 0.1})
    config = _write_config(tmp_path, "sweep.json", doc)
    result = _run(runner, tmp_path / "out", "generate", "--config", str(config))
    assert result.exit_code == 2
    assert "single parameter cell" in result.output


def test_generate_from_bipartite_file(tmp_path, runner):
    source = tmp_path / "h.txt"
    source.write_text("# bipartite n=3 m=1\nA 0 0\nA 1 0\nS 0 2\n")
    out = tmp_path / "out"
    result = _run(runner, out, "generate", "--from-bipartite", str(source))
    assert result.exit_code == 0
    d = read_digraph(out / "digraph.txt")
    assert {tuple(e) for e in d.edge_array()} == {(0, 2), (1, 2)}
    metadata = json.loads((out / "metadata.json").read_text())
    assert metadata["source"] == str(source)
    assert not (out / "bipartite.txt").exists()


def test_generate_reports_parse_errors(tmp_path, runner):
    source = tmp_path / "h.txt"
    source.write_text("# bipartite n=2 m=2\nA 0 9\n")
    result = _run(runner, tmp_path / "out", "generate", "--from-bipartite", str(source))
    assert result.exit_code == 2
    assert "out of range" in result.output


def test_generate_invalid_config_json(tmp_path, runner):
    config = tmp_path / "bad.json"
    config.write_text("{broken")
    result = _run(runner, tmp_path / "out", "generate", "--config", str(config))
    assert result.exit_code == 2
    assert "not valid JSON" in result.output


# ---------------------------------------------------------------------------
# coeffs
# ---------------------------------------------------------------------------


def test_coeffs_matches_library_counts(tmp_path, runner):
    graph = tmp_path / "g.txt"
    graph.write_text("# digraph n=4\n0 2\n0 3\n1 2\n1 3\n")
    out = tmp_path / "out"
    result = _run(runner, out, "coeffs", str(graph))
    assert result.exit_code == 0

    report = motif_report(read_digraph(graph))
    document = json.loads((out / "coeffs.json").read_text())
    assert document["diclique_ordered"] == report.diclique_ordered
    assert document["dicc"] == report.dicc
    assert document["source"] == str(graph)

    with open(out / "coeffs.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "n"
    assert len(rows) == 2
    assert "dicc=1" in result.output.replace("dicc=1.0", "dicc=1")


def test_coeffs_projects_bipartite_input(tmp_path, runner):
    graph = tmp_path / "h.txt"
    graph.write_text("# bipartite n=3 m=1\nA 0 0\nA 1 0\nS 0 2\n")
    out = tmp_path / "out"
    result = _run(runner, out, "coeffs", str(graph))
    assert result.exit_code == 0
    assert "n=3 edges=2" in result.output


def test_coeffs_format_selection(tmp_path, runner):
    graph = tmp_path / "g.txt"
    graph.write_text("# digraph n=3\n0 1\n")
    out = tmp_path / "out"
    result = _run(runner, out, "--format", "json", "coeffs", str(graph))
    assert result.exit_code == 0
    assert (out / "coeffs.json").exists()
    assert not (out / "coeffs.csv").exists()


def test_coeffs_rejects_malformed_files(tmp_path, runner):
    graph = tmp_path / "g.txt"
    graph.write_text("# digraph n=3\n0 0\n")
    result = _run(runner, tmp_path / "out", "coeffs", str(graph))
    assert result.exit_code == 2
    assert "self-loop" in result.output


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------


def _sweep_doc():
    return {
        "schema_version": 1,
        "seed": 11,
        "model": {"n": 80, "m": 80, "gamma": {"alpha": [0.5, 1.0]}},
        "weights": {
            "x": {"kind": "constant", "value": 1.0},
            "y": {"kind": "constant", "value": 1.0},
            "z": {"kind": "constant", "value": 1.0},
        },
        "kernel": {"kind": "epsilon_min", "epsilon": 1.0},
        "replicates": 3,
        "measurements": ["dicc", "trcc"],
    }


def test_experiment_writes_reports_and_figures(tmp_path, runner):
    config = _write_config(tmp_path, "sweep.json", _sweep_doc())
    out = tmp_path / "out"
    result = _run(runner, out, "experiment", str(config))
    assert result.exit_code == 0, result.output

    with open(out / "experiment.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 3  # header + one row per cell

    document = json.loads((out / "experiment.json").read_text())
    assert len(document["cells"]) == 2
    assert document["seed"] == 11
    assert (out / "experiment_dicc.png").exists()
    assert (out / "experiment_trcc.png").exists()
    assert "cell 0" in result.output and "cell 1" in result.output


def test_experiment_no_plots_flag(tmp_path, runner):
    config = _write_config(tmp_path, "sweep.json", _sweep_doc())
    out = tmp_path / "out"
    result = _run(runner, out, "--no-plots", "experiment", str(config))
    assert result.exit_code == 0
    assert (out / "experiment.csv").exists()
    assert not list(out.glob("*.png"))


def test_experiment_outputs_are_thread_invariant(tmp_path, runner):
    config = _write_config(tmp_path, "sweep.json", _sweep_doc())
    out1, out2 = tmp_path / "t1", tmp_path / "t2"
    assert _run(runner, out1, "--threads", "1", "experiment", str(config)).exit_code == 0
    assert _run(runner, out2, "--threads", "2", "experiment", str(config)).exit_code == 0
    assert _read_dir(out1) == _read_dir(out2)


def test_experiment_failing_cell_exits_nonzero_after_reporting(tmp_path, runner):
    # gamma = 1 saturates p = q = 1, where eps*min(p, q) = 0.5 undercuts
    # the Frechet floor; the run must still leave reports behind.
    doc = _sweep_doc()
    doc["model"] = {"n": 10, "m": 5, "gamma": [0.001, 1.0]}
    doc["kernel"] = {"kind": "epsilon_min", "epsilon": 0.5}
    config = _write_config(tmp_path, "bad.json", doc)
    out = tmp_path / "out"
    result = _run(runner, out, "--no-plots", "experiment", str(config))
    assert result.exit_code == 1
    assert "FAILED" in result.output
    assert (out / "experiment.csv").exists()
    document = json.loads((out / "experiment.json").read_text())
    assert document["cells"][0]["status"] == "ok"
    assert document["cells"][1]["status"] == "failed"
    assert "replicate" in document["cells"][1]["failure"]


# ---------------------------------------------------------------------------
# degree-compare
# ---------------------------------------------------------------------------


def _degree_doc():
    return {
        "schema_version": 1,
        "seed": 3,
        "model": {"n": 150, "m": 60, "gamma": {"rule": "inverse_sqrt_nm"}},
        "weights": {
            "x": {"kind": "constant", "value": 1.0},
            "y": {"kind": "constant", "value": 1.0},
            "z": {"kind": "constant", "value": 1.0},
        },
        "replicates": 2,
        "measurements": ["dicc"],
        "degree": {"regime": "balanced", "direction": "out"},
    }


def test_degree_compare_writes_comparison(tmp_path, runner):
    config = _write_config(tmp_path, "deg.json", _degree_doc())
    out = tmp_path / "out"
    result = _run(runner, out, "degree-compare", str(config))
    assert result.exit_code == 0, result.output
    assert "tv_distance=" in result.output
    assert "zero_fraction=" in result.output
    assert (out / "degree.csv").exists()
    assert (out / "degree_pmf.png").exists()
    document = json.loads((out / "degree.json").read_text())
    assert document["direction"] == "out"
    assert document["empirical"]["total"] == 150 * 2
    assert 0.0 <= document["tv_distance"] <= 1.0


def test_degree_compare_requires_degree_block(tmp_path, runner):
    doc = _degree_doc()
    del doc["degree"]
    config = _write_config(tmp_path, "deg.json", doc)
    result = _run(runner, tmp_path / "out", "degree-compare", str(config))
    assert result.exit_code == 2
    assert "degree" in result.output


def test_degree_compare_is_deterministic(tmp_path, runner):
    config = _write_config(tmp_path, "deg.json", _degree_doc())
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert _run(runner, out1, "degree-compare", str(config)).exit_code == 0
    assert _run(runner, out2, "degree-compare", str(config)).exit_code == 0
    assert _read_dir(out1) == _read_dir(out2)
