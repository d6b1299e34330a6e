"""Command line surface: every subcommand, file formats, exit codes."""

import json

import pytest

from graphonlab.cli import main
from graphonlab.graphon_core import StepGraphon, save_graphon_file
from graphonlab.sampling import load_trace_file


@pytest.fixture()
def one_block_spec(tmp_path):
    path = tmp_path / "w.json"
    save_graphon_file(StepGraphon([1.0], [[1.0]]), path)
    return str(path)


@pytest.fixture()
def corner_specs(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    save_graphon_file(StepGraphon([1.0, 1.0], [[1.0, 0.0], [0.0, 0.0]]), a)
    save_graphon_file(StepGraphon([1.0, 1.0], [[0.5, 0.0], [0.0, 0.0]]), b)
    return str(a), str(b)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestSample:
    def test_sample_writes_trace(self, tmp_path, one_block_spec, capsys):
        out = tmp_path / "trace.json"
        code, stdout = run_cli(
            capsys, "sample", "--spec", one_block_spec, "--t", "10", "--seed", "7",
            "--keep-isolated", "--out", str(out),
        )
        assert code == 0
        info = json.loads(stdout)
        trace = load_trace_file(out)
        assert info["vertices"] == trace.num_vertices
        assert trace.seed == 7

    def test_sample_deterministic(self, tmp_path, one_block_spec, capsys):
        out1, out2 = tmp_path / "t1.json", tmp_path / "t2.json"
        run_cli(capsys, "sample", "--spec", one_block_spec, "--t", "8", "--seed", "3", "--out", str(out1))
        run_cli(capsys, "sample", "--spec", one_block_spec, "--t", "8", "--seed", "3", "--out", str(out2))
        assert out1.read_bytes() == out2.read_bytes()


class TestCutNorm:
    def test_exact_value(self, one_block_spec, capsys):
        code, stdout = run_cli(capsys, "cutnorm", "--spec", one_block_spec, "--mode", "exact")
        assert code == 0
        payload = json.loads(stdout)
        assert payload["value"] == pytest.approx(1.0)
        assert payload["mode"] == "exact"

    def test_heuristic_flagged(self, one_block_spec, capsys):
        code, stdout = run_cli(capsys, "cutnorm", "--spec", one_block_spec, "--mode", "heuristic")
        assert json.loads(stdout)["mode"] == "heuristic_lower"


class TestCutDist:
    def test_exact_distance(self, corner_specs, capsys):
        a, b = corner_specs
        code, stdout = run_cli(capsys, "cutdist", "--a", a, "--b", b, "--mode", "exact")
        assert code == 0
        payload = json.loads(stdout)
        assert payload["value"] == pytest.approx(0.5, abs=1e-12)
        assert payload["mode"] == "exact"
        assert payload["quantization_error"] == 0.0

    def test_anneal_reports_upper_bound(self, corner_specs, capsys):
        a, b = corner_specs
        code, stdout = run_cli(
            capsys, "cutdist", "--a", a, "--b", b, "--mode", "anneal",
            "--budget", "2000", "--seed", "3", "--quantum", "1.0",
        )
        payload = json.loads(stdout)
        assert payload["mode"] == "upper_bound"
        assert payload["value"] >= 0.5 - 1e-12


class TestHom:
    def test_trace_density(self, tmp_path, one_block_spec, capsys):
        trace_path = tmp_path / "trace.json"
        run_cli(capsys, "sample", "--spec", one_block_spec, "--t", "12", "--seed", "1",
                "--out", str(trace_path))
        code, stdout = run_cli(capsys, "hom", "--motif", "edge", "--graph", str(trace_path), "--at", "12")
        assert code == 0
        payload = json.loads(stdout)
        assert payload["h"] == 1.0

    def test_inline_motif(self, tmp_path, one_block_spec, capsys):
        trace_path = tmp_path / "trace.json"
        run_cli(capsys, "sample", "--spec", one_block_spec, "--t", "12", "--seed", "1",
                "--out", str(trace_path))
        code, stdout = run_cli(capsys, "hom", "--motif", "[[0,1],[1,2]]", "--graph", str(trace_path))
        assert code == 0
        assert json.loads(stdout)["h"] > 0

    def test_analytic_density(self, tmp_path, capsys):
        spec = tmp_path / "cf.json"
        spec.write_text(json.dumps({
            "type": "caron_fox",
            "f": {"kind": "shifted_power", "c": 1.0, "gamma": 2.0},
            "truncation": {"x_max": 5.0},
        }))
        code, stdout = run_cli(capsys, "hom", "--motif", "edge", "--spec", str(spec),
                               "--analytic", "--mc", "20000", "--seed", "5")
        assert code == 0
        payload = json.loads(stdout)
        assert payload["finite"]
        assert payload["h"] == pytest.approx(1.0, abs=5 * payload["stderr"] + 0.02)


class TestTailReg:
    def test_csv_and_summary(self, tmp_path, capsys):
        out = tmp_path / "profile.csv"
        code, stdout = run_cli(
            capsys, "tailreg", "--graphs", "clique_example1:alpha=0.5:n=400,900",
            "--eps", "0.1", "--seed", "2", "--out", str(out),
        )
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "graph_id,n,num_edges,M_grid,share"
        assert len(lines) > 2
        assert "np.float" not in out.read_text()  # plain decimal literals only
        payload = json.loads(stdout)
        assert payload["ok"] and payload["uniform_m"] is not None

    def test_unknown_family(self, tmp_path, capsys):
        code, _ = run_cli(capsys, "tailreg", "--graphs", "nope:n=10", "--eps", "0.1",
                          "--out", str(tmp_path / "x.csv"))
        assert code == 2


class TestExperimentCommand:
    def test_describe(self, capsys):
        code, stdout = run_cli(capsys, "experiment", "edge_growth", "--describe")
        assert code == 0
        assert "CSV columns" in stdout

    def test_run_with_config_writes_reports(self, tmp_path, capsys):
        cfg = {
            "experiment": "edge_growth",
            "replicas": 20,
            "seed": 1,
            "params": {"t": 10.0, "bounds": [0.5, 1.5]},
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out_dir = tmp_path / "results"
        code, stdout = run_cli(capsys, "experiment", "edge_growth",
                               "--config", str(cfg_path), "--out", str(out_dir))
        assert code == 0
        payload = json.loads(stdout)
        assert payload["passed"]
        for suffix in ("_records.csv", "_report.json", "_chart.svg"):
            assert (out_dir / f"edge_growth{suffix}").exists()

    def test_failing_tolerance_exit_code(self, tmp_path, capsys):
        cfg = {
            "experiment": "edge_growth",
            "replicas": 5,
            "seed": 1,
            "params": {"t": 10.0, "bounds": [0.999, 1.001]},
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        code, _ = run_cli(capsys, "experiment", "edge_growth", "--config", str(cfg_path),
                          "--out", str(tmp_path / "r"))
        assert code == 1

    def test_config_name_mismatch(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"experiment": "degree_tail"}))
        code, _ = run_cli(capsys, "experiment", "edge_growth", "--config", str(cfg_path),
                          "--out", str(tmp_path / "r"))
        assert code == 2
