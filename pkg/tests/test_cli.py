import json

import pytest
from click.testing import CliRunner

import cauchylab as cl
from cauchylab.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, args):
    return runner.invoke(main, args, catch_exceptions=False)


class TestGen:
    def test_gen_cantor_file(self, runner, tmp_path):
        out = tmp_path / "c.json"
        res = invoke(runner, ["gen", "cantor", "--lambda", "0.25", "--depth", "3",
                              "-o", str(out)])
        assert res.exit_code == 0
        mu = cl.load_measure(out)
        assert len(mu) == 64
        assert mu.total_mass == pytest.approx(1.0, abs=1e-12)

    def test_gen_to_stdout_json(self, runner):
        res = invoke(runner, ["gen", "segment", "--count", "3"])
        assert res.exit_code == 0
        doc = json.loads(res.output)
        assert doc["dim"] == 2
        assert len(doc["points"]) == 3

    def test_gen_csv_extension(self, runner, tmp_path):
        out = tmp_path / "m.csv"
        res = invoke(runner, ["gen", "circle", "--count", "8", "-o", str(out)])
        assert res.exit_code == 0
        assert out.read_text().startswith("x1,x2,weight")

    def test_gen_invalid_depth_is_exit_1(self, runner):
        res = invoke(runner, ["gen", "cantor", "--lambda", "0.25", "--depth", "x"])
        assert res.exit_code == 1
        assert "depth" in res.output

    def test_gen_lambda_list(self, runner, tmp_path):
        out = tmp_path / "c.json"
        res = invoke(runner, ["gen", "cantor", "--lambda", "0.5,0.25", "--depth", "2",
                              "-o", str(out)])
        assert res.exit_code == 0
        assert len(cl.load_measure(out)) == 16


class TestAnalysis:
    @pytest.fixture
    def cantor_file(self, runner, tmp_path):
        out = tmp_path / "c.json"
        invoke(runner, ["gen", "cantor", "--lambda", "0.25", "--depth", "3",
                        "-o", str(out)])
        return out

    def test_curvature_total(self, runner, cantor_file, tmp_path):
        out = tmp_path / "curv.csv"
        res = invoke(runner, ["curvature", "-i", str(cantor_file), "-o", str(out)])
        assert res.exit_code == 0
        assert res.output == ""  # no stdout chatter when -o is given
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "label,value"
        assert lines[1].startswith("total,")

    def test_curvature_scan(self, runner, cantor_file):
        res = invoke(runner, ["curvature", "-i", str(cantor_file),
                              "--scales", "0.25,0.0625"])
        assert res.exit_code == 0
        lines = res.output.strip().splitlines()
        assert lines[0] == "scale,max_ratio"
        assert len(lines) == 3

    def test_density_profile(self, runner, cantor_file, tmp_path):
        out = tmp_path / "prof.csv"
        res = invoke(runner, ["density", "-i", str(cantor_file),
                              "--scales", "0.25,0.0625,0.015625", "-o", str(out)])
        assert res.exit_code == 0
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "scale,sup_density"
        values = [float(r.split(",")[1]) for r in rows[1:]]
        assert values == pytest.approx([1.0, 1.0, 1.0])

    def test_norm_command(self, runner, cantor_file):
        res = invoke(runner, ["norm", "-i", str(cantor_file), "--eps", "0.1"])
        assert res.exit_code == 0
        assert res.output.startswith("label,value\nnorm,")

    def test_norm_missing_file_exit_1_names_path(self, runner):
        res = invoke(runner, ["norm", "-i", "missing.json"])
        assert res.exit_code == 1
        assert "missing.json" in res.output

    def test_gaps_command(self, runner, cantor_file, tmp_path):
        out = tmp_path / "gaps.csv"
        res = invoke(runner, ["gaps", "-i", str(cantor_file),
                              "--eps-ladder", "0.5,0.1,0.02", "-o", str(out)])
        assert res.exit_code == 0
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "eps1,eps2,gap"
        assert len(rows) == 3

    def test_tv_check(self, runner, tmp_path):
        seg = tmp_path / "seg.json"
        invoke(runner, ["gen", "segment", "--count", "200", "-o", str(seg)])
        res = invoke(runner, ["tv-check", "-i", str(seg), "--theta-const", "1.0"])
        assert res.exit_code == 0
        assert res.output.startswith("label,value\nlhs,")

    def test_verdict_json_and_determinism(self, runner, cantor_file, tmp_path):
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        args = ["verdict", "-i", str(cantor_file), "--scales", "0.25,0.0625,0.015625",
                "--eps-ladder", "0.5,0.015625,0.0001"]
        assert invoke(runner, args + ["-o", str(out1)]).exit_code == 0
        assert invoke(runner, args + ["-o", str(out2)]).exit_code == 0
        assert out1.read_bytes() == out2.read_bytes()
        doc = json.loads(out1.read_text())
        assert doc["verdict"] == "not_compact"

    def test_verdict_csv_output(self, runner, cantor_file, tmp_path):
        out = tmp_path / "r.csv"
        res = invoke(runner, ["verdict", "-i", str(cantor_file),
                              "--scales", "0.25,0.0625",
                              "--eps-ladder", "0.5,0.05,0.005", "-o", str(out)])
        assert res.exit_code == 0
        assert out.read_text().startswith("kind,key1,key2,value")

    def test_budget_exceeded_exit_2(self, runner, cantor_file):
        res = invoke(runner, ["curvature", "-i", str(cantor_file), "--budget", "10"])
        assert res.exit_code == 2

    def test_unconverged_norm_exit_2_with_output(self, runner, cantor_file, tmp_path):
        out = tmp_path / "norm.csv"
        res = invoke(runner, ["norm", "-i", str(cantor_file), "--max-iter", "2",
                              "--tol", "1e-16", "-o", str(out)])
        assert res.exit_code == 2
        assert out.exists()  # report still emitted, flagged unconverged
        assert "converged,0" in out.read_text()

    def test_cantor_scan(self, runner, tmp_path):
        out = tmp_path / "scan.csv"
        res = invoke(runner, ["cantor-scan", "--lambda", "0.5", "--depth", "4",
                              "--curvature-depth", "3", "-o", str(out)])
        assert res.exit_code == 0
        text = out.read_text()
        assert text.startswith("k,theta,partial_sum")
        assert "c2_per_mass" in text

    def test_figures_written(self, runner, cantor_file, tmp_path):
        figs = tmp_path / "figs"
        res = invoke(runner, ["verdict", "-i", str(cantor_file),
                              "--scales", "0.25,0.0625",
                              "--eps-ladder", "0.5,0.05,0.005",
                              "-o", str(tmp_path / "r.json"), "--figures", str(figs)])
        assert res.exit_code == 0
        written = sorted(p.name for p in figs.glob("*.png"))
        assert written == ["curvature_ratios.png", "density_profile.png",
                           "truncation_gaps.png"]
        for p in figs.glob("*.png"):
            assert p.stat().st_size > 1000

    def test_density_figure(self, runner, cantor_file, tmp_path):
        figs = tmp_path / "figs"
        res = invoke(runner, ["density", "-i", str(cantor_file),
                              "--scales", "0.25,0.0625",
                              "-o", str(tmp_path / "p.csv"), "--figures", str(figs)])
        assert res.exit_code == 0
        assert (figs / "density_profile.png").exists()
