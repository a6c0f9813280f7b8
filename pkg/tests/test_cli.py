import json
import math

import numpy as np
import pytest

from lportho.cli import main
from lportho.signal_decomposition import Signal, l1_fourier_energy, write_signal_csv


def write_vector(path, values):
    path.write_text("".join(f"{v}\n" for v in values))
    return str(path)


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAngleAndOrtho:
    def test_angle_json(self, tmp_path, capsys):
        f = write_vector(tmp_path / "f.csv", [1.0])
        g = write_vector(tmp_path / "g.csv", [-1.0])
        code, out, _ = run_cli(capsys, ["angle", f, g, "--p", "1"])
        assert code == 0
        doc = json.loads(out)
        assert doc["defect"] == pytest.approx(-2.0, abs=1e-14)
        assert doc["angle"] == pytest.approx(math.pi - math.atan(0.5), abs=1e-12)
        assert doc["orthogonal"] is False

    def test_ortho_disjoint_supports(self, tmp_path, capsys):
        f = write_vector(tmp_path / "f.csv", [5.0, 0.0])
        g = write_vector(tmp_path / "g.csv", [0.0, -7.0])
        code, out, _ = run_cli(capsys, ["ortho", f, g, "--p", "1"])
        assert code == 0
        doc = json.loads(out)
        assert doc["orthogonal"] is True
        assert doc["wip"] == 0
        assert doc["p"] == 1.0

    def test_mismatched_lengths_exit_code(self, tmp_path, capsys):
        f = write_vector(tmp_path / "f.csv", [1.0, 2.0])
        g = write_vector(tmp_path / "g.csv", [1.0])
        code, _, err = run_cli(capsys, ["angle", f, g])
        assert code == 1
        assert "error" in err


class TestEnergy:
    def test_constant_signal(self, tmp_path, capsys):
        s = write_vector(tmp_path / "s.csv", [1.0, 1.0])
        code, out, _ = run_cli(capsys, ["energy", s])
        assert code == 0
        doc = json.loads(out)
        assert doc == {"n": 2, "bandwidth": 1, "energy": 2}

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, ["energy", str(tmp_path / "nope.csv")])
        assert code == 1
        assert "error" in err


@pytest.fixture
def signal_file(tmp_path):
    rng = np.random.default_rng(42)
    s = Signal(rng.standard_normal(64))
    path = tmp_path / "signal.csv"
    write_signal_csv(path, s)
    return str(path), s


class TestDecompose:
    def test_end_to_end(self, tmp_path, capsys, signal_file):
        path, s = signal_file
        out_dir = tmp_path / "dec"
        code, out, _ = run_cli(
            capsys,
            ["decompose", path, "--halfwidths", "3,9", "--out-dir", str(out_dir)],
        )
        assert code == 0
        report = json.loads(out)
        assert report["conserved"] is True
        assert report["total_energy"] == pytest.approx(l1_fourier_energy(s), rel=1e-12)
        assert len(report["component_energies"]) == 3  # two bands plus trend
        for name in (
            "decomposition.json",
            "energy_report.json",
            "energy_report.txt",
            "spectrum_comparison.csv",
            "manifest.json",
        ):
            assert (out_dir / name).is_file()
        comparison = (out_dir / "spectrum_comparison.csv").read_text().splitlines()
        assert comparison[0] == "xi,signal_abs,components_abs_sum"
        assert len(comparison) == s.n + 1

    def test_manifest_contents(self, tmp_path, capsys, signal_file):
        path, _ = signal_file
        out_dir = tmp_path / "dec"
        run_cli(capsys, ["decompose", path, "--halfwidths", "2", "--out-dir", str(out_dir)])
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["command"] == "decompose"
        assert manifest["parameters"]["halfwidths"] == [2]
        assert manifest["inputs"] == [path]
        assert set(manifest["outputs"]) == {
            "decomposition.json",
            "energy_report.json",
            "energy_report.txt",
            "spectrum_comparison.csv",
        }

    def test_deterministic_outputs(self, tmp_path, capsys, signal_file):
        path, _ = signal_file
        dirs = [tmp_path / "a", tmp_path / "b"]
        for d in dirs:
            run_cli(capsys, ["decompose", path, "--halfwidths", "3,9", "--out-dir", str(d)])
        for name in ("decomposition.json", "energy_report.json", "spectrum_comparison.csv"):
            assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()

    def test_bad_schedule_exit_code(self, tmp_path, capsys, signal_file):
        path, _ = signal_file
        code, _, err = run_cli(
            capsys, ["decompose", path, "--halfwidths", "9,3", "--out-dir", str(tmp_path / "x")]
        )
        assert code == 1
        assert "error" in err


class TestAudit:
    def test_round_trip_confirms_decomposition(self, tmp_path, capsys, signal_file):
        path, _ = signal_file
        out_dir = tmp_path / "dec"
        _, dec_out, _ = run_cli(
            capsys, ["decompose", path, "--halfwidths", "3,9", "--out-dir", str(out_dir)]
        )
        dec_report = json.loads(dec_out)
        code, out, _ = run_cli(capsys, ["audit", str(out_dir / "decomposition.json")])
        assert code == 0
        audit_report = json.loads(out)
        assert audit_report["conserved"] is True
        assert audit_report["total_energy"] == pytest.approx(
            dec_report["total_energy"], rel=1e-12
        )
        assert audit_report["component_energies"] == pytest.approx(
            dec_report["component_energies"], rel=1e-12
        )

    def test_flags_energy_leak(self, tmp_path, capsys):
        rng = np.random.default_rng(1)
        f = rng.standard_normal(32)
        doc = {
            "components": [list(f), list(-f)],
            "trend": list(rng.standard_normal(32)),
        }
        path = tmp_path / "dec.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run_cli(capsys, ["audit", str(path)])
        assert code == 0
        report = json.loads(out)
        assert report["conserved"] is False
        assert report["unwanted_frequencies"]

    def test_malformed_json_exit_code(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run_cli(capsys, ["audit", str(path)])
        assert code == 1
        assert "error" in err

    def test_missing_keys_exit_code(self, tmp_path, capsys):
        path = tmp_path / "empty.json"
        path.write_text("{}")
        code, _, _ = run_cli(capsys, ["audit", str(path)])
        assert code == 1


class TestPrecondBench:
    def write_config(self, tmp_path, doc):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(doc))
        return str(path)

    def test_small_benchmark(self, tmp_path, capsys):
        cfg = self.write_config(
            tmp_path,
            {"alpha": 1, "beta": 2, "gamma": 3, "n_list": [100], "p_list": [1.0]},
        )
        out_dir = tmp_path / "bench"
        code, out, _ = run_cli(
            capsys, ["precond-bench", "--config", cfg, "--out-dir", str(out_dir)]
        )
        assert code == 0
        table = (out_dir / "table.csv").read_text().splitlines()
        assert table[0].split(",") == ["n", "p=1", "n. p."]
        assert table[1].split(",")[0] == "100"
        assert table[1].split(",")[1] == "3"
        assert (out_dir / "spectra" / "spectrum_n100_p1.csv").is_file()
        assert "n. p." in out  # stdout carries the markdown table
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["command"] == "precond-bench"
        assert manifest["parameters"]["n_list"] == [100]

    def test_workers_do_not_change_results(self, tmp_path, capsys):
        cfg = self.write_config(
            tmp_path,
            {"alpha": 1, "beta": 2, "gamma": 3, "n_list": [64, 100], "p_list": [1.0, 2.0]},
        )
        tables = []
        for workers, d in ((1, "w1"), (4, "w4")):
            out_dir = tmp_path / d
            run_cli(
                capsys,
                [
                    "precond-bench", "--config", cfg,
                    "--out-dir", str(out_dir), "--workers", str(workers),
                ],
            )
            tables.append((out_dir / "table.csv").read_text())
        assert tables[0] == tables[1]

    def test_correction_override(self, tmp_path, capsys):
        cfg = self.write_config(
            tmp_path,
            {"alpha": 0, "beta": 2, "gamma": 8, "n_list": [100], "p_list": [1.0]},
        )
        out_raw = tmp_path / "raw"
        run_cli(capsys, ["precond-bench", "--config", cfg, "--out-dir", str(out_raw)])
        raw_cell = (out_raw / "table.csv").read_text().splitlines()[1].split(",")[1]
        assert raw_cell == "#"
        out_fixed = tmp_path / "fixed"
        run_cli(
            capsys,
            ["precond-bench", "--config", cfg, "--out-dir", str(out_fixed), "--correction", "on"],
        )
        fixed_cell = (out_fixed / "table.csv").read_text().splitlines()[1].split(",")[1]
        assert fixed_cell != "#"
        assert int(fixed_cell) > 0

    def test_tol_override_changes_counts(self, tmp_path, capsys):
        cfg = self.write_config(
            tmp_path,
            {"alpha": 1, "beta": 2, "gamma": 3, "n_list": [100], "p_list": [10.0]},
        )
        counts = {}
        for tol, d in ((None, "tight"), (1e-4, "loose")):
            out_dir = tmp_path / d
            argv = ["precond-bench", "--config", cfg, "--out-dir", str(out_dir)]
            if tol is not None:
                argv += ["--tol", str(tol)]
            run_cli(capsys, argv)
            counts[d] = int((out_dir / "table.csv").read_text().splitlines()[1].split(",")[1])
        assert counts["loose"] < counts["tight"]

    def test_bad_config_exit_code(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path, {"alpha": 1, "beta": 2})
        code, _, err = run_cli(
            capsys, ["precond-bench", "--config", cfg, "--out-dir", str(tmp_path / "x")]
        )
        assert code == 1
        assert "error" in err


class TestSpectrum:
    def test_diagnostic_summary(self, tmp_path, capsys):
        out_dir = tmp_path / "spec"
        code, out, _ = run_cli(
            capsys,
            [
                "spectrum", "--alpha", "0", "--beta", "2", "--gamma", "8",
                "--n", "64", "--p", "1.6", "--out-dir", str(out_dir),
            ],
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["corrected"] is False
        assert doc["min_eigenvalue"] > 0
        assert doc["negative_eigenvalue_count"] == 0
        assert doc["cluster_fractions"] is not None
        assert (out_dir / "circulant_spectrum.csv").is_file()
        assert (out_dir / "preconditioned_spectrum.csv").is_file()

    def test_correction_flag(self, tmp_path, capsys):
        out_dir = tmp_path / "spec"
        code, out, _ = run_cli(
            capsys,
            [
                "spectrum", "--alpha", "0", "--beta", "2", "--gamma", "8",
                "--n", "64", "--p", "1", "--correction", "on", "--out-dir", str(out_dir),
            ],
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["corrected"] is True
        assert doc["min_eigenvalue"] > 0

    def test_large_n_skips_dense_diagnostic(self, tmp_path, capsys):
        out_dir = tmp_path / "spec"
        code, out, _ = run_cli(
            capsys,
            [
                "spectrum", "--alpha", "1", "--beta", "2", "--gamma", "3",
                "--n", "300", "--p", "2", "--out-dir", str(out_dir),
            ],
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["cluster_fractions"] is None
        assert not (out_dir / "preconditioned_spectrum.csv").exists()


class TestTopLevel:
    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["--version"])
        assert excinfo.value.code == 0
        assert "lportho" in capsys.readouterr().out

    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit):
            main(["frobnicate"])
