import json
import math
import subprocess
import sys

import numpy as np
import pytest

from conftest import critical_csv_text
from xpmbounds.cli import run


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    assert code == 0, out
    return json.loads(out)


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0], [line.split(",") for line in lines[1:]]


class TestMetrics:
    def test_normalized_two_pole(self, capsys):
        summary = run_json(capsys, ["metrics", "--two-pole", "--gamma-norm", "2"])
        assert summary["tool"] == "xpmbounds"
        assert summary["subcommand"] == "metrics"
        assert "version" in summary and "wall_time_s" in summary
        assert summary["inputs"]["gamma_norm"] == 2.0
        assert summary["omega0_th"] == pytest.approx(math.sqrt(3.0) / 2.0, abs=1e-12)
        assert summary["him_l1_norm"] == pytest.approx(2.0, abs=1e-8)
        assert summary["fmax"] == pytest.approx(
            (2.0 + math.exp(-math.sqrt(3.0) / 2.0)) / 3.0, rel=1e-12
        )

    def test_absolute_two_pole(self, capsys):
        summary = run_json(
            capsys,
            ["metrics", "--two-pole", "--gamma-norm", "2", "--omega0", "1e15"],
        )
        assert summary["t_h_fs"] == pytest.approx(math.sqrt(3.0) / 2.0, rel=1e-12)
        assert summary["him_l1_rad_per_s"] == pytest.approx(2e15, rel=1e-8)

    def test_response_file(self, capsys, tmp_path):
        data = tmp_path / "resp.csv"
        data.write_text(critical_csv_text())
        summary = run_json(capsys, ["metrics", "--response-file", str(data)])
        assert summary["t_h_fs"] == pytest.approx(math.sqrt(3.0) / 2.0, rel=1e-5)
        assert summary["him_l1_rad_per_s"] == pytest.approx(2e15, rel=1e-3)


class TestFmaxSweep:
    def test_csv_contract_and_peak(self, capsys, tmp_path):
        out = tmp_path / "sweep.csv"
        summary = run_json(capsys, [
            "fmax-sweep", "--gamma-min", "0.1", "--gamma-max", "10",
            "--points", "50", "--log", "--output", str(out),
        ])
        header, rows = read_csv(out)
        assert header == "gamma_norm,omega0_th,him_l1_norm,fmax"
        assert len(rows) == 50
        assert summary["rows"] == 50
        assert 0.79 < summary["peak_fmax"] < 0.82

    def test_deterministic_output(self, capsys, tmp_path):
        args = ["fmax-sweep", "--gamma-min", "0.5", "--gamma-max", "5",
                "--points", "20"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_json(capsys, args + ["--output", str(a)])
        run_json(capsys, args + ["--output", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestHeatmap:
    def test_csv_row_major_and_peak(self, capsys, tmp_path):
        out = tmp_path / "hm.csv"
        summary = run_json(capsys, [
            "heatmap", "--two-pole", "--gamma-norm", "2", "--omega0", "1e15",
            "--phi-points", "8", "--walkoff-points", "6",
            "--phi-max", str(2 * math.pi), "--output", str(out),
        ])
        header, rows = read_csv(out)
        assert header == "phi_rad,walkoff_fs,f1max"
        assert len(rows) == 48
        # row-major: phi outer, walk-off inner
        phis = [float(r[0]) for r in rows]
        assert phis[:6] == [0.0] * 6
        walk = [float(r[1]) for r in rows[:6]]
        assert walk == sorted(walk)
        assert summary["peak_f1max"] >= max(float(r[2]) for r in rows) - 1e-12
        assert summary["peak_refined"] is True
        assert summary["cells"] == 48

    def test_missing_response_file_exits_3(self, capsys):
        code = run(["heatmap", "--response-file", "raman.csv"])
        err = capsys.readouterr().err
        assert code == 3
        assert "raman.csv" in err

    def test_gaussian_needs_width(self, capsys):
        code = run(["heatmap", "--two-pole", "--gamma-norm", "2",
                    "--omega0", "1e15", "--pulse", "gaussian"])
        assert code == 2
        assert "t-psi-fs" in capsys.readouterr().err

    def test_normalized_mode_rejected(self, capsys):
        code = run(["heatmap", "--two-pole", "--gamma-norm", "2"])
        assert code == 2
        assert "--omega0" in capsys.readouterr().err


class TestPhaseProfile:
    def test_uniform_geometry_profile(self, capsys, tmp_path):
        out = tmp_path / "prof.csv"
        # normalized-unit response with omega0 so times are fs-scale
        summary = run_json(capsys, [
            "phase-profile", "--two-pole", "--gamma-norm", "2",
            "--omega0", "1e15",
            "--phi-rad", str(math.pi), "--walkoff-fs", "60", "--delay-fs", "30",
            "--pulse", "dirac",
            "--t-min-fs", "-10", "--t-max-fs", "10", "--t-points", "21",
            "--output", str(out),
        ])
        header, rows = read_csv(out)
        assert header == "t_fs,re,im,arg_rad,abs"
        assert len(rows) == 21
        assert summary["min_abs"] == pytest.approx(1.0, abs=1e-9)
        for r in rows:
            assert float(r[4]) == pytest.approx(1.0, abs=1e-9)

    def test_raw_geometry_flags(self, capsys, tmp_path):
        out = tmp_path / "prof.csv"
        summary = run_json(capsys, [
            "phase-profile", "--two-pole", "--gamma-norm", "2",
            "--omega0", "1e15",
            "--eta", "1.57e-8", "--length-m", "0.01",
            "--v-a", "1.0e8", "--v-b", "2.0e8",
            "--t-min-fs", "-5", "--t-max-fs", "5", "--t-points", "5",
            "--output", str(out),
        ])
        u = 1.0 / (1.0 / 1.0e8 - 1.0 / 2.0e8)
        assert summary["phi"] == pytest.approx(1.57e-8 * u)
        assert summary["walkoff_fs"] == pytest.approx(0.01 / u / 1e-15)

    def test_mixed_geometry_rejected(self, capsys):
        code = run([
            "phase-profile", "--two-pole", "--gamma-norm", "2",
            "--omega0", "1e15", "--phi-rad", "1.0", "--walkoff-fs", "10",
            "--eta", "1.0", "--length-m", "1.0", "--v-a", "1e8", "--v-b", "2e8",
            "--t-min-fs", "0", "--t-max-fs", "1",
        ])
        assert code == 2


class TestPmp:
    def test_cascade_csv_and_invariance(self, capsys, tmp_path):
        out = tmp_path / "pmp.csv"
        summary = run_json(capsys, [
            "pmp", "--two-pole", "--gamma-norm", "2",
            "--n-cells", "1,2,10,100", "--output", str(out),
        ])
        header, rows = read_csv(out)
        assert header == "n_cells,per_cell_phi_rad,bound"
        bounds = [float(r[2]) for r in rows]
        assert max(bounds) - min(bounds) < 1e-12
        assert summary["max_spread"] < 1e-12
        assert summary["bound"] == pytest.approx(summary["fmax"], abs=1e-12)

    def test_bad_cell_list(self, capsys):
        code = run(["pmp", "--two-pole", "--gamma-norm", "2",
                    "--n-cells", "1,two"])
        assert code == 2


class TestMcValidate:
    ARGS = [
        "mc-validate", "--two-pole", "--gamma-norm", "2",
        "--phi-rad", str(math.pi), "--walkoff-norm", str(math.sqrt(3.0)),
        "--realizations", "3000", "--bins", "512", "--seed", "42",
    ]

    def test_json_fields_and_pass(self, capsys):
        summary = run_json(capsys, self.ARGS)
        for field in ("analytic", "estimate_re", "estimate_im", "stderr",
                      "n_realizations", "pass"):
            assert field in summary
        assert summary["n_realizations"] == 3000
        assert summary["analytic"] == pytest.approx(
            math.exp(-math.sqrt(3.0) / 2.0), rel=1e-9
        )
        assert abs(summary["analytic"] - summary["estimate_re"]) < 4 * summary["stderr"]

    def test_seed_reproducibility(self, capsys):
        a = run_json(capsys, self.ARGS)
        b = run_json(capsys, self.ARGS)
        for field in ("analytic", "estimate_re", "estimate_im", "stderr"):
            assert a[field] == b[field]

    def test_ensemble_dump(self, capsys, tmp_path):
        dump = tmp_path / "ens.csv"
        run_json(capsys, self.ARGS[:-2] + ["--seed", "1", "--realizations", "5",
                                           "--dump-ensemble", str(dump)])
        lines = dump.read_text().splitlines()
        assert lines[0] == "realization,t_fs,xi_rad"
        assert len(lines) == 1 + 5 * 8

    def test_walkoff_fs_rejected_in_normalized_mode(self, capsys):
        code = run(["mc-validate", "--two-pole", "--gamma-norm", "2",
                    "--phi-rad", "3.14", "--walkoff-fs", "10"])
        assert code == 2
        assert "walkoff-norm" in capsys.readouterr().err


class TestErrorMapping:
    def test_no_arguments_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            run([])
        assert exc.value.code == 2

    def test_both_response_sources(self, capsys):
        code = run(["metrics", "--two-pole", "--gamma-norm", "2",
                    "--response-file", "x.csv"])
        assert code == 2
        assert "exactly one response source" in capsys.readouterr().err

    def test_neither_response_source(self, capsys):
        assert run(["metrics"]) == 2

    def test_bad_response_file_contents(self, capsys, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("t_fs,h\n0,0\n1,1\n")
        code = run(["metrics", "--response-file", str(bad)])
        assert code == 3
        assert "fewer than 8" in capsys.readouterr().err

    def test_convergence_error_maps_to_4(self, capsys, monkeypatch):
        import xpmbounds.cli as cli_mod
        from xpmbounds import ConvergenceError

        def boom(args):
            raise ConvergenceError("no convergence", estimate=0.5)

        monkeypatch.setitem(cli_mod.__dict__, "_cmd_metrics", boom)
        parser = cli_mod.build_parser()
        args = parser.parse_args(["metrics", "--two-pole", "--gamma-norm", "2"])
        args.func = boom
        monkeypatch.setattr(cli_mod, "build_parser", lambda: parser)
        monkeypatch.setattr(parser, "parse_args", lambda argv=None: args)
        assert cli_mod.run(["metrics", "--two-pole", "--gamma-norm", "2"]) == 4
        assert "convergence" in capsys.readouterr().err


def test_module_invocation_smoke(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "xpmbounds", "metrics", "--two-pole",
         "--gamma-norm", "2"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    summary = json.loads(proc.stdout)
    assert summary["omega0_th"] == pytest.approx(math.sqrt(3.0) / 2.0)


def test_version_flag():
    proc = subprocess.run(
        [sys.executable, "-m", "xpmbounds", "--version"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert "xpmbounds" in proc.stdout
