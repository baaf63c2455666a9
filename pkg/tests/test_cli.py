import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

import repscan as rs
from repscan.cli import main


@pytest.fixture()
def gauss_file(tmp_path):
    path = tmp_path / "gauss.grid.json"
    rc = main(["state", "gaussian", "--grid=-12,12,2048", "--var", "1.0", "--out", str(path)])
    assert rc == 0
    return path


@pytest.fixture()
def cat_wave_file(tmp_path):
    path = tmp_path / "cat.grid.json"
    rc = main(
        ["state", "cat", "--nu", "1", "--alpha", "5", "--grid=-24,24,4096",
         "--wavefunction", "--out", str(path)]
    )
    assert rc == 0
    return path


class TestStateGeneration:
    def test_gaussian_file_matches_library(self, gauss_file, grid1d):
        d = rs.load_grid(gauss_file)
        expected = rs.gaussian_density(grid1d, 0.0, 1.0)
        assert np.array_equal(d.values, expected.values)

    def test_uniform_state(self, tmp_path):
        path = tmp_path / "u.grid.json"
        assert main(["state", "uniform", "--grid=0,1,1025", "--box", "0,1",
                     "--out", str(path)]) == 0
        d = rs.load_grid(path)
        assert np.allclose(d.values, 1.0)

    def test_cat_wavefunction_kind(self, cat_wave_file):
        w = rs.load_grid(cat_wave_file)
        assert isinstance(w, rs.WaveFunction)
        assert w.hbar == 1.0


class TestEntropyCommand:
    def test_matches_library_bit_for_bit(self, gauss_file, gauss1, capsys):
        assert main(["entropy", "--in", str(gauss_file), "--q", "2", "--base", "nats"]) == 0
        out = capsys.readouterr().out.strip()
        assert out == format(rs.renyi_entropy(gauss1, 2.0).value, ".17g")

    def test_bits_base(self, gauss_file, gauss1, capsys):
        assert main(["entropy", "--in", str(gauss_file), "--q", "2", "--base", "bits"]) == 0
        out = capsys.readouterr().out.strip()
        assert out == format(rs.renyi_entropy(gauss1, 2.0, "bits").value, ".17g")


class TestPowerCurveCommand:
    def test_csv_matches_library(self, gauss_file, gauss1, tmp_path, capsys):
        out = tmp_path / "curve.csv"
        assert main(["power-curve", "--in", str(gauss_file), "--delta", "0.01",
                     "--m", "6", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "k,order,N"
        assert len(lines) == 7
        for k, line in enumerate(lines[1:]):
            fields = line.split(",")
            assert fields[0] == str(k)
            expected = rs.renyi_entropy_power(gauss1, 1.0 + 0.01 * k)
            assert fields[2] == format(expected, ".17g")

    def test_thread_env_does_not_change_bytes(self, gauss_file, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        old = os.environ.get("REPSCAN_THREADS")
        try:
            os.environ["REPSCAN_THREADS"] = "1"
            main(["power-curve", "--in", str(gauss_file), "--m", "6", "--out", str(a)])
            os.environ["REPSCAN_THREADS"] = "3"
            main(["power-curve", "--in", str(gauss_file), "--m", "6", "--out", str(b)])
        finally:
            if old is None:
                os.environ.pop("REPSCAN_THREADS", None)
            else:
                os.environ["REPSCAN_THREADS"] = old
        assert a.read_bytes() == b.read_bytes()


class TestCumulantsCommand:
    def test_json_matches_library(self, gauss_file, gauss1, tmp_path):
        out = tmp_path / "k.json"
        assert main(["cumulants", "--in", str(gauss_file), "--delta", "0.01",
                     "--m", "5", "--method", "gldf", "--json", str(out)]) == 0
        doc = json.loads(out.read_text())
        curve = rs.entropy_power_curve(gauss1, 0.01, 5)
        expected = rs.cumulants_from_powers(curve, 5)
        assert doc["source"] == "gldf"
        assert doc["kappa"] == list(expected.values)

    def test_direct_method(self, gauss_file, tmp_path):
        out = tmp_path / "kd.json"
        assert main(["cumulants", "--in", str(gauss_file), "--m", "4",
                     "--method", "direct", "--json", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["source"] == "direct" and doc["delta"] is None
        assert len(doc["kappa"]) == 4


class TestInfodistCommand:
    def test_csv_schema(self, gauss_file, tmp_path):
        out = tmp_path / "g.csv"
        assert main(["infodist", "--in", str(gauss_file), "--bins", "64",
                     "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "center_bits,density"
        assert len(lines) == 65


class TestCheckMomentCommand:
    def test_satisfied(self, gauss_file, capsys):
        assert main(["check-moment", "--in", str(gauss_file), "--p", "1.5"]) == 0
        assert "satisfied=True" in capsys.readouterr().out


class TestVerifyCommand:
    def test_iso_report(self, gauss_file, tmp_path, capsys):
        report = tmp_path / "report.json"
        rc = main(["verify", "--in", str(gauss_file), "--suite", "iso", "--q", "2",
                   "--json", str(report)])
        assert rc == 0
        doc = json.loads(report.read_text())
        assert len(doc) == 1
        entry = doc[0]
        assert set(entry) == {"name", "lhs", "rhs", "satisfied", "slack", "saturated"}
        assert entry["name"] == "isoperimetric" and entry["satisfied"] is True
        assert entry["lhs"] == pytest.approx(2.0, abs=1e-3)

    def test_repur_on_wavefunction(self, cat_wave_file, capsys):
        assert main(["verify", "--in", str(cat_wave_file), "--suite", "repur",
                     "--p", "2"]) == 0
        assert "repur" in capsys.readouterr().out

    def test_wave_suite_rejects_density(self, gauss_file, capsys):
        assert main(["verify", "--in", str(gauss_file), "--suite", "stam"]) == 2

    def test_all_suite_on_wavefunction(self, cat_wave_file, tmp_path):
        report = tmp_path / "all.json"
        assert main(["verify", "--in", str(cat_wave_file), "--suite", "all",
                     "--q", "1.5", "--json", str(report)]) == 0
        names = [e["name"] for e in json.loads(report.read_text())]
        assert names == ["de_bruijn", "isoperimetric", "cramer_rao", "epi", "stam", "repur"]


class TestScanCommand:
    def test_report_matches_library(self, tmp_path):
        state = tmp_path / "ucs.grid.json"
        main(["state", "cat", "--nu", "0.97", "--alpha", "10", "--grid=-8,22,2048",
              "--out", str(state)])
        report = tmp_path / "scan.json"
        truth = tmp_path / "g.csv"
        recon = tmp_path / "recon.csv"
        rc = main(["scan", "--in", str(state), "--delta", "0.01", "--m", "5",
                   "--method", "edgeworth", "--out", str(recon), "--truth", str(truth),
                   "--report", str(report)])
        assert rc == 0
        doc = json.loads(report.read_text())
        ucs = rs.load_grid(state)
        expected = rs.scan(ucs, 0.01, 5, "edgeworth")
        assert doc["l1"] == expected.l1
        assert doc["kappa"] == list(expected.series.kappa.values)
        assert truth.read_text().splitlines()[0] == "center_bits,density"
        assert recon.read_text().splitlines()[0] == "x_bits,value"


class TestExitCodes:
    def test_unknown_flag_exits_two(self):
        with pytest.raises(SystemExit) as err:
            main(["entropy", "--in", "x.grid.json", "--frobnicate"])
        assert err.value.code == 2

    def test_unknown_command_exits_two_in_subprocess(self):
        proc = subprocess.run(
            [sys.executable, "-m", "repscan.cli", "no-such-command"],
            capture_output=True,
        )
        assert proc.returncode == 2

    def test_computation_error_exits_one(self, tmp_path, capsys):
        path = tmp_path / "cat.grid.json"
        rc = main(["state", "cat", "--nu", "0.97", "--alpha", "10",
                   "--grid=-12,12,2048", "--out", str(path)])
        assert rc == 1
        assert "SupportExceedsGrid" in capsys.readouterr().err

    def test_malformed_grid_exits_two(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as err:
            main(["state", "gaussian", "--grid", "oops", "--out", str(tmp_path / "x")])
        assert err.value.code == 2
        assert "min,max,count" in capsys.readouterr().err
