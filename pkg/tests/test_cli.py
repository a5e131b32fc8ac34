import csv
import json
import subprocess
import sys

import pytest

from continuum_otto import io
from continuum_otto.cli import run_command
from continuum_otto.cycle import run_cycle
from continuum_otto.sweep import Axis, fig3_surface


@pytest.fixture
def default_config(tmp_path):
    path = tmp_path / "default.json"
    path.write_text("{}", encoding="utf-8")
    return str(path)


def _data_rows(text):
    return [r for r in csv.reader(line for line in text.splitlines() if not line.startswith("#"))]


class TestCycle:
    def test_table(self, default_config, capsys):
        assert run_command(["cycle", "--config", default_config]) == 0
        out = capsys.readouterr().out
        assert "net_work        0.1177170062" in out
        assert "eta             0.2703440771" in out
        branch_rows = [l.split() for l in out.splitlines() if l.strip()[:1] in "1234" and len(l.split()) == 4]
        assert [r[0] for r in branch_rows] == ["1", "2", "3", "4"]
        heats = sum(float(r[3]) for r in branch_rows)
        works = sum(float(r[2]) for r in branch_rows)
        assert heats == pytest.approx(works, abs=1e-9)

    def test_csv_output(self, default_config, tmp_path, capsys):
        out = tmp_path / "cycle.csv"
        assert run_command(["cycle", "--config", default_config, "--out", str(out)]) == 0
        rows = dict(_data_rows(out.read_text())[1:])
        assert float(rows["net_work"]) == pytest.approx(0.11771700623084776, rel=1e-15)
        assert "branch_4.heat_in" in rows

    def test_json_output(self, default_config, tmp_path, capsys):
        out = tmp_path / "cycle.json"
        assert run_command(["cycle", "--config", default_config, "--out", str(out), "--format", "json"]) == 0
        doc = json.loads(out.read_text())
        assert doc["mode"] == "free"
        assert len(doc["branches"]) == 4
        assert doc["efficiency"] == pytest.approx(0.27034407708608466, rel=1e-14)

    def test_kt_scale_rescales_output_only(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text('{"kt_l": 2.0}', encoding="utf-8")
        out = tmp_path / "cycle.csv"
        assert run_command(["cycle", "--config", str(cfg), "--out", str(out)]) == 0
        rows = dict(_data_rows(out.read_text())[1:])
        assert float(rows["net_work"]) == pytest.approx(2 * 0.11771700623084776, rel=1e-15)
        assert float(rows["efficiency"]) == pytest.approx(0.27034407708608466, rel=1e-14)


class TestFig3:
    def test_default_grid(self, tmp_path, capsys):
        out = tmp_path / "grid.csv"
        assert run_command(["fig3", "--out", str(out)]) == 0
        text = out.read_text()
        rows = _data_rows(text)
        assert rows[0] == ["delta_h", "delta_l", "work_diff", "status"]
        assert len(rows) == 1 + 101 * 101
        diag = [r for r in rows[1:] if r[0] == r[1]]
        assert len(diag) == 101 and all(r[2] == "0" for r in diag)
        notes = [l for l in text.splitlines() if l.startswith("# ")]
        assert any("delta_h=0.1" in n for n in notes) and any("delta_h=4.5" in n for n in notes)

    def test_equilibrium_config_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text('{"mode": "equilibrium"}', encoding="utf-8")
        assert run_command(["fig3", "--config", str(cfg), "--out", str(tmp_path / "g.csv")]) == 2

    def test_json_mirror(self, tmp_path, capsys):
        out = tmp_path / "grid.json"
        assert run_command(["fig3", "--out", str(out), "--format", "json"]) == 0
        doc = json.loads(out.read_text())
        assert doc["columns"] == ["delta_h", "delta_l", "work_diff", "status"]
        assert len(doc["rows"]) == 101 * 101
        assert doc["annotations"]


class TestSweep:
    def test_sweep(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"sweep": {"axes": [
            {"param": "delta_h", "min": 0.5, "max": 3.0, "count": 4},
            {"param": "t_hot", "min": 2.0, "max": 6.0, "count": 3},
        ]}}), encoding="utf-8")
        out = tmp_path / "s.csv"
        assert run_command(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
        text = out.read_text()
        rows = _data_rows(text)
        assert rows[0] == ["delta_h", "t_hot", "net_work", "heat_in", "heat_out", "efficiency", "work_diff", "status"]
        assert len(rows) == 13
        assert "# best net_work: " in text

    def test_requires_out(self, default_config, capsys):
        assert run_command(["sweep", "--config", default_config]) == 2


class TestVerify:
    def test_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run_command(["verify", "--samples", "10", "--seed", "7", "--report", str(a)]) == 0
        assert run_command(["verify", "--samples", "10", "--seed", "7", "--report", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        doc = json.loads(a.read_text())
        assert doc["passed"] and doc["battery"]["samples"] == 10
        assert doc["limits"]["high_temperature_gap_note"] == "reported, not asserted"

    def test_seed_matters(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run_command(["verify", "--samples", "3", "--seed", "1", "--report", str(a)])
        run_command(["verify", "--samples", "3", "--seed", "2", "--report", str(b)])
        assert a.read_bytes() != b.read_bytes()

    def test_failure_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text('{"tolerances": {"match": 1e-30}}', encoding="utf-8")
        report = tmp_path / "r.json"
        assert run_command(["verify", "--config", str(cfg), "--samples", "2", "--report", str(report)]) == 1
        assert str(report) in capsys.readouterr().err


class TestUsage:
    @pytest.mark.parametrize(
        "argv",
        [[], ["bogus"], ["cycle"], ["fig3", "--out", "x", "--bogus"], ["verify", "--samples", "many"]],
    )
    def test_usage_errors(self, argv, capsys):
        assert run_command(argv) == 2
        assert "usage" in capsys.readouterr().err

    def test_bad_config(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text('{"cold": {"rho": 5}}', encoding="utf-8")
        assert run_command(["cycle", "--config", str(cfg)]) == 2
        assert "rho_h * broadening_h must equal" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        assert run_command(["cycle", "--config", str(tmp_path / "nope.json")]) == 2

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "continuum_otto", "bogus"], capture_output=True, text=True)
        assert proc.returncode == 2
        assert "usage" in proc.stderr


class TestWriters:
    def test_seventeen_digits(self):
        assert io.fmt(0.1) == "0.10000000000000001"
        assert io.fmt(float("nan")) == "nan"
        assert io.fmt(None) == "nan"

    def test_grid_csv_stable(self):
        axes = dict(axis_h=Axis("delta_h", 0.5, 1.5, 3), axis_l=Axis("delta_l", 0.5, 1.5, 3))
        assert io.grid_to_csv(fig3_surface(**axes)) == io.grid_to_csv(fig3_surface(**axes))

    def test_cycle_csv_undefined_efficiency(self, fig3_spec):
        from continuum_otto.model import CycleSpec, PopulationEndpoints

        s = fig3_spec.hot
        r = run_cycle(CycleSpec(s, s, 2.0, 2.0), PopulationEndpoints(0.4, 0.4))
        rows = dict(_data_rows(io.cycle_to_csv(r))[1:])
        assert rows["efficiency"] == "nan"
        assert json.loads(io.cycle_to_json(r))["efficiency"] is None
