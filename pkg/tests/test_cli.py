"""Command line behavior: exit codes, outputs, stream discipline."""

import json
import subprocess
import sys

import pytest

from topdc.cli import main
from topdc.presets import load_preset_dict, preset_names

pytestmark = pytest.mark.usefixtures("tmp_path")


def small_config_file(tmp_path, name="cfg.json", **edits):
    d = load_preset_dict("ideal-waveguide")
    d["grid"] = {"n_points": 41}
    d.pop("detection", None)
    d.update(edits)
    path = tmp_path / name
    path.write_text(json.dumps(d))
    return path


class TestRunCommand:
    def test_preset_run(self, tmp_path, capsys):
        code = main(["run", "--preset", "ideal-waveguide", "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "summary.json").exists()
        captured = capsys.readouterr()
        assert captured.out == ""  # progress goes to stderr only
        assert "run complete" in captured.err

    def test_config_run(self, tmp_path):
        cfg = small_config_file(tmp_path)
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["schmidt_number"] > 1.0

    def test_config_and_preset_conflict(self, tmp_path):
        cfg = small_config_file(tmp_path)
        code = main(["run", "--config", str(cfg), "--preset", "ideal-waveguide",
                     "--out", str(tmp_path)])
        assert code == 2

    def test_neither_source_given(self, tmp_path):
        assert main(["run", "--out", str(tmp_path)]) == 2

    def test_missing_config_file(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "nope.json")]) == 2

    def test_invalid_config_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{oops")
        assert main(["run", "--config", str(bad)]) == 2

    def test_numeric_failure_exit_code(self, tmp_path):
        # window far outside the pump envelope: every kernel entry underflows
        d = load_preset_dict("ideal-waveguide")
        d.pop("detection", None)
        center = d["source"]["pump_dispersion"]["center_omega_rad_s"] / 3.0
        sigma = d["source"]["pump_pulse"]["sigma_rad_s"]
        d["grid"] = {"n_points": 21,
                     "window": [center + 14.0 * sigma, center + 15.0 * sigma]}
        cfg = tmp_path / "far.json"
        cfg.write_text(json.dumps(d))
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == 3

    def test_figures_flag_is_safe_without_renderer(self, tmp_path, capsys):
        cfg = small_config_file(tmp_path)
        out = tmp_path / "out"
        code = main(["run", "--config", str(cfg), "--out", str(out), "--figures"])
        assert code == 0
        err = capsys.readouterr().err
        try:
            import topdc_figures  # noqa: F401
        except ImportError:
            assert "topdc-figures" in err
        else:
            assert "figure:" in err


class TestSweepCommand:
    def test_values_from_flags(self, tmp_path, capsys):
        cfg = small_config_file(tmp_path)
        out = tmp_path / "sweep"
        code = main(["sweep", "--config", str(cfg), "--param", "pump_sigma",
                     "--values", "0.9,1.1", "--out", str(out)])
        assert code == 0
        text = (out / "sweep.csv").read_text()
        assert text.splitlines()[0] == "value,schmidt_number,error"
        assert len(text.splitlines()) == 3
        assert "sweep complete: 2 points, 0 failed" in capsys.readouterr().err

    def test_values_from_config_section(self, tmp_path):
        cfg = small_config_file(tmp_path, sweep={"parameter": "pump_sigma",
                                                 "values": [1.0]})
        out = tmp_path / "sweep"
        assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
        assert len((out / "sweep.csv").read_text().splitlines()) == 2

    def test_no_param_anywhere(self, tmp_path):
        cfg = small_config_file(tmp_path)
        assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 2

    def test_bad_values_string(self, tmp_path):
        cfg = small_config_file(tmp_path)
        code = main(["sweep", "--config", str(cfg), "--param", "pump_sigma",
                     "--values", "1.0,zap", "--out", str(tmp_path)])
        assert code == 2

    def test_wrong_source_kind(self, tmp_path):
        d = load_preset_dict("ring-equal-q")
        d["grid"] = {"n_points": 21}
        cfg = tmp_path / "ring.json"
        cfg.write_text(json.dumps(d))
        code = main(["sweep", "--config", str(cfg), "--param", "pump_sigma",
                     "--values", "1.0", "--out", str(tmp_path)])
        assert code == 2


class TestPresetsCommand:
    def test_list(self, capsys):
        assert main(["presets", "list"]) == 0
        assert capsys.readouterr().out.split() == list(preset_names())

    def test_show(self, capsys):
        assert main(["presets", "show", "ideal-waveguide"]) == 0
        shown = json.loads(capsys.readouterr().out)
        assert shown == load_preset_dict("ideal-waveguide")

    def test_show_needs_name(self):
        assert main(["presets", "show"]) == 2

    def test_show_unknown(self):
        assert main(["presets", "show", "nonesuch"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "topdc", "presets", "list"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert proc.stdout.split() == list(preset_names())
