import json
import math

import pytest

from atmoqkd import cli
from atmoqkd.channel import Detector
from atmoqkd.config import ConfigError, parse_config, parse_quantity
from atmoqkd.engine import SweepResult, SweepRow
from atmoqkd.channel import Regime

MINIMAL = """
scenario:
  season: summer
sweep:
  distances: [1 km, 2 km]
  n_samples: 512
  seed: 3
"""


def write(tmp_path, text, name="run.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestConfig:
    def test_minimal_expands_preset(self):
        cfg = parse_config(MINIMAL)
        sc = cfg.scenarios["summer"]
        assert sc.cn2 == 2.12e-15
        assert sc.beam_waist == 0.08 and sc.aperture_radius == 0.11
        assert cfg.sweep.distances == (1e3, 2e3)
        assert cfg.sweep.detectors == (Detector.HOMODYNE,)

    def test_from_path(self, tmp_path):
        assert parse_config(write(tmp_path, MINIMAL)).sweep.seed == 3
        assert parse_config(str(write(tmp_path, MINIMAL))).sweep.seed == 3

    def test_units(self):
        assert parse_quantity("80 mm", "w", {"mm": 1e-3}) == pytest.approx(0.08)
        assert parse_quantity("1550nm", "w", {"nm": 1e-9}) == pytest.approx(1.55e-6)
        assert parse_quantity(3, "w") == 3.0
        with pytest.raises(ConfigError, match="unknown unit"):
            parse_quantity("3 parsecs", "w", {"m": 1.0})
        with pytest.raises(ConfigError):
            parse_quantity(True, "w")

    def test_range_distances(self):
        cfg = parse_config("scenario: {season: winter}\nsweep: {distances: {start: 1 km, stop: 3 km, step: 500 m}}")
        assert cfg.sweep.distances == (1e3, 1.5e3, 2e3, 2.5e3, 3e3)

    def test_custom_scenario_with_extinction(self):
        cfg = parse_config("""
scenario:
  cn2: 1e-15
  extinction: {mol_scatter: 1e-3, aer_scatter: 2e-3}
  distance: 5 km
""")
        sc = cfg.scenarios["custom"]
        assert cfg.sweep.distances == (5e3,)
        assert sc.extinction.total == pytest.approx(3e-6)

    def test_core_larger_than_aperture(self):
        with pytest.raises(ConfigError, match="fiber_core_diameter"):
            parse_config(MINIMAL.replace("season: summer", "season: summer\n  fiber_core_diameter: 0.5 m"))

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="'fooo'"):
            parse_config(MINIMAL.replace("season: summer", "season: summer\n  fooo: 1"))

    def test_empty_distances(self):
        with pytest.raises(ConfigError, match="must not be empty"):
            parse_config("scenario: {season: summer}\nsweep: {distances: []}")

    @pytest.mark.parametrize("text, match", [
        ("scenario: {season: monsoon}\nsweep: {distances: [1]}", "unknown preset"),
        ("scenario: {season: summer}\nsweep: {distances: [1], detectors: [photon]}", "unknown detector"),
        ("scenario: {season: summer}\nsweep: {distances: [1], n_samples: 0}", "n_samples"),
        ("scenario: {season: summer}\nsweep: {distances: [-1]}", "> 0"),
        ("scenario: {season: summer}\nsweep: {}", "required"),
        ("scenario: {season: summer}\nsweep: {distances: [1]}\noutput: {formats: [xml]}", "formats"),
        ("- a\n- b\n", "mapping"),
        ("scenario: [unclosed", "malformed"),
    ])
    def test_rejections(self, text, match):
        with pytest.raises(ConfigError, match=match):
            parse_config(text)

    def test_inherited_extinction_warns(self):
        cfg = parse_config("scenario: {season: spring}\nsweep: {distances: [1 km]}")
        assert any("extinction" in w for w in cfg.warnings)


def _row(L, K):
    return SweepRow(
        distance=L, detector=Detector.HOMODYNE, sigma1_sq=0.1 + 1e-17 * L, regime=Regime.WEAK,
        mean_T=1 / 3, mean_sqrtT=math.sqrt(1 / 3), var_sqrtT=2.2250738585072014e-308,
        P_interrupt=0.0, eps_theta=0.037, I_AB=math.pi, chi_BE=math.e, K=K, K_atm=K,
    )


class TestCsv:
    def test_exact_round_trip(self, tmp_path):
        res = SweepResult(rows=(_row(1000.0, 0.1 + 0.2), _row(1234.5678, -1e-300), _row(5e3, math.nan)))
        path = tmp_path / "s.csv"
        cli.write_sweep_csv(path, res)
        back = cli.read_sweep_csv(path)
        assert list(back[0]) == list(cli.CSV_COLUMNS)
        for row, rec in zip(res.rows, back):
            assert rec["L_m"] == row.distance and rec["mean_sqrtT"] == row.mean_sqrtT
            assert rec["var_sqrtT"] == row.var_sqrtT and rec["I_AB"] == row.I_AB
            assert rec["detector"] == "homodyne" and rec["regime"] == "weak"
        assert back[0]["K_atm"] == 0.1 + 0.2
        assert math.isnan(back[2]["K_atm"])


class TestCommands:
    def test_simulate(self, tmp_path, capsys):
        cfg = write(tmp_path, MINIMAL.replace("seed: 3", "seed: 3\n  detectors: [homodyne, heterodyne]")
                    + "output:\n  histograms: true\n")
        out = tmp_path / "out"
        assert cli.main(["simulate", str(cfg), "--out", str(out)]) == cli.EXIT_OK
        rows = cli.read_sweep_csv(out / "sweep_summer.csv")
        assert len(rows) == 4 and {r["detector"] for r in rows} == {"homodyne", "heterodyne"}
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["sweep"]["seed"] == 3 and meta["sweep"]["n_samples"] == 512
        assert meta["kernel_backend"] in ("cython", "python")
        assert meta["scenarios"]["summer"]["cn2"] == 2.12e-15
        assert "hist_summer_1000m.csv" in meta["files"]
        assert (out / "hist_summer_2000m.csv").read_text().startswith("bin_left,bin_right,density")
        assert meta["exit_status"] == 0 and meta["failed_rows"] == 0

    def test_metadata_lists_every_warning(self, tmp_path):
        cfg = write(tmp_path, "scenario: {season: [spring, winter]}\nsweep: {distances: [10 km], n_samples: 256}\n")
        out = tmp_path / "out"
        assert cli.main(["simulate", str(cfg), "--out", str(out)]) == 0
        meta = json.loads((out / "metadata.json").read_text())
        text = "\n".join(meta["warnings"])
        assert "extinction" in text
        assert "ModelValidityWarning" in text
        assert {"sweep_spring.csv", "sweep_winter.csv"} <= set(meta["files"])

    def test_overrides(self, tmp_path):
        cfg = write(tmp_path, MINIMAL)
        out = tmp_path / "o"
        assert cli.main(["simulate", str(cfg), "--out", str(out), "--seed", "9", "--samples", "100",
                         "--threads", "2"]) == 0
        meta = json.loads((out / "metadata.json").read_text())
        assert (meta["sweep"]["seed"], meta["sweep"]["n_samples"], meta["sweep"]["threads"]) == (9, 100, 2)

    def test_env_out_dir(self, tmp_path, monkeypatch):
        cfg = write(tmp_path, MINIMAL + "output:\n  directory: " + str(tmp_path / "from_config") + "\n")
        monkeypatch.setenv("ATMOQKD_OUT_DIR", str(tmp_path / "from_env"))
        assert cli.main(["simulate", str(cfg)]) == 0
        assert (tmp_path / "from_env" / "metadata.json").exists()
        assert not (tmp_path / "from_config").exists()

    def test_config_error_exit(self, tmp_path, capsys):
        cfg = write(tmp_path, MINIMAL.replace("season: summer", "season: summer\n  fooo: 1"))
        assert cli.main(["simulate", str(cfg)]) == cli.EXIT_CONFIG
        assert "fooo" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert cli.main(["validate", str(tmp_path / "nope.yaml")]) == cli.EXIT_CONFIG

    def test_bad_threads(self, tmp_path):
        assert cli.main(["simulate", str(write(tmp_path, MINIMAL)), "--threads", "0"]) == cli.EXIT_CONFIG

    def test_all_rows_failed(self, tmp_path, monkeypatch):
        from atmoqkd import engine

        def boom(*a, **k):
            raise ArithmeticError("forced")

        monkeypatch.setattr(engine, "evaluate_point", boom)
        out = tmp_path / "o"
        assert cli.main(["simulate", str(write(tmp_path, MINIMAL)), "--out", str(out)]) == cli.EXIT_ALL_FAILED
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["failed_rows"] == 2 and meta["errors"][0]["error"].endswith("forced")

    def test_validate(self, tmp_path, capsys):
        assert cli.main(["validate", str(write(tmp_path, MINIMAL))]) == 0
        assert "config OK" in capsys.readouterr().out

    def test_presets(self, capsys):
        assert cli.main(["presets", "list"]) == 0
        out = capsys.readouterr().out
        for season in ("spring", "summer", "autumn", "winter"):
            assert season in out
        assert "inherits" in out

    def test_shipped_configs_validate(self):
        from pathlib import Path
        for path in sorted((Path(__file__).parent.parent / "configs").glob("*.yaml")):
            parse_config(path)
