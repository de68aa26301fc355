import pytest

from drowsy_alert.cli import main
from drowsy_alert.harness import CSV_HEADER


@pytest.fixture
def clean_cfg(tmp_path):
    (tmp_path / "ok.scn").write_text("duration 8000\nrate 100\nseed 3\nbpm 72\nevent 1000 blink 200\nevent 0 setnoise 0.02\n")
    cfg = tmp_path / "ok.cfg"
    cfg.write_text("scenario ok.scn\n")
    return cfg


def summary(out):
    return dict(line.split("=", 1) for line in out.strip().splitlines())


def test_run_clean_scenario(clean_cfg, capsys):
    assert main(["run", "--config", str(clean_cfg)]) == 0
    s = summary(capsys.readouterr().out)
    assert s["false_alarms"] == "0"
    assert s["misses"] == "0"
    assert s["episodes"] == "0"
    assert s["ticks"] == "800"


def test_run_writes_csv(clean_cfg, tmp_path, capsys):
    out = tmp_path / "trace.csv"
    assert main(["run", "--config", str(clean_cfg), "--csv", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER and len(lines) == 801


def test_seed_flag_overrides_scenario(clean_cfg, tmp_path):
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    main(["run", "--config", str(clean_cfg), "--csv", str(a)])
    main(["run", "--config", str(clean_cfg), "--csv", str(b), "--seed", "3"])
    main(["run", "--config", str(clean_cfg), "--csv", str(c), "--seed", "4"])
    assert a.read_bytes() == b.read_bytes() != c.read_bytes()


def test_validate_ok(clean_cfg, capsys):
    assert main(["validate", "--config", str(clean_cfg)]) == 0


def test_validate_names_bad_field(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("scenario x.scn\nescalate.t_blink_ms 0\n")
    assert main(["validate", "--config", str(cfg)]) == 1
    assert "escalate.t_blink_ms" in capsys.readouterr().err


def test_validate_bad_scenario(tmp_path, capsys):
    (tmp_path / "x.scn").write_text("duration 1000\nrate 100\nevent 5 blink 100\nevent 50 blink 100\n")
    cfg = tmp_path / "c.cfg"
    cfg.write_text("scenario x.scn\n")
    assert main(["validate", "--config", str(cfg)]) == 1
    assert "overlap" in capsys.readouterr().err


def test_missing_config_flag_is_usage_error(capsys):
    assert main(["run"]) == 1
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["run", "--config", "x", "--bogus"], ["frobnicate"], [], ["run", "--config", "x", "--seed", "-1"]])
def test_usage_errors(argv, capsys):
    assert main(argv) == 1
    assert "usage" in capsys.readouterr().err


def test_missing_config_file_is_io_error(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope.cfg")]) == 2


def test_missing_scenario_file_is_io_error(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("scenario missing.scn\n")
    assert main(["validate", "--config", str(cfg)]) == 2


def test_unwritable_csv_is_io_error(clean_cfg, tmp_path):
    assert main(["run", "--config", str(clean_cfg), "--csv", str(tmp_path / "no" / "such" / "dir.csv")]) == 2


def test_goldens(tmp_path, capsys):
    assert main(["goldens", "--dir", str(tmp_path)]) == 0
    assert (tmp_path / "gsm_alert.bin").exists()
    assert main(["run", "--config", str(tmp_path / "closure_600ms.cfg")]) == 0
