"""Command-line interface: exit codes, outputs, determinism."""

import json

import pytest

from eehpsim.cli import main


def write_cfg(tmp_path, name="cfg.json", **overrides):
    raw = {
        "sweep_kind": "power",
        "sweep_values": [0.5, 2.0],
        "algorithms": ["eehp_mrfc", "zf"],
        "trials": 2,
        "seed": 3,
        "output_path": str(tmp_path / "out.csv"),
        "system": {
            "n_tx": 16,
            "k_ues": 4,
            "n_ray": 8,
            "noise_psd_dbm_hz": None,
            "cell_radius_m": 1.0,
            "min_distance_m": 1.0,
            "shadow_sigma_db": 0.0,
        },
    }
    raw.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return path


def test_sweep_writes_csv_and_manifest(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    assert main(["sweep", "--config", str(cfg)]) == 0
    assert (tmp_path / "out.csv").exists()
    manifest = json.loads((tmp_path / "out.manifest.json").read_text())
    assert manifest["tool"] == "eehpsim"
    assert manifest["config"]["trials"] == 2


def test_sweep_overrides(tmp_path):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "other.csv"
    assert main(["sweep", "--config", str(cfg), "--trials", "1", "--out", str(out)]) == 0
    rows = out.read_text().strip().split("\n")[1:]
    assert len(rows) == 2 * 1 * 2  # values x trials x algorithms


def test_sweep_determinism(tmp_path):
    cfg = write_cfg(tmp_path)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["sweep", "--config", str(cfg), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_validation_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"sweep_kind": "power", "sweep_values": []}))
    assert main(["sweep", "--config", str(bad)]) == 1
    missing = tmp_path / "missing.json"
    assert main(["sweep", "--config", str(missing)]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["sweep"])  # --config is required
    assert exc.value.code == 1


def test_planning_subcommand(tmp_path):
    cfg = write_cfg(
        tmp_path,
        name="plan.json",
        sweep_kind="planning",
        sweep_values=[100, 150],
        output_path=str(tmp_path / "plan.csv"),
    )
    assert main(["planning", "--config", str(cfg)]) == 0
    assert (tmp_path / "plan.csv").exists()


def test_cnas_and_ueno(capsys):
    assert main(["cnas", "--p-out-w", "0.05", "--p-bb-w", "10", "--p-c-prime-w", "5"]) == 0
    out = capsys.readouterr().out
    assert "critical_n_tx=122" in out
    assert main(["ueno", "--n-tx", "100", "--p-bb-w", "1.327"]) == 0
    assert "k_opt=35" in capsys.readouterr().out
    assert main(["cnas"]) == 0
    assert "critical_n_tx=none" in capsys.readouterr().out


def test_selftest(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "selftest: ok" in out
