import csv
import json
import os

import pytest

from rs_snc.cli import (
    ConfigError,
    SweepConfig,
    main,
    preset_config,
    run_sweep,
)
from rs_snc.codec import CodeParams, GeneratorSet
from rs_snc.modes import ModeConfig


def _tiny_config(out, **kw):
    base = dict(
        experiment="tiny",
        epsilons=[0.1, 0.2],
        trials=2_000,
        seed=99,
        out=str(out),
        codes=[CodeParams(3, 2, 1, 16)],
        quantities=["error", "latency"],
    )
    base.update(kw)
    return SweepConfig(**base)


def _read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_run_sweep_writes_csv_and_sidecar(tmp_path):
    written = run_sweep(_tiny_config(tmp_path))
    rows = _read_rows(written["csv"])
    assert rows, "sweep produced no rows"
    assert set(rows[0]) == {"epsilon", "series", "value", "stderr"}
    for row in rows:
        assert float(row["value"]) == pytest.approx(float(row["value"]))
        if row["series"].endswith("_sim"):
            assert row["stderr"] != "", f"simulated row without stderr: {row}"
            assert float(row["stderr"]) >= 0.0
        else:
            assert row["stderr"] == "", f"analytic row with stderr: {row}"
    meta = json.load(open(written["json"], encoding="utf-8"))
    assert meta["seed"] == 99
    assert meta["trials"] == 2_000
    assert meta["version"].startswith("rs-snc-")
    assert "wall_time_s" in meta and "conventions" in meta


def test_run_sweep_is_deterministic_bytes(tmp_path):
    a = run_sweep(_tiny_config(tmp_path / "a"))
    b = run_sweep(_tiny_config(tmp_path / "b", jobs=2))
    assert open(a["csv"], "rb").read() == open(b["csv"], "rb").read()


def test_sweep_with_modes_emits_mode_series_and_lengths(tmp_path):
    cfg = _tiny_config(
        tmp_path,
        experiment="modes",
        codes=[CodeParams(12, 8, 1)],
        modes=[ModeConfig("M2", 8, 2, 1)],
        mode_L=[0, 1],
        quantities=["error"],
    )
    written = run_sweep(cfg)
    series = {r["series"] for r in _read_rows(written["csv"])}
    assert "m2_k8_d2_nre1_L0_err_analytic" in series
    assert "m2_k8_d2_nre1_L0_err_sim" in series
    assert "m2_k8_d2_nre1_L1_err_sim" in series
    assert "m2_k8_d2_nre1_L0_len_analytic" in series
    meta = json.load(open(written["json"], encoding="utf-8"))
    lengths = meta["achieved_code_length"]["m2_k8_d2_nre1"]
    assert set(lengths) == {"0.1", "0.2"}
    assert lengths["0.2"][1] >= lengths["0.2"][0]


def test_generator_archive_round_trips(tmp_path):
    cfg = _tiny_config(tmp_path, archive_generators=True)
    run_sweep(cfg)
    path = tmp_path / "tiny_gens_n3_k2_L1.json"
    gens = GeneratorSet.from_json(path.read_text(encoding="utf-8"))
    assert gens.params == CodeParams(3, 2, 1, 16)


def test_empty_epsilon_grid_rejected(tmp_path):
    with pytest.raises(ConfigError):
        run_sweep(_tiny_config(tmp_path, epsilons=[]))


def test_mode_without_carrier_rejected(tmp_path):
    with pytest.raises(ConfigError):
        run_sweep(
            _tiny_config(tmp_path, codes=[], modes=[ModeConfig("M1", 8, 0, 1)])
        )


def test_mode_k_mismatch_rejected(tmp_path):
    with pytest.raises(ConfigError):
        run_sweep(
            _tiny_config(
                tmp_path,
                codes=[CodeParams(12, 8, 1)],
                modes=[ModeConfig("M1", 4, 0, 1)],
            )
        )


def test_presets_build_and_validate():
    for name in ("fig1", "fig2", "fig3", "fig4"):
        cfg = preset_config(name)
        cfg.validate()
        assert cfg.epsilons
    with pytest.raises(ConfigError):
        preset_config("fig9")


def test_main_runs_config_file(tmp_path, capsys):
    doc = {
        "experiment": "filecfg",
        "epsilons": [0.15],
        "trials": 1_000,
        "seed": 5,
        "codes": [{"n": 3, "k": 2, "L": 1, "q": 16}],
        "quantities": ["error"],
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(doc), encoding="utf-8")
    rc = main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "res")])
    assert rc == 0
    assert (tmp_path / "res" / "filecfg.csv").exists()


def test_main_flag_overrides_beat_file(tmp_path):
    doc = {
        "experiment": "filecfg",
        "epsilons": [0.15, 0.2],
        "trials": 1_000,
        "seed": 5,
        "codes": [{"n": 3, "k": 2, "L": 1, "q": 16}],
        "quantities": ["error"],
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(doc), encoding="utf-8")
    rc = main(
        [
            "run",
            "--config",
            str(cfg_path),
            "--epsilon",
            "0.25",
            "--out",
            str(tmp_path / "res"),
        ]
    )
    assert rc == 0
    rows = _read_rows(tmp_path / "res" / "filecfg.csv")
    assert {r["epsilon"] for r in rows} == {"0.25"}


def test_main_rejects_unknown_config_keys(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"experiment": "x", "bogus": 1}), encoding="utf-8")
    rc = main(["run", "--config", str(cfg_path)])
    assert rc == 1
    assert "unknown config keys" in capsys.readouterr().err


def test_main_empty_grid_exits_one(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(
        json.dumps(
            {
                "experiment": "x",
                "epsilons": [],
                "codes": [{"n": 3, "k": 2, "L": 1, "q": 16}],
            }
        ),
        encoding="utf-8",
    )
    assert main(["run", "--config", str(cfg_path)]) == 1


def test_main_bad_usage_exits_one(capsys):
    assert main(["preset", "nosuchfig"]) == 1
    assert main(["frobnicate"]) == 1


def test_main_unwritable_out_exits_two(tmp_path, capsys):
    blocker = tmp_path / "blocked"
    blocker.write_text("a file, not a directory", encoding="utf-8")
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(
        json.dumps(
            {
                "experiment": "x",
                "epsilons": [0.1],
                "trials": 100,
                "codes": [{"n": 3, "k": 2, "L": 1, "q": 16}],
            }
        ),
        encoding="utf-8",
    )
    rc = main(["run", "--config", str(cfg_path), "--out", str(blocker)])
    assert rc == 2
    assert "i/o error" in capsys.readouterr().err


def test_main_verify_quick_passes(capsys):
    assert main(["verify", "--level", "quick"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_out_dir_env_var_used(tmp_path, monkeypatch):
    monkeypatch.setenv("RS_SNC_OUT", str(tmp_path / "from_env"))
    monkeypatch.chdir(tmp_path)
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(
        json.dumps(
            {
                "experiment": "envy",
                "epsilons": [0.1],
                "trials": 500,
                "codes": [{"n": 3, "k": 2, "L": 1, "q": 16}],
                "quantities": ["error"],
            }
        ),
        encoding="utf-8",
    )
    assert main(["run", "--config", str(cfg_path)]) == 0
    assert (tmp_path / "from_env" / "envy.csv").exists()


def test_run_with_preset_base_and_overrides(tmp_path):
    rc = main(
        [
            "run",
            "--preset",
            "fig3",
            "--trials",
            "500",
            "--epsilon",
            "0.2",
            "--out",
            str(tmp_path),
        ]
    )
    assert rc == 0
    rows = _read_rows(tmp_path / "fig3.csv")
    assert {r["epsilon"] for r in rows} == {"0.2"}
    assert any(r["series"].startswith("m3_") for r in rows)


def test_emit_json_only(tmp_path):
    cfg = _tiny_config(tmp_path, emit=["json"], quantities=["error"])
    written = run_sweep(cfg)
    assert "csv" not in written
    assert (tmp_path / "tiny_meta.json").exists()
    assert not (tmp_path / "tiny.csv").exists()


def test_epsilon_range_flag(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(
        json.dumps(
            {
                "experiment": "ranged",
                "trials": 500,
                "codes": [{"n": 3, "k": 2, "L": 1, "q": 16}],
                "quantities": ["error"],
            }
        ),
        encoding="utf-8",
    )
    rc = main(
        [
            "run",
            "--config",
            str(cfg_path),
            "--epsilon-range",
            "0.1:0.3:0.1",
            "--out",
            str(tmp_path / "res"),
        ]
    )
    assert rc == 0
    rows = _read_rows(tmp_path / "res" / "ranged.csv")
    assert {r["epsilon"] for r in rows} == {"0.1", "0.2", "0.3"}
