import json
import math
from pathlib import Path

import pytest

from bellsim import ParitySystem
from bellsim.cli import (
    ConfigError,
    ExperimentConfig,
    config_from_mapping,
    main,
    run_experiment,
    validate_config,
)

TWO_PI = 2.0 * math.pi


def small_config(experiment, out_dir, **params):
    doc = {
        "experiment": experiment,
        "seed": 3,
        "samples": 20_000,
        "params": params,
        "out_dir": str(out_dir),
    }
    return config_from_mapping(doc)


def read_summary(out_dir):
    return json.loads((Path(out_dir) / "summary.json").read_text())


def csv_rows(path):
    lines = Path(path).read_text().splitlines()
    return lines[0].split(","), lines[1:]


# ---------------------------------------------------------------------------
# config validation

def test_defaults_applied():
    config = validate_config('{"experiment": "correlate"}')
    assert config.seed == 0
    assert config.samples == 10**6
    assert config.params["phase_f"] == 0.0
    assert config.params["sweep"]["count"] == 512
    assert config.out_dir == Path("out")


def test_unknown_experiment_rejected():
    with pytest.raises(ConfigError) as err:
        validate_config('{"experiment": "warp"}')
    assert err.value.path == "experiment"


def test_zero_samples_rejected():
    with pytest.raises(ConfigError) as err:
        validate_config('{"experiment": "chsh", "samples": 0}')
    assert err.value.path == "samples"


def test_unknown_top_level_field_rejected():
    with pytest.raises(ConfigError) as err:
        validate_config('{"experiment": "ghz", "banana": 1}')
    assert err.value.path == "banana"


def test_unknown_param_rejected_with_path():
    with pytest.raises(ConfigError) as err:
        validate_config('{"experiment": "chsh", "params": {"angle": 0.1}}')
    assert err.value.path == "params.angle"


def test_sweep_validation_paths():
    with pytest.raises(ConfigError) as err:
        validate_config('{"experiment": "correlate", "params": {"sweep": {"start": 0, "stop": 6.28, "count": 1}}}')
    assert err.value.path == "params.sweep.count"
    with pytest.raises(ConfigError) as err:
        validate_config('{"experiment": "correlate", "params": {"sweep": {"start": 0, "count": 10}}}')
    assert err.value.path == "params.sweep.stop"
    with pytest.raises(ConfigError) as err:
        validate_config('{"experiment": "correlate", "params": {"sweep": {"start": 1, "stop": 1, "count": 10}}}')
    assert err.value.path == "params.sweep.stop"


def test_malformed_json_rejected():
    with pytest.raises(ConfigError) as err:
        validate_config("{not json")
    assert err.value.path == "$"


def test_non_finite_angle_rejected():
    with pytest.raises(ConfigError) as err:
        validate_config('{"experiment": "chsh", "params": {"a": NaN}}')
    assert err.value.path == "params.a"


def test_seed_range_checked():
    with pytest.raises(ConfigError) as err:
        validate_config('{"experiment": "ghz", "seed": -1}')
    assert err.value.path == "seed"
    with pytest.raises(ConfigError):
        validate_config(f'{{"experiment": "ghz", "seed": {2**64}}}')
    config = validate_config(f'{{"experiment": "ghz", "seed": {2**64 - 1}}}')
    assert config.seed == 2**64 - 1


def test_bool_is_not_an_integer():
    with pytest.raises(ConfigError) as err:
        validate_config('{"experiment": "ghz", "samples": true}')
    assert err.value.path == "samples"


def test_optical_model_validated():
    with pytest.raises(ConfigError) as err:
        validate_config('{"experiment": "optical", "params": {"model": "quantum"}}')
    assert err.value.path == "params.model"


# ---------------------------------------------------------------------------
# experiment runs

def test_correlate_run(tmp_path):
    config = small_config(
        "correlate", tmp_path, sweep={"start": 0.0, "stop": TWO_PI, "count": 32}
    )
    summary = run_experiment(config, figures=False)
    doc = read_summary(tmp_path)
    assert doc["schema_version"] == "1"
    assert doc["results"]["kinks"] == pytest.approx([0.0, math.pi])
    assert doc["results"]["cosine_gap_1000"] >= 0.2
    header, rows = csv_rows(tmp_path / "correlate_curve.csv")
    assert header == ["tau", "correlation", "qm_reference", "abs_gap"]
    assert len(rows) == 32
    assert summary.files[0]["rows"] == 32
    # floats are written with 17 significant digits and parse back exactly
    from bellsim import correlate_exact, make_square_wave

    f = make_square_wave(TWO_PI, 0.0)
    g = make_square_wave(TWO_PI, math.pi)
    tau, corr, ref, gap = (float(v) for v in rows[3].split(","))
    assert corr == correlate_exact(f, g, tau)
    assert ref == -math.cos(tau)
    assert gap == abs(corr - ref)


def test_chsh_run(tmp_path):
    config = small_config("chsh", tmp_path, sweep={"start": 0.0, "stop": TWO_PI, "count": 17})
    run_experiment(config, figures=False)
    doc = read_summary(tmp_path)
    results = doc["results"]
    assert results["s_qm"] == pytest.approx(-2.0 * math.sqrt(2.0), abs=1e-12)
    assert abs(results["s_lhv_exact"]) <= 2.0 + 1e-6
    assert abs(results["s_mc"]) <= 4.0
    header, rows = csv_rows(tmp_path / "chsh_pairs.csv")
    assert header == ["pair", "a", "b", "e_qm", "e_lhv_exact", "e_mc", "mc_std_error"]
    assert len(rows) == 4
    _, curve = csv_rows(tmp_path / "chsh_curve.csv")
    assert len(curve) == 17


def test_ghz_run(tmp_path):
    config = small_config("ghz", tmp_path, n=3, m=2)
    run_experiment(config, figures=False)
    doc = read_summary(tmp_path)
    results = doc["results"]
    assert results["satisfiable"] is False
    assert results["certificate"] == [0, 1, 2, 3]
    assert results["witness"] is None
    assert results["enumeration_agrees"] is True
    assert results["lattice_points"] == 7
    _, rows = csv_rows(tmp_path / "lattice.csv")
    assert len(rows) == 7
    system = ParitySystem.from_json((tmp_path / "ghz_system.json").read_text())
    assert len(system.constraints) == 4


def test_optical_run(tmp_path):
    config = small_config("optical", tmp_path, model="anticorrelated", a=0.4, b=0.1)
    run_experiment(config, figures=False)
    doc = read_summary(tmp_path)
    results = doc["results"]
    counts = results["counts"]
    assert counts["n_total"] == 20_000
    assert sum(counts[k] for k in ("n_pp", "n_mm", "n_pm", "n_mp")) == 20_000
    assert results["e_model_closed_form"] == pytest.approx(-0.5 * math.cos(2 * 0.3), abs=1e-12)
    from bellsim import CoincidenceCounts

    on_disk = CoincidenceCounts.from_json((tmp_path / "counts.json").read_text())
    assert on_disk.n_total == 20_000
    assert on_disk.model == "anticorrelated"


def test_manifest_paths_exist(tmp_path):
    for experiment in ("correlate", "chsh", "ghz", "optical"):
        out = tmp_path / experiment
        config = small_config(experiment, out)
        summary = run_experiment(config, figures=False)
        for entry in summary.files:
            assert (out / entry["path"]).exists()


def test_summary_keys_sorted(tmp_path):
    run_experiment(small_config("ghz", tmp_path), figures=False)
    text = (tmp_path / "summary.json").read_text()
    assert text == json.dumps(json.loads(text), indent=2, sort_keys=True) + "\n"


def test_reruns_are_byte_identical(tmp_path):
    for experiment in ("correlate", "chsh", "ghz", "optical"):
        out = tmp_path / experiment
        config = small_config(experiment, out)
        run_experiment(config, figures=False)
        snapshot = {p.name: p.read_bytes() for p in out.iterdir()}
        run_experiment(config, figures=False)
        for p in sorted(out.iterdir()):
            assert p.read_bytes() == snapshot[p.name], f"{experiment}/{p.name} changed"


def test_figures_rendered(tmp_path):
    config = small_config("correlate", tmp_path)
    summary = run_experiment(config, figures=True)
    assert summary.figures == ["correlate.png"]
    png = tmp_path / "correlate.png"
    assert png.exists() and png.stat().st_size > 1000
    first = png.read_bytes()
    run_experiment(config, figures=True)
    assert png.read_bytes() == first


# ---------------------------------------------------------------------------
# command line entry

def test_main_success(tmp_path, capsys):
    code = main(["ghz", "--out", str(tmp_path / "run"), "--no-figures"])
    assert code == 0
    assert (tmp_path / "run" / "summary.json").exists()


def test_main_config_file_and_overrides(tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(
        json.dumps(
            {
                "experiment": "chsh",
                "seed": 1,
                "samples": 5000,
                "out_dir": str(tmp_path / "ignored"),
            }
        )
    )
    out = tmp_path / "actual"
    code = main(
        ["chsh", "--config", str(config_path), "--seed", "9", "--out", str(out), "--no-figures"]
    )
    assert code == 0
    doc = read_summary(out)
    assert doc["inputs"]["seed"] == 9
    assert doc["inputs"]["samples"] == 5000


def test_main_rejects_mismatched_subcommand(tmp_path, capsys):
    config_path = tmp_path / "config.json"
    config_path.write_text('{"experiment": "ghz"}')
    code = main(["chsh", "--config", str(config_path), "--no-figures"])
    assert code == 2
    assert "experiment" in capsys.readouterr().err


def test_main_missing_config_file(tmp_path, capsys):
    code = main(["ghz", "--config", str(tmp_path / "nope.json")])
    assert code == 2


def test_main_invalid_override(tmp_path, capsys):
    code = main(["ghz", "--samples", "0", "--out", str(tmp_path / "x")])
    assert code == 2
    assert "samples" in capsys.readouterr().err


def test_main_unwritable_out_dir(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("a file, not a directory")
    code = main(["ghz", "--out", str(blocker / "sub"), "--no-figures"])
    assert code == 3


def test_main_unknown_subcommand():
    with pytest.raises(SystemExit) as err:
        main(["warp"])
    assert err.value.code == 2


def test_run_experiment_rejects_unknown_tag(tmp_path):
    config = ExperimentConfig(experiment="warp", out_dir=tmp_path)
    with pytest.raises(ConfigError):
        run_experiment(config, figures=False)
