"""Deterministic experiment runner.

Reads a JSON config (or builds one from subcommand defaults), dispatches
to the computational modules, and writes CSV curves, a JSON summary with
alphabetically ordered keys, and PNG figures into the output directory.
Identical configs produce byte-identical CSV and JSON artifacts.

Exit codes: 0 success, 2 config error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import dichotomic, lhv, multiparty, optical

TWO_PI = 2.0 * math.pi

EXPERIMENTS = ("correlate", "chsh", "ghz", "optical")

SUMMARY_SCHEMA_VERSION = "1"

_DEFAULT_SAMPLES = 10**6

_DEFAULT_PARAMS: dict[str, dict[str, Any]] = {
    "correlate": {
        "phase_f": 0.0,
        "phase_g": math.pi,
        "sweep": {"start": 0.0, "stop": TWO_PI, "count": 512},
    },
    "chsh": {
        "a": 0.0,
        "a2": 0.5 * math.pi,
        "b": 0.25 * math.pi,
        "b2": -0.25 * math.pi,
        "sweep": {"start": 0.0, "stop": TWO_PI, "count": 361},
    },
    "ghz": {
        "n": 2,
        "m": 2,
        "tau": 0.0,
        "theta": 0.0,
    },
    "optical": {
        "model": "shared",
        "a": 0.0,
        "b": 0.0,
        "sweep": {"start": 0.0, "stop": math.pi, "count": 181},
    },
}

_SOURCE_MODELS = {
    "shared": (optical.shared_axis_source, +1.0),
    "anticorrelated": (optical.anticorrelated_source, -1.0),
}


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int = 0
    samples: int = _DEFAULT_SAMPLES
    params: dict[str, Any] = field(default_factory=dict)
    out_dir: Path = Path("out")


@dataclass(frozen=True)
class RunSummary:
    """What an experiment produced: echoed inputs, scalar results, and a
    manifest of emitted files (CSV entries carry their row counts)."""

    experiment: str
    inputs: dict[str, Any]
    results: dict[str, Any]
    files: list[dict[str, Any]]
    figures: list[str]
    schema_version: str = SUMMARY_SCHEMA_VERSION

    def as_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "experiment": self.experiment,
            "inputs": self.inputs,
            "results": self.results,
            "files": self.files,
            "figures": self.figures,
        }


# ---------------------------------------------------------------------------
# config validation (strict: unknown fields rejected, diagnostics name paths)

def _expect_int(value: Any, path: str, lo: int | None = None, hi: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(path, f"must be >= {lo}, got {value}")
    if hi is not None and value > hi:
        raise ConfigError(path, f"must be <= {hi}, got {value}")
    return value


def _expect_angle(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(path, f"must be finite, got {value!r}")
    return value


def _validate_sweep(raw: Any, path: str) -> dict[str, Any]:
    if not isinstance(raw, dict):
        raise ConfigError(path, f"expected an object, got {raw!r}")
    unknown = sorted(set(raw) - {"start", "stop", "count"})
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}", "unknown field")
    start = _expect_angle(raw["start"], f"{path}.start") if "start" in raw else None
    stop = _expect_angle(raw["stop"], f"{path}.stop") if "stop" in raw else None
    count = _expect_int(raw["count"], f"{path}.count", lo=2) if "count" in raw else None
    out = {"start": start, "stop": stop, "count": count}
    if any(v is None for v in out.values()):
        missing = next(k for k, v in out.items() if v is None)
        raise ConfigError(f"{path}.{missing}", "missing field")
    if out["stop"] <= out["start"]:
        raise ConfigError(f"{path}.stop", "must be greater than start")
    return out


def _validate_params(experiment: str, raw: Any) -> dict[str, Any]:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("params", f"expected an object, got {raw!r}")
    defaults = _DEFAULT_PARAMS[experiment]
    unknown = sorted(set(raw) - set(defaults))
    if unknown:
        raise ConfigError(f"params.{unknown[0]}", "unknown field")
    merged = {**defaults, **raw}
    out: dict[str, Any] = {}
    for key, value in merged.items():
        path = f"params.{key}"
        if key == "sweep":
            out[key] = _validate_sweep(value, path)
        elif key in ("n", "m"):
            out[key] = _expect_int(value, path, lo=1)
        elif key == "model":
            if value not in _SOURCE_MODELS:
                raise ConfigError(path, f"must be one of {sorted(_SOURCE_MODELS)}, got {value!r}")
            out[key] = value
        else:
            out[key] = _expect_angle(value, path)
    return out


def config_from_mapping(doc: Any) -> ExperimentConfig:
    """Validate an already-parsed config mapping into an ExperimentConfig."""
    if not isinstance(doc, dict):
        raise ConfigError("$", f"config must be a JSON object, got {doc!r}")
    unknown = sorted(set(doc) - {"experiment", "seed", "samples", "params", "out_dir"})
    if unknown:
        raise ConfigError(unknown[0], "unknown field")
    experiment = doc.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            "experiment", f"must be one of {list(EXPERIMENTS)}, got {experiment!r}"
        )
    seed = _expect_int(doc.get("seed", 0), "seed", lo=0, hi=2**64 - 1)
    samples = _expect_int(doc.get("samples", _DEFAULT_SAMPLES), "samples", lo=1)
    out_dir = doc.get("out_dir", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("out_dir", f"expected a non-empty string, got {out_dir!r}")
    params = _validate_params(experiment, doc.get("params"))
    return ExperimentConfig(
        experiment=experiment,
        seed=seed,
        samples=samples,
        params=params,
        out_dir=Path(out_dir),
    )


def validate_config(raw: str) -> ExperimentConfig:
    """Parse and validate a JSON config document (strict mode)."""
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"malformed JSON: {exc}") from exc
    return config_from_mapping(doc)


# ---------------------------------------------------------------------------
# deterministic writers

def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> int:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return len(rows)


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _grid(sweep: dict[str, Any]) -> np.ndarray:
    return np.linspace(sweep["start"], sweep["stop"], sweep["count"])


def _json_safe(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


# ---------------------------------------------------------------------------
# experiment runners

def _run_correlate(config: ExperimentConfig, figures: bool) -> RunSummary:
    p = config.params
    f = dichotomic.make_square_wave(TWO_PI, p["phase_f"])
    g = dichotomic.make_square_wave(TWO_PI, p["phase_g"])
    taus = _grid(p["sweep"])
    corr = [dichotomic.correlate_exact(f, g, t) for t in taus]
    reference = [-math.cos(t) for t in taus]
    gaps = [abs(c - r) for c, r in zip(corr, reference)]
    kinks = dichotomic.pair_kinks(f, g)

    rows = list(zip(taus, corr, reference, gaps))
    n_rows = _write_csv(
        config.out_dir / "correlate_curve.csv",
        ["tau", "correlation", "qm_reference", "abs_gap"],
        rows,
    )

    figure_paths: list[str] = []
    if figures:
        from . import plotting

        plotting.save_correlation_figure(
            config.out_dir / "correlate.png", taus, corr, reference, kinks
        )
        figure_paths.append("correlate.png")

    results = {
        "kinks": list(kinks),
        "n_kinks": len(kinks),
        "max_gap_on_sweep": max(gaps),
        "cosine_gap_1000": dichotomic.cosine_gap(f, g, 1000),
    }
    return RunSummary(
        experiment="correlate",
        inputs=_echo_inputs(config),
        results=results,
        files=[{"path": "correlate_curve.csv", "rows": n_rows}],
        figures=figure_paths,
    )


def _run_chsh(config: ExperimentConfig, figures: bool) -> RunSummary:
    p = config.params
    a, a2, b, b2 = p["a"], p["a2"], p["b"], p["b2"]
    model = lhv.bell_sgn_model()

    def e_exact(x: float, y: float) -> float:
        return lhv.lhv_correlation_exact(model, x, y)

    s_qm = lhv.chsh(lhv.qm_correlation, a, a2, b, b2)
    s_lhv = lhv.chsh(e_exact, a, a2, b, b2)

    pairs = [("a_b", a, b), ("a_b2", a, b2), ("a2_b", a2, b), ("a2_b2", a2, b2)]
    estimates = [
        lhv.lhv_correlation_mc(model, x, y, config.samples, config.seed + i)
        for i, (_, x, y) in enumerate(pairs)
    ]
    s_mc = (
        estimates[0].value + estimates[1].value + estimates[2].value - estimates[3].value
    )

    pair_rows = [
        [label, x, y, lhv.qm_correlation(x, y), e_exact(x, y), est.value, est.std_error]
        for (label, x, y), est in zip(pairs, estimates)
    ]
    n_pairs = _write_csv(
        config.out_dir / "chsh_pairs.csv",
        ["pair", "a", "b", "e_qm", "e_lhv_exact", "e_mc", "mc_std_error"],
        pair_rows,
    )

    deltas = _grid(p["sweep"])
    e_qm_curve = [lhv.qm_correlation(d, 0.0) for d in deltas]
    e_lhv_curve = [e_exact(d, 0.0) for d in deltas]
    n_curve = _write_csv(
        config.out_dir / "chsh_curve.csv",
        ["delta", "e_qm", "e_lhv_exact"],
        list(zip(deltas, e_qm_curve, e_lhv_curve)),
    )

    figure_paths: list[str] = []
    if figures:
        from . import plotting

        plotting.save_chsh_figure(
            config.out_dir / "chsh.png",
            deltas,
            e_qm_curve,
            e_lhv_curve,
            [x - y for _, x, y in pairs],
            s_qm,
            s_lhv,
        )
        figure_paths.append("chsh.png")

    results = {
        "s_qm": s_qm,
        "s_lhv_exact": s_lhv,
        "s_mc": s_mc,
        "mc_std_errors": [est.std_error for est in estimates],
        "lhv_model": model.name,
    }
    return RunSummary(
        experiment="chsh",
        inputs=_echo_inputs(config),
        results=results,
        files=[
            {"path": "chsh_pairs.csv", "rows": n_pairs},
            {"path": "chsh_curve.csv", "rows": n_curve},
        ],
        figures=figure_paths,
    )


def _run_ghz(config: ExperimentConfig, figures: bool) -> RunSummary:
    p = config.params
    system = multiparty.build_ghz_parity_system()
    verdict = multiparty.solve_parity(system)
    brute = multiparty.enumerate_parity(system)

    lattice = multiparty.achievable_values(p["n"], p["m"])
    target = -math.cos(p["tau"] + p["theta"])
    nearest, distance = multiparty.nearest_achievable(target, p["n"], p["m"])

    _write_text(config.out_dir / "ghz_system.json", system.to_json() + "\n")
    lattice_rows = [
        [k, v.numerator, v.denominator, float(v)] for k, v in enumerate(lattice)
    ]
    n_rows = _write_csv(
        config.out_dir / "lattice.csv",
        ["k", "numerator", "denominator", "value"],
        lattice_rows,
    )

    figure_paths: list[str] = []
    if figures:
        from . import plotting

        plotting.save_lattice_figure(
            config.out_dir / "ghz.png",
            [float(v) for v in lattice],
            target,
            float(nearest),
        )
        figure_paths.append("ghz.png")

    results = {
        "satisfiable": verdict.satisfiable,
        "witness": verdict.witness,
        "certificate": list(verdict.certificate) if verdict.certificate else None,
        "enumeration_agrees": brute.satisfiable == verdict.satisfiable,
        "lattice_points": len(lattice),
        "target": target,
        "nearest_achievable": float(nearest),
        "nearest_achievable_fraction": str(nearest),
        "distance_to_target": distance,
    }
    return RunSummary(
        experiment="ghz",
        inputs=_echo_inputs(config),
        results=results,
        files=[
            {"path": "lattice.csv", "rows": n_rows},
            {"path": "ghz_system.json", "rows": None},
        ],
        figures=figure_paths,
    )


def _run_optical(config: ExperimentConfig, figures: bool) -> RunSummary:
    p = config.params
    build, sign = _SOURCE_MODELS[p["model"]]
    source = build()

    deltas = _grid(p["sweep"])
    curve_rows = []
    e_opt_curve = []
    e_model_curve = []
    p_pp_curve = []
    p_pm_curve = []
    for d in deltas:
        probs = optical.coincidence_probabilities(d, 0.0)
        e_opt = optical.optical_correlation(d, 0.0)
        e_model = sign * optical.classical_shared_lambda_E(d)
        curve_rows.append(
            [d, probs.p_pp, probs.p_mm, probs.p_pm, probs.p_mp, e_opt, e_model]
        )
        e_opt_curve.append(e_opt)
        e_model_curve.append(e_model)
        p_pp_curve.append(probs.p_pp)
        p_pm_curve.append(probs.p_pm)
    n_rows = _write_csv(
        config.out_dir / "optical_curve.csv",
        ["delta", "p_pp", "p_mm", "p_pm", "p_mp", "e_optical", "e_model"],
        curve_rows,
    )

    counts = optical.simulate_coincidences(
        source, p["a"], p["b"], config.samples, config.seed
    )
    estimate = optical.estimate_E_from_counts(counts)
    delta = p["a"] - p["b"]
    closed_form = sign * optical.classical_shared_lambda_E(delta)
    _write_text(config.out_dir / "counts.json", counts.to_json() + "\n")

    figure_paths: list[str] = []
    if figures:
        from . import plotting

        plotting.save_optical_figure(
            config.out_dir / "optical.png",
            deltas,
            p_pp_curve,
            p_pm_curve,
            e_opt_curve,
            e_model_curve,
            delta,
            estimate.value,
            source.name,
        )
        figure_paths.append("optical.png")

    results = {
        "source_model": source.name,
        "counts": {
            "n_pp": counts.n_pp,
            "n_mm": counts.n_mm,
            "n_pm": counts.n_pm,
            "n_mp": counts.n_mp,
            "n_total": counts.n_total,
        },
        "e_empirical": estimate.value,
        "e_std_error": estimate.std_error,
        "e_model_closed_form": closed_form,
        "e_optical_at_delta": optical.optical_correlation(p["a"], p["b"]),
    }
    return RunSummary(
        experiment="optical",
        inputs=_echo_inputs(config),
        results=results,
        files=[
            {"path": "optical_curve.csv", "rows": n_rows},
            {"path": "counts.json", "rows": None},
        ],
        figures=figure_paths,
    )


def _echo_inputs(config: ExperimentConfig) -> dict[str, Any]:
    return {
        "experiment": config.experiment,
        "seed": config.seed,
        "samples": config.samples,
        "params": _json_safe(config.params),
        "out_dir": str(config.out_dir),
    }


_RUNNERS = {
    "correlate": _run_correlate,
    "chsh": _run_chsh,
    "ghz": _run_ghz,
    "optical": _run_optical,
}


def run_experiment(config: ExperimentConfig, figures: bool = True) -> RunSummary:
    """Run one experiment and write its artifacts under config.out_dir.

    Emits the experiment's CSV curves, a ``summary.json`` with fixed
    (alphabetical) key order, and PNG figures unless ``figures`` is off.
    Raises ConfigError for invalid configs and OSError when the output
    directory cannot be written.
    """
    if config.experiment not in _RUNNERS:
        raise ConfigError("experiment", f"unknown experiment {config.experiment!r}")
    config.out_dir.mkdir(parents=True, exist_ok=True)
    summary = _RUNNERS[config.experiment](config, figures)
    text = json.dumps(_json_safe(summary.as_dict()), indent=2, sort_keys=True) + "\n"
    _write_text(config.out_dir / "summary.json", text)
    return summary


# ---------------------------------------------------------------------------
# command line

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellsim",
        description="Run correlation experiments and write CSV/JSON/PNG reports.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    help_lines = {
        "correlate": "exact dichotomic correlation curve vs the -cos reference",
        "chsh": "CHSH values for the quantum curve and a local model",
        "ghz": "parity-system verdict and the achievable product-mean lattice",
        "optical": "coincidence probability curves and a Malus-law click simulation",
    }
    for tag in EXPERIMENTS:
        sp = sub.add_parser(tag, help=help_lines[tag])
        sp.add_argument("--config", type=Path, default=None, help="JSON config file")
        sp.add_argument("--seed", type=int, default=None, help="override config seed")
        sp.add_argument(
            "--samples", type=int, default=None, help="override config sample count"
        )
        sp.add_argument("--out", type=Path, default=None, help="override output directory")
        sp.add_argument(
            "--no-figures",
            action="store_true",
            help="skip PNG rendering; CSV/JSON output is unaffected",
        )
    return parser


def _load_cli_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is not None:
        try:
            raw = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}") from exc
        config = validate_config(raw)
        if config.experiment != args.experiment:
            raise ConfigError(
                "experiment",
                f"config says {config.experiment!r} but the subcommand is "
                f"{args.experiment!r}",
            )
        doc: dict[str, Any] = {
            "experiment": config.experiment,
            "seed": config.seed,
            "samples": config.samples,
            "params": config.params,
            "out_dir": str(config.out_dir),
        }
    else:
        doc = {"experiment": args.experiment}
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.samples is not None:
        doc["samples"] = args.samples
    if args.out is not None:
        doc["out_dir"] = str(args.out)
    return config_from_mapping(doc)


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _load_cli_config(args)
    except ConfigError as exc:
        print(f"bellsim: error: {exc}", file=sys.stderr)
        return 2
    try:
        run_experiment(config, figures=not args.no_figures)
    except ConfigError as exc:
        print(f"bellsim: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"bellsim: I/O error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {config.out_dir / 'summary.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
