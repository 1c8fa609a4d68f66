"""Command-line interface.

::

    sosunmix simulate SCENARIO [--seed S] [--out DIR]
    sosunmix unmix CUBE_CSV [--n N|auto] [--tau K] [--mode M] [--bins B]
                            [--no-sign-correction] [--out DIR]
    sosunmix evaluate MODEL_JSON --truth-sources CSV [--truth-mixing CSV] [--out DIR]
    sosunmix demo {paper2,paper3,inversion} [--seed S] [--out DIR]

``SCENARIO`` is a scenario JSON path or the name of a shipped fixture. The
output directory is ``--out``, else ``$SOSUNMIX_OUT``, else the scenario's
``output`` field, else ``./sosunmix-out``. Data goes to files; warnings and
diagnostics go to stderr. Exit status is 0 only when every artifact was
written, 1 on a runtime failure and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from . import io
from .amuse import ROTATION_MODES, UnmixingModel, amuse
from .errors import DimensionError
from .evaluation import (
    amari_index,
    column_cosines,
    concentration_profiles,
    match_sources,
    sign_accuracy,
)
from .scenario import ConfigError, load_scenario
from .sign_correction import correct_signs

ENV_OUT = "SOSUNMIX_OUT"
DEFAULT_OUT = "sosunmix-out"


class CommandError(RuntimeError):
    pass


def _out_dir(arg: str | None, fallback: Path | None = None) -> Path:
    if arg:
        return Path(arg)
    if os.environ.get(ENV_OUT):
        return Path(os.environ[ENV_OUT])
    return fallback if fallback is not None else Path(DEFAULT_OUT)


def _diag(msg: str) -> None:
    print(msg, file=sys.stderr)


def _profiles_table(A: np.ndarray) -> np.ndarray:
    return np.column_stack([np.arange(A.shape[0]), A])


def _write_profiles(path: Path, A: np.ndarray) -> None:
    header = ["pixel", *[f"component_{j}" for j in range(A.shape[1])]]
    io.atomic_write_text(path, io.csv_text(header, _profiles_table(A)))


# -- simulate ---------------------------------------------------------------

def run_simulate(scenario: str | Path, out: Path, seed: int | None = None) -> dict[str, Path]:
    sc = load_scenario(scenario)
    cube = sc.simulate(seed)
    names = [c.name for c in sc.components]
    paths = {
        "cube": out / "cube.csv",
        "true_sources": out / "true_sources.csv",
        "true_mixing": out / "true_mixing.csv",
        "true_profiles": out / "true_profiles.csv",
    }
    io.write_cube_csv(paths["cube"], cube)
    io.write_spectra_csv(paths["true_sources"], sc.sources(), names=names)
    io.write_matrix_csv(paths["true_mixing"], sc.mixing)
    _write_profiles(paths["true_profiles"], sc.mixing.entries)
    return paths


# -- unmix ------------------------------------------------------------------

def unmix_cube(cube, n="auto", tau=1, mode="sym-evd", bins=10, sign_correction=True) -> UnmixingModel:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        model = amuse(cube, n=n, delay=tau, mode=mode)
    if sign_correction:
        model = correct_signs(model, bins=bins)
    return model


def _report_model(model: UnmixingModel) -> None:
    for w in model.warnings:
        _diag(f"warning: {w}")
    for i, v in enumerate(model.sign_verdicts or ()):
        _diag(
            f"source {i}: {v.decision} ({v.rule_fired}; baseline={v.baseline:.6g}, "
            f"p_max={v.p_max:.6g}, p_min={v.p_min:.6g})"
        )


def run_unmix(
    cube_csv: str | Path, out: Path, n="auto", tau=1, mode="sym-evd", bins=10, sign_correction=True
) -> dict[str, Path]:
    cube = io.read_cube_csv(cube_csv)
    if tau >= cube.samples:
        raise CommandError(f"--tau {tau} must be smaller than the number of samples ({cube.samples})")
    if n != "auto" and n > cube.pixels:
        raise CommandError(f"--n {n} exceeds the number of pixels ({cube.pixels})")
    model = unmix_cube(cube, n, tau, mode, bins, sign_correction)
    _report_model(model)
    paths = {"model": out / "model.json", "sources": out / "sources.csv"}
    io.save_model(paths["model"], model, sources_csv=paths["sources"])
    return paths


# -- evaluate ---------------------------------------------------------------

def evaluate_model(model: UnmixingModel, truth: np.ndarray, A_true: np.ndarray | None) -> tuple[dict, np.ndarray]:
    """Metrics document plus estimated profiles in truth order (columns of the mixing estimate)."""
    if truth.shape != model.sources.shape:
        raise DimensionError(
            f"truth sources have shape {truth.shape} but the model has {model.sources.shape}"
        )
    if A_true is not None and A_true.shape != model.mixing_estimate.shape:
        raise DimensionError(
            f"true mixing matrix has shape {A_true.shape} but the estimate has {model.mixing_estimate.shape}"
        )
    match = match_sources(truth, model.sources)
    n = truth.shape[0]
    est_profiles = np.empty_like(model.mixing_estimate)
    est_profiles[:, match.permutation] = model.mixing_estimate / match.scales[None, :]
    doc: dict = {
        "format": io.METRICS_FORMAT,
        "n_sources": n,
        "matched_correlations": [float(match.correlations[list(match.permutation).index(i)]) for i in range(n)],
        "min_abs_correlation": float(np.min(np.abs(match.correlations))),
        "sign_accuracy": sign_accuracy(truth, model.sources),
        "amari_index": None,
        "components": [],
    }
    cos = None
    if A_true is not None:
        doc["amari_index"] = amari_index(A_true, model.mixing_estimate)
        cos = column_cosines(A_true, model.mixing_estimate, match)
    for j in range(n):
        doc["components"].append({
            "estimate": j,
            "truth": int(match.permutation[j]),
            "correlation": float(match.correlations[j]),
            "scale": float(match.scales[j]),
            "column_cosine": None if cos is None else float(cos[j]),
        })
    return doc, est_profiles


def run_evaluate(
    model_json: str | Path, truth_sources: str | Path, out: Path, truth_mixing: str | Path | None = None
) -> dict[str, Path]:
    model = io.load_model(model_json)
    grid, truth, _ = io.read_spectra_csv(truth_sources)
    if grid != model.grid:
        raise DimensionError("truth sources and model use different wavelength grids")
    A_true = io.read_matrix_csv(truth_mixing) if truth_mixing else None
    doc, est_profiles = evaluate_model(model, truth, A_true)
    paths = {"metrics": out / "metrics.json", "profiles_estimated": out / "profiles_estimated.csv"}
    if A_true is not None:
        paths["profiles_true"] = out / "profiles_true.csv"
        _write_profiles(paths["profiles_true"], np.column_stack([p.weights for p in concentration_profiles(A_true)]))
    _write_profiles(paths["profiles_estimated"], est_profiles)
    io.write_json(paths["metrics"], doc)
    return paths


# -- demo -------------------------------------------------------------------

def run_demo(name: str, out: Path, seed: int | None = None) -> dict:
    sc = load_scenario(name)
    sim = run_simulate(name, out, seed)
    cube = io.read_cube_csv(sim["cube"])
    io.write_spectra_csv(out / "mixture_spectra.csv", cube.data, grid=cube.grid,
                         names=[f"pixel_{i}" for i in range(cube.pixels)])
    truth = sc.true_sources()
    summary: dict = {"scenario": sc.name, "pixels": cube.pixels, "samples": cube.samples}
    for label, correct in (("raw", False), ("corrected", True)):
        model = unmix_cube(cube, sc.n, sc.tau, sc.mode, sc.bins, sign_correction=correct)
        if correct:
            _report_model(model)
        sub = out / label
        io.save_model(sub / "model.json", model, sources_csv=sub / "sources.csv")
        doc, est_profiles = evaluate_model(model, truth, sc.mixing.entries)
        io.write_json(sub / "metrics.json", doc)
        _write_profiles(sub / "profiles_estimated.csv", est_profiles)
        summary[label] = {
            "n_sources": model.n_sources,
            "matched_correlations": doc["matched_correlations"],
            "sign_accuracy": doc["sign_accuracy"],
            "amari_index": doc["amari_index"],
            "column_cosines": [c["column_cosine"] for c in sorted(doc["components"], key=lambda c: c["truth"])],
        }
        if correct:
            rows = [[i, v.baseline, v.p_max, v.p_min, 1.0 if v.flip else 0.0]
                    for i, v in enumerate(model.sign_verdicts)]
            io.atomic_write_text(
                out / "baselines.csv",
                io.csv_text(["source", "baseline", "p_max", "p_min", "flipped"], np.array(rows, dtype=float)),
            )
    io.write_json(out / "summary.json", summary)
    return summary


def _print_summary(summary: dict) -> None:
    print(f"scenario {summary['scenario']}: {summary['pixels']} pixels x {summary['samples']} samples")
    print(f"{'':10s} {'n':>2s} {'sign acc':>8s} {'amari':>10s}  matched r / column cosine")
    for label in ("raw", "corrected"):
        s = summary[label]
        rs = " ".join(f"{r:+.5f}" for r in s["matched_correlations"])
        cs = " ".join(f"{c:+.5f}" for c in s["column_cosines"])
        print(f"{label:10s} {s['n_sources']:2d} {s['sign_accuracy']:8.3f} {s['amari_index']:10.3e}  r: {rs} | cos: {cs}")


# -- argument parsing -------------------------------------------------------

def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer (a zero delay is not allowed), got {value}")
    return value


def _source_count(text: str):
    return "auto" if text == "auto" else _positive_int(text)


def _bins(text: str) -> int:
    value = _positive_int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("bins must be >= 2")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sosunmix", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="forward-simulate a scenario into a cube CSV")
    p.add_argument("scenario", help="scenario JSON path or fixture name")
    p.add_argument("--seed", type=int, default=None, help="override the noise seed")
    p.add_argument("--out", default=None)

    p = sub.add_parser("unmix", help="run AMUSE (+ sign correction) on a cube CSV")
    p.add_argument("cube")
    p.add_argument("--n", type=_source_count, default="auto", help="source count or 'auto'")
    p.add_argument("--tau", type=_positive_int, default=1, help="delay in samples (>= 1)")
    p.add_argument("--mode", choices=ROTATION_MODES, default="sym-evd")
    p.add_argument("--bins", type=_bins, default=10)
    p.add_argument("--seed", type=int, default=None, help="accepted for symmetry; unmixing is deterministic")
    p.add_argument("--no-sign-correction", action="store_true")
    p.add_argument("--out", default=None)

    p = sub.add_parser("evaluate", help="score a model against ground truth")
    p.add_argument("model")
    p.add_argument("--truth-sources", required=True)
    p.add_argument("--truth-mixing", default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("demo", help="simulate, unmix and evaluate a shipped experiment")
    p.add_argument("name", help="fixture name (paper2, paper3, inversion)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            sc_out = load_scenario(args.scenario).output
            run_simulate(args.scenario, _out_dir(args.out, sc_out), args.seed)
        elif args.command == "unmix":
            run_unmix(args.cube, _out_dir(args.out), args.n, args.tau, args.mode, args.bins,
                      sign_correction=not args.no_sign_correction)
        elif args.command == "evaluate":
            run_evaluate(args.model, args.truth_sources, _out_dir(args.out), args.truth_mixing)
        elif args.command == "demo":
            out = _out_dir(args.out, Path(DEFAULT_OUT)) / args.name
            _print_summary(run_demo(args.name, out, args.seed))
    except (ConfigError, CommandError, DimensionError, ValueError, OSError) as exc:
        _diag(f"error: {exc}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
