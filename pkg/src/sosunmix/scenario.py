"""Scenario files: everything needed to simulate a cube and unmix it.

A scenario is a JSON document::

    {
      "name": "paper2",
      "grid": {"start": 400, "step": 2, "count": 301},
      "components": [
        {"name": "P1", "baseline": 0.05,
         "peaks": [{"center": 644.8, "width": 10, "height": 1.0}]},
        ...
      ],
      "mixing": {"csv": "paper2_matrix.csv"},
      "noise": {"kind": "none"},
      "tau": 1, "n": "auto", "mode": "sym-evd", "bins": 10,
      "output": "out/paper2"
    }

``mixing`` is one of ``{"inline": [[...]]}``, ``{"csv": path}`` (relative
to the scenario file) or ``{"fixture": "paper2" | "paper3"}``. ``noise``
takes either ``sigma`` or ``snr_db``; the latter is resolved against the
clean cube. Shipped scenarios live in the package's ``fixtures`` directory
and can be referred to by name.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .amuse import ROTATION_MODES
from .io import read_matrix_csv
from .spectra_model import (
    HyperspectralCube,
    MixingMatrix,
    NoiseSpec,
    PeakModel,
    Spectrum,
    WavelengthGrid,
    mix,
    noise_for_snr,
    paper_three_component_matrix,
    paper_two_component_matrix,
    synth_spectrum,
)

__all__ = ["ConfigError", "Component", "ScenarioConfig", "load_scenario", "fixture_names", "fixture_path"]

MATRIX_FIXTURES = {
    "paper2": paper_two_component_matrix,
    "paper3": paper_three_component_matrix,
}


class ConfigError(ValueError):
    """A scenario field is missing or invalid; ``field`` names it."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class Component:
    name: str
    baseline: float
    peaks: tuple[PeakModel, ...]

    def spectrum(self, grid: WavelengthGrid) -> Spectrum:
        return synth_spectrum(self.peaks, self.baseline, grid)


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    name: str
    grid: WavelengthGrid
    components: tuple[Component, ...]
    mixing: MixingMatrix
    noise: NoiseSpec = NoiseSpec()
    snr_db: float | None = None
    tau: int = 1
    n: int | str = "auto"
    mode: str = "sym-evd"
    bins: int = 10
    output: Path | None = None
    description: str = ""
    raw: dict = field(default_factory=dict, repr=False)

    def sources(self) -> list[Spectrum]:
        return [c.spectrum(self.grid) for c in self.components]

    def resolved_noise(self, seed: int | None = None) -> NoiseSpec:
        """Noise spec with ``snr_db`` converted to a sigma and ``seed`` overridden if given."""
        noise = self.noise
        if self.snr_db is not None:
            clean = mix(self.mixing, self.sources())
            noise = noise_for_snr(clean, self.snr_db, noise.seed)
        if seed is not None:
            noise = NoiseSpec(noise.kind, noise.sigma, int(seed))
        return noise

    def simulate(self, seed: int | None = None) -> HyperspectralCube:
        return mix(self.mixing, self.sources(), self.resolved_noise(seed))

    def true_sources(self) -> np.ndarray:
        return np.stack([s.values for s in self.sources()])


def _require(doc: dict, key: str, where: str = "") -> Any:
    if key not in doc:
        raise ConfigError(where + key, "missing required field")
    return doc[key]


def _number(value: Any, name: str, *, positive: bool = False, integer: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"expected a number, got {value!r}")
    if not np.isfinite(value):
        raise ConfigError(name, "must be finite")
    if integer and int(value) != value:
        raise ConfigError(name, f"expected an integer, got {value!r}")
    if positive and value <= 0:
        raise ConfigError(name, f"must be positive, got {value!r}")
    return int(value) if integer else float(value)


def _parse_mixing(spec: Any, base: Path) -> MixingMatrix:
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ConfigError("mixing", "expected exactly one of 'inline', 'csv', 'fixture'")
    (kind, value), = spec.items()
    try:
        if kind == "inline":
            return MixingMatrix(np.asarray(value, dtype=float))
        if kind == "csv":
            path = Path(value)
            if not path.is_absolute():
                path = base / path
            if not path.exists():
                raise ConfigError("mixing.csv", f"file not found: {path}")
            return MixingMatrix(read_matrix_csv(path))
        if kind == "fixture":
            if value not in MATRIX_FIXTURES:
                raise ConfigError("mixing.fixture", f"unknown fixture {value!r}; choose from {sorted(MATRIX_FIXTURES)}")
            return MATRIX_FIXTURES[value]()
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"mixing.{kind}", str(exc)) from None
    raise ConfigError("mixing", f"unknown mixing source {kind!r}")


def _parse_components(items: Any) -> tuple[Component, ...]:
    if not isinstance(items, list) or not items:
        raise ConfigError("components", "expected a non-empty list")
    out = []
    for i, item in enumerate(items):
        where = f"components[{i}]."
        if not isinstance(item, dict):
            raise ConfigError(f"components[{i}]", "expected an object")
        peaks = []
        for k, p in enumerate(item.get("peaks", [])):
            pw = f"{where}peaks[{k}]."
            try:
                peaks.append(PeakModel(
                    _number(_require(p, "center", pw), pw + "center"),
                    _number(_require(p, "width", pw), pw + "width", positive=True),
                    _number(p.get("height", 1.0), pw + "height"),
                ))
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(pw.rstrip("."), str(exc)) from None
        out.append(Component(
            name=str(item.get("name", f"P{i + 1}")),
            baseline=_number(item.get("baseline", 0.0), where + "baseline"),
            peaks=tuple(peaks),
        ))
    return tuple(out)


def parse_scenario(doc: dict, base: Path | None = None) -> ScenarioConfig:
    """Validate a scenario document; relative paths resolve against ``base``."""
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "scenario must be a JSON object")
    base = base or Path.cwd()

    g = doc.get("grid", {})
    if not isinstance(g, dict):
        raise ConfigError("grid", "expected an object")
    try:
        grid = WavelengthGrid(
            _number(g.get("start", 400.0), "grid.start"),
            _number(g.get("step", 2.0), "grid.step", positive=True),
            _number(g.get("count", 301), "grid.count", integer=True),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("grid", str(exc)) from None

    components = _parse_components(_require(doc, "components"))
    mixing = _parse_mixing(_require(doc, "mixing"), base)
    if mixing.components != len(components):
        raise ConfigError(
            "mixing", f"matrix has {mixing.components} columns but {len(components)} components are defined"
        )

    nd = doc.get("noise", {"kind": "none"})
    if not isinstance(nd, dict):
        raise ConfigError("noise", "expected an object")
    seed = _number(nd.get("seed", 0), "noise.seed", integer=True)
    snr_db = None
    kind = nd.get("kind", "none")
    if kind not in ("none", "gaussian"):
        raise ConfigError("noise.kind", f"expected 'none' or 'gaussian', got {kind!r}")
    if kind == "none":
        noise = NoiseSpec("none", 0.0, seed)
    elif "snr_db" in nd:
        snr_db = _number(nd["snr_db"], "noise.snr_db")
        noise = NoiseSpec("none", 0.0, seed)
    else:
        noise = NoiseSpec("gaussian", _number(_require(nd, "sigma", "noise."), "noise.sigma", positive=True), seed)

    tau = _number(doc.get("tau", 1), "tau", integer=True)
    if tau < 1:
        raise ConfigError("tau", f"must be >= 1, got {tau}")
    if tau >= grid.count:
        raise ConfigError("tau", f"must be smaller than the sample count {grid.count}")
    n = doc.get("n", "auto")
    if n != "auto":
        n = _number(n, "n", integer=True)
        if not 1 <= n <= mixing.pixels:
            raise ConfigError("n", f"must lie in [1, {mixing.pixels}] or be 'auto'")
    mode = doc.get("mode", "sym-evd")
    if mode not in ROTATION_MODES:
        raise ConfigError("mode", f"expected one of {ROTATION_MODES}, got {mode!r}")
    bins = _number(doc.get("bins", 10), "bins", integer=True)
    if bins < 2:
        raise ConfigError("bins", f"must be >= 2, got {bins}")
    output = doc.get("output")
    if output is not None:
        output = Path(output)
        if not output.is_absolute():
            output = base / output

    return ScenarioConfig(
        name=str(doc.get("name", "scenario")),
        grid=grid,
        components=components,
        mixing=mixing,
        noise=noise,
        snr_db=snr_db,
        tau=tau,
        n=n,
        mode=mode,
        bins=bins,
        output=output,
        description=str(doc.get("description", "")),
        raw=doc,
    )


def fixture_names() -> list[str]:
    root = resources.files("sosunmix") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def fixture_path(name: str) -> Path:
    path = Path(str(resources.files("sosunmix") / "fixtures" / f"{name}.json"))
    if not path.exists():
        raise ConfigError("fixture", f"unknown fixture {name!r}; available: {fixture_names()}")
    return path


def load_scenario(source: str | Path) -> ScenarioConfig:
    """Load a scenario from a JSON path or by shipped fixture name."""
    path = Path(source)
    if not path.exists() and path.suffix != ".json" and "/" not in str(source):
        path = fixture_path(str(source))
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError("<file>", f"cannot read scenario {source}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON in {path}: {exc}") from None
    return parse_scenario(doc, base=path.parent)
