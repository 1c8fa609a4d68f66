"""CSV and JSON serialisation.

Formats
-------
spectra CSV
    header ``wavelength,<name_0>,<name_1>,...``; one row per wavelength.
cube CSV
    header ``wavelength,pixel_0,...,pixel_{m-1}``; one row per wavelength,
    so the file is the transpose of ``HyperspectralCube.data``.
matrix CSV
    row-major, with an optional ``component_0,...`` header row.
model JSON
    see ``docs/model.schema.json``.

Floats are written with ``repr`` so every file round-trips bit-exactly.
All writers replace their target atomically (temporary file + rename).
"""

from __future__ import annotations

import csv
import io as _io
import json
import os
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .amuse import UnmixingModel, Whitener
from .errors import DimensionError
from .sign_correction import SignVerdict
from .spectra_model import HyperspectralCube, MixingMatrix, Spectrum, WavelengthGrid

MODEL_FORMAT = "sosunmix.model/1"
METRICS_FORMAT = "sosunmix.metrics/1"

PathLike = str | os.PathLike


def atomic_write_text(path: PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: Sequence[str] | None, rows: NDArray[np.float64]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header is not None:
        writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def _read_csv(path: PathLike, header: bool) -> tuple[list[str] | None, NDArray[np.float64]]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    names = None
    if header:
        if not rows:
            raise ValueError(f"{path}: empty file")
        names, rows = [c.strip() for c in rows[0]], rows[1:]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: ragged rows")
    try:
        data = np.array([[float(v) for v in r] for r in rows])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if names is not None and len(names) != width:
        raise ValueError(f"{path}: header has {len(names)} columns, data has {width}")
    return names, data


def write_spectra_csv(
    path: PathLike, spectra: Sequence[Spectrum] | ArrayLike, grid: WavelengthGrid | None = None,
    names: Sequence[str] | None = None,
) -> None:
    """Write spectra as columns next to a wavelength column."""
    if grid is None:
        spectra = list(spectra)  # type: ignore[arg-type]
        grid = spectra[0].grid
        values = np.stack([s.values for s in spectra])
    else:
        values = np.atleast_2d(np.asarray(spectra, dtype=float))
    if values.shape[1] != grid.count:
        raise DimensionError(f"spectra have {values.shape[1]} samples, grid has {grid.count}")
    names = list(names) if names is not None else [f"source_{i}" for i in range(values.shape[0])]
    table = np.column_stack([grid.wavelengths, values.T])
    atomic_write_text(path, csv_text(["wavelength", *names], table))


def read_spectra_csv(path: PathLike) -> tuple[WavelengthGrid, NDArray[np.float64], list[str]]:
    """Return ``(grid, values, names)`` with ``values`` of shape ``(k, T)``."""
    names, table = _read_csv(path, header=True)
    if table.shape[1] < 2:
        raise ValueError(f"{path}: need a wavelength column and at least one spectrum")
    grid = WavelengthGrid.from_wavelengths(table[:, 0])
    return grid, table[:, 1:].T.copy(), names[1:]  # type: ignore[index]


def write_cube_csv(path: PathLike, cube: HyperspectralCube) -> None:
    header = ["wavelength", *[f"pixel_{i}" for i in range(cube.pixels)]]
    table = np.column_stack([cube.grid.wavelengths, cube.data.T])
    atomic_write_text(path, csv_text(header, table))


def read_cube_csv(path: PathLike) -> HyperspectralCube:
    names, table = _read_csv(path, header=True)
    if names[0] != "wavelength" or table.shape[1] < 2:  # type: ignore[index]
        raise ValueError(f"{path}: expected header 'wavelength,pixel_0,...'")
    grid = WavelengthGrid.from_wavelengths(table[:, 0])
    return HyperspectralCube(grid, table[:, 1:].T.copy())


def write_matrix_csv(path: PathLike, matrix: MixingMatrix | ArrayLike, header: bool = True) -> None:
    entries = matrix.entries if isinstance(matrix, MixingMatrix) else np.asarray(matrix, dtype=float)
    names = [f"component_{j}" for j in range(entries.shape[1])] if header else None
    atomic_write_text(path, csv_text(names, entries))


def read_matrix_csv(path: PathLike, header: bool = True) -> NDArray[np.float64]:
    _, data = _read_csv(path, header=header)
    return data


def _grid_dict(grid: WavelengthGrid) -> dict:
    return {"start": grid.start, "step": grid.step, "count": grid.count}


def model_to_dict(model: UnmixingModel) -> dict:
    doc = {
        "format": MODEL_FORMAT,
        "n_sources": model.n_sources,
        "delay": model.delay,
        "mode": model.mode,
        "grid": _grid_dict(model.grid),
        "mixing_estimate": model.mixing_estimate.tolist(),
        "sources": model.sources.tolist(),
        "rotation": model.rotation.tolist(),
        "delayed_spectrum": model.delayed_spectrum.tolist(),
        "signal_values": model.signal_values.tolist(),
        "noise_values": model.noise_values.tolist(),
        "means": model.means.tolist(),
        "warnings": list(model.warnings),
        "sign_correction": None,
    }
    if model.whitener is not None:
        doc["whitener"] = {"q": model.whitener.q.tolist(), "q_pinv": model.whitener.q_pinv.tolist()}
    if model.sign_verdicts is not None:
        doc["sign_correction"] = [
            {"source": i, **v.to_dict()} for i, v in enumerate(model.sign_verdicts)
        ]
    return doc


def model_from_dict(doc: dict) -> UnmixingModel:
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a model document (format={doc.get('format')!r})")
    arr = lambda key: np.asarray(doc[key], dtype=float)  # noqa: E731
    whitener = None
    if doc.get("whitener"):
        whitener = Whitener(np.asarray(doc["whitener"]["q"]), np.asarray(doc["whitener"]["q_pinv"]))
    verdicts = None
    if doc.get("sign_correction") is not None:
        verdicts = tuple(
            SignVerdict(v["decision"], v["baseline"], v["p_max"], v["p_min"], v["rule"])
            for v in doc["sign_correction"]
        )
    model = UnmixingModel(
        mixing_estimate=np.atleast_2d(arr("mixing_estimate")),
        sources=np.atleast_2d(arr("sources")),
        rotation=np.atleast_2d(arr("rotation")),
        delay=int(doc["delay"]),
        n_sources=int(doc["n_sources"]),
        grid=WavelengthGrid(**doc["grid"]),
        delayed_spectrum=arr("delayed_spectrum"),
        mode=doc.get("mode", "sym-evd"),
        signal_values=arr("signal_values"),
        noise_values=arr("noise_values"),
        means=arr("means"),
        whitener=whitener,
        warnings=tuple(doc.get("warnings", ())),
        sign_verdicts=verdicts,
    )
    if model.sources.shape != (model.n_sources, model.grid.count):
        raise DimensionError(f"sources shape {model.sources.shape} inconsistent with n and grid")
    if model.mixing_estimate.shape[1] != model.n_sources:
        raise DimensionError("mixing_estimate column count differs from n_sources")
    return model


def save_model(path: PathLike, model: UnmixingModel, sources_csv: PathLike | None = None) -> None:
    """Write the model JSON and, optionally, the sources as a spectra CSV sidecar."""
    text = json.dumps(model_to_dict(model), indent=1)
    if sources_csv is not None:
        write_spectra_csv(sources_csv, model.sources, grid=model.grid)
    atomic_write_text(path, text + "\n")


def load_model(path: PathLike) -> UnmixingModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))


def write_json(path: PathLike, doc: dict) -> None:
    atomic_write_text(path, json.dumps(doc, indent=1) + "\n")
