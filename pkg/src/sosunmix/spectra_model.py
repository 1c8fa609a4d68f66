"""Spectra, hyperspectral cubes and the linear forward mixing model.

A cube is stored as an ``(m, T)`` array: one row per pixel, one column per
wavelength sample. Pure spectra are built as sums of Gaussian peaks on a
flat baseline and mixed as ``X = A @ S + N``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionError

__all__ = [
    "WavelengthGrid",
    "Spectrum",
    "PeakModel",
    "MixingMatrix",
    "HyperspectralCube",
    "NoiseSpec",
    "synth_spectrum",
    "mix",
    "noise_for_snr",
    "paper_two_component_matrix",
    "paper_three_component_matrix",
]


def _frozen_array(values: ArrayLike, ndim: int, name: str) -> NDArray[np.float64]:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WavelengthGrid:
    """Uniform wavelength axis in nm. The default spans 400-1000 nm."""

    start: float = 400.0
    step: float = 2.0
    count: int = 301

    def __post_init__(self) -> None:
        if not (np.isfinite(self.start) and np.isfinite(self.step)):
            raise ValueError("grid start and step must be finite")
        if self.step <= 0:
            raise ValueError(f"grid step must be positive, got {self.step}")
        if int(self.count) != self.count or self.count < 2:
            raise ValueError(f"grid count must be an integer >= 2, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @property
    def wavelengths(self) -> NDArray[np.float64]:
        return self.start + self.step * np.arange(self.count)

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.count - 1)

    @classmethod
    def from_wavelengths(cls, wavelengths: ArrayLike, rtol: float = 1e-6) -> "WavelengthGrid":
        """Recover a grid from sampled wavelengths, which must be uniformly spaced."""
        w = np.asarray(wavelengths, dtype=float)
        if w.ndim != 1 or w.size < 2:
            raise DimensionError("need at least two wavelength samples")
        d = np.diff(w)
        step = (w[-1] - w[0]) / (w.size - 1)
        if not np.allclose(d, step, rtol=rtol, atol=0.0):
            raise ValueError("wavelength samples are not uniformly spaced")
        return cls(start=float(w[0]), step=float(step), count=w.size)


@dataclass(frozen=True, eq=False)
class Spectrum:
    grid: WavelengthGrid
    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        values = _frozen_array(self.values, 1, "spectrum values")
        if values.size != self.grid.count:
            raise DimensionError(
                f"spectrum has {values.size} values but grid has {self.grid.count} samples"
            )
        object.__setattr__(self, "values", values)

    def __neg__(self) -> "Spectrum":
        return Spectrum(self.grid, -self.values)

    def __add__(self, other: "Spectrum") -> "Spectrum":
        if other.grid != self.grid:
            raise DimensionError("cannot add spectra on different grids")
        return Spectrum(self.grid, self.values + other.values)


@dataclass(frozen=True)
class PeakModel:
    """Gaussian band: ``height * exp(-(x - center)**2 / (2 * width**2))``."""

    center: float
    width: float
    height: float = 1.0

    def __post_init__(self) -> None:
        if not all(np.isfinite(v) for v in (self.center, self.width, self.height)):
            raise ValueError(f"non-finite peak parameter in {self!r}")
        if self.width <= 0:
            raise ValueError(f"peak width must be positive, got {self.width}")
        if self.height == 0:
            raise ValueError("peak height must be non-zero")


@dataclass(frozen=True, eq=False)
class MixingMatrix:
    """Pixel-by-component concentration weights, shape ``(m, n)`` with ``m >= n``.

    Entries must be non-negative unless ``allow_negative`` is set; estimated
    mixing matrices are kept as plain arrays and never pass through here.
    """

    entries: NDArray[np.float64]
    allow_negative: bool = field(default=False, repr=False)

    def __post_init__(self) -> None:
        entries = _frozen_array(self.entries, 2, "mixing matrix")
        m, n = entries.shape
        if n < 1 or m < n:
            raise DimensionError(f"mixing matrix must be m x n with m >= n >= 1, got {entries.shape}")
        if not self.allow_negative and np.any(entries < 0):
            raise ValueError("mixing matrix entries must be non-negative")
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape  # type: ignore[return-value]

    @property
    def pixels(self) -> int:
        return self.entries.shape[0]

    @property
    def components(self) -> int:
        return self.entries.shape[1]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True, eq=False)
class HyperspectralCube:
    """Measured mixture spectra, ``data[i]`` being the spectrum of pixel ``i``."""

    grid: WavelengthGrid
    data: NDArray[np.float64]

    def __post_init__(self) -> None:
        data = _frozen_array(self.data, 2, "cube data")
        if data.shape[1] != self.grid.count:
            raise DimensionError(
                f"cube has {data.shape[1]} wavelength samples but grid has {self.grid.count}"
            )
        if data.shape[0] < 1:
            raise DimensionError("cube has no pixels")
        object.__setattr__(self, "data", data)

    @property
    def pixels(self) -> int:
        return self.data.shape[0]

    @property
    def samples(self) -> int:
        return self.data.shape[1]

    def spectrum(self, pixel: int) -> Spectrum:
        return Spectrum(self.grid, self.data[pixel])


@dataclass(frozen=True)
class NoiseSpec:
    """Additive i.i.d. measurement noise. ``sigma`` is zero exactly when ``kind`` is ``"none"``."""

    kind: str = "none"
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("none", "gaussian"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ValueError(f"noise sigma must be finite and >= 0, got {self.sigma}")
        if (self.sigma == 0) != (self.kind == "none"):
            raise ValueError("sigma must be 0 for kind 'none' and > 0 for kind 'gaussian'")

    @classmethod
    def gaussian(cls, sigma: float, seed: int = 0) -> "NoiseSpec":
        if sigma == 0:
            return cls("none", 0.0, seed)
        return cls("gaussian", float(sigma), int(seed))


def synth_spectrum(
    peaks: Sequence[PeakModel], baseline: float, grid: WavelengthGrid
) -> Spectrum:
    """Sum of Gaussian peaks on a constant baseline, sampled on ``grid``."""
    if not np.isfinite(baseline):
        raise ValueError("baseline must be finite")
    x = grid.wavelengths
    values = np.full(grid.count, float(baseline))
    for p in peaks:
        values += p.height * np.exp(-((x - p.center) ** 2) / (2.0 * p.width**2))
    return Spectrum(grid, values)


def mix(
    A: MixingMatrix | ArrayLike,
    sources: Sequence[Spectrum],
    noise: NoiseSpec = NoiseSpec(),
) -> HyperspectralCube:
    """Forward model ``X = A @ S + N``.

    Parameters
    ----------
    A : MixingMatrix or array_like, shape (m, n)
    sources : sequence of n Spectrum on one shared grid
    noise : NoiseSpec
        Gaussian noise is drawn from ``numpy.random.default_rng(seed)``, so
        equal specs give bit-identical cubes.

    Returns
    -------
    HyperspectralCube
    """
    entries = A.entries if isinstance(A, MixingMatrix) else np.asarray(A, dtype=float)
    if entries.ndim != 2:
        raise DimensionError("mixing matrix must be 2-D")
    if len(sources) == 0:
        raise DimensionError("need at least one source spectrum")
    grid = sources[0].grid
    if any(s.grid != grid for s in sources[1:]):
        raise DimensionError("all source spectra must share one wavelength grid")
    if entries.shape[1] != len(sources):
        raise DimensionError(
            f"mixing matrix has {entries.shape[1]} columns but {len(sources)} sources were given"
        )
    S = np.stack([s.values for s in sources])
    data = entries @ S
    if noise.kind == "gaussian":
        rng = np.random.default_rng(noise.seed)
        data = data + rng.normal(0.0, noise.sigma, size=data.shape)
    return HyperspectralCube(grid, data)


def noise_for_snr(clean: HyperspectralCube | ArrayLike, snr_db: float, seed: int = 0) -> NoiseSpec:
    """Gaussian noise whose power sits ``snr_db`` below the per-pixel variance of ``clean``.

    Signal power is measured on the mean-removed cube so that a constant
    offset does not inflate the SNR.
    """
    data = clean.data if isinstance(clean, HyperspectralCube) else np.asarray(clean, dtype=float)
    centered = data - data.mean(axis=1, keepdims=True)
    power = float(np.mean(centered**2))
    return NoiseSpec.gaussian(np.sqrt(power / 10.0 ** (snr_db / 10.0)), seed)


_TWO_COMPONENT = [
    [0.2, 0.8],
    [0.8, 0.2],
    [0.4, 0.6],
    [0.3, 0.7],
    [0.9, 0.1],
    [0.0, 1.0],
    [1.0, 0.0],
]

# As printed: one row per component, one column per pixel.
_THREE_COMPONENT_PRINTED = [
    [0.2, 0.7, 0.1, 0.6, 0.1, 0.3, 0.2, 0.4, 0.4],
    [0.1, 0.5, 0.4, 0.7, 0.1, 0.2, 0.0, 0.7, 0.3],
    [0.7, 0.1, 0.2, 0.0, 0.7, 0.3, 0.7, 0.2, 0.1],
]


def paper_two_component_matrix() -> MixingMatrix:
    """7 pixels x 2 components; the last two pixels are pure."""
    return MixingMatrix(np.array(_TWO_COMPONENT))


def paper_three_component_matrix() -> MixingMatrix:
    """9 pixels x 3 components (the printed 3 x 9 table, transposed)."""
    return MixingMatrix(np.array(_THREE_COMPONENT_PRINTED).T)
