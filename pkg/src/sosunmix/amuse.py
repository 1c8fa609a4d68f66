"""AMUSE: blind source separation from a single lagged covariance.

The pipeline is

    center -> covariance_zero_lag -> signal_subspace -> whiten
           -> delayed_covariance -> rotation_from_delayed
           -> estimate_mixing / estimate_sources

Every step is a pure function on arrays; :func:`amuse` composes them into an
:class:`UnmixingModel`. Lags are counted in wavelength samples.

Eigenvector signs returned by LAPACK are arbitrary. Each eigenvector is
normalised so that its largest-magnitude entry is positive, which makes the
output identical across BLAS builds; the sign of a recovered source is still
not meaningful until :func:`sosunmix.sign_correction.correct_signs` is applied.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import (
    DimensionError,
    IllSeparatedSubspaceWarning,
    NonIdentifiableDelayWarning,
    SingularSubspaceError,
)
from .spectra_model import HyperspectralCube, WavelengthGrid

__all__ = [
    "CenteredCube",
    "SubspaceSplit",
    "Whitener",
    "UnmixingModel",
    "center",
    "covariance_zero_lag",
    "signal_subspace",
    "whiten",
    "delayed_covariance",
    "rotation_from_delayed",
    "estimate_mixing",
    "estimate_sources",
    "amuse",
]

RotationMode = Literal["sym-evd", "plain-svd"]
ROTATION_MODES = ("sym-evd", "plain-svd")

AUTO_RANK_RTOL = 1e-9
SUBSPACE_GAP_TOL = 1e-12
SINGULAR_EIGENVALUE_TOL = 1e-14
DELAY_DEGENERACY_RTOL = 1e-10


def _fix_signs(vectors: NDArray[np.float64]) -> NDArray[np.float64]:
    # Largest-magnitude entry of each column made positive; first one wins ties.
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


@dataclass(frozen=True, eq=False)
class CenteredCube:
    data: NDArray[np.float64]
    means: NDArray[np.float64]

    @property
    def samples(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True, eq=False)
class SubspaceSplit:
    """Eigen-split of the zero-lag covariance into signal and noise parts.

    Eigenvalues are ordered dominant-first. ``warnings`` lists messages for
    an ill-separated split (``signal_values[-1]`` equal to ``noise_values[0]``).
    """

    signal_vectors: NDArray[np.float64]
    signal_values: NDArray[np.float64]
    noise_vectors: NDArray[np.float64]
    noise_values: NDArray[np.float64]
    warnings: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.signal_values.size


@dataclass(frozen=True, eq=False)
class Whitener:
    """``q`` maps centred data to white coordinates, ``q_pinv`` maps back."""

    q: NDArray[np.float64]
    q_pinv: NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class UnmixingModel:
    """Result of an AMUSE run.

    Attributes
    ----------
    mixing_estimate : ndarray, shape (m, n)
        Estimated mixing matrix; column ``j`` is the concentration profile of
        source ``j``.
    sources : ndarray, shape (n, T)
        Estimated pure spectra, one per row, zero mean and unit variance.
    rotation : ndarray, shape (n, n)
        Orthogonal rotation taken from the delayed covariance.
    delay : int
    n_sources : int
    grid : WavelengthGrid
    delayed_spectrum : ndarray, shape (n,)
        Eigenvalues (``sym-evd``) or singular values (``plain-svd``) of the
        delayed covariance, in the order of the recovered sources.
    sign_verdicts : tuple or None
        Set by :func:`sosunmix.sign_correction.correct_signs`.
    """

    mixing_estimate: NDArray[np.float64]
    sources: NDArray[np.float64]
    rotation: NDArray[np.float64]
    delay: int
    n_sources: int
    grid: WavelengthGrid
    delayed_spectrum: NDArray[np.float64]
    mode: str = "sym-evd"
    signal_values: NDArray[np.float64] = field(default_factory=lambda: np.empty(0))
    noise_values: NDArray[np.float64] = field(default_factory=lambda: np.empty(0))
    means: NDArray[np.float64] = field(default_factory=lambda: np.empty(0))
    whitener: Whitener | None = None
    warnings: tuple[str, ...] = ()
    sign_verdicts: tuple | None = None

    def reconstruct(self) -> NDArray[np.float64]:
        """Centred cube implied by the model, ``mixing_estimate @ sources``."""
        return self.mixing_estimate @ self.sources


def center(cube: HyperspectralCube | ArrayLike) -> CenteredCube:
    """Subtract each pixel's mean over wavelength."""
    data = cube.data if isinstance(cube, HyperspectralCube) else np.asarray(cube, dtype=float)
    if data.ndim != 2 or data.size == 0:
        raise DimensionError(f"cube must be a non-empty 2-D array, got shape {data.shape}")
    if data.shape[1] < 2:
        raise DimensionError("need at least two wavelength samples to centre")
    means = data.mean(axis=1)
    return CenteredCube(data - means[:, None], means)


def covariance_zero_lag(c: CenteredCube | ArrayLike) -> NDArray[np.float64]:
    """``(1/T) X X^T`` of the centred data."""
    data = c.data if isinstance(c, CenteredCube) else np.asarray(c, dtype=float)
    if data.ndim != 2 or data.shape[1] == 0:
        raise DimensionError(f"expected a non-empty 2-D array, got shape {data.shape}")
    R = data @ data.T / data.shape[1]
    return (R + R.T) / 2.0


def signal_subspace(
    R: ArrayLike, n: int | Literal["auto"] = "auto", rel_tol: float = AUTO_RANK_RTOL
) -> SubspaceSplit:
    """Split a symmetric PSD matrix into dominant (signal) and residual eigenpairs.

    With ``n="auto"`` the signal dimension is the number of eigenvalues larger
    than ``rel_tol`` times the largest one.
    """
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise DimensionError(f"covariance must be square, got shape {R.shape}")
    m = R.shape[0]
    values, vectors = np.linalg.eigh((R + R.T) / 2.0)
    order = np.argsort(values)[::-1]
    values, vectors = values[order], _fix_signs(vectors[:, order])

    if n == "auto":
        if values[0] <= 0:
            raise SingularSubspaceError("covariance is zero; no signal subspace")
        n = int(np.sum(values > rel_tol * values[0]))
    else:
        n = int(n)
        if not 1 <= n <= m:
            raise ValueError(f"source count must satisfy 1 <= n <= {m}, got {n}")

    notes: list[str] = []
    if n < m and abs(values[n - 1] - values[n]) <= SUBSPACE_GAP_TOL:
        msg = (
            f"signal eigenvalue {n} ({values[n - 1]:.6g}) equals noise eigenvalue "
            f"{n + 1} ({values[n]:.6g}); the signal subspace is not well defined"
        )
        warnings.warn(msg, IllSeparatedSubspaceWarning, stacklevel=2)
        notes.append(msg)

    return SubspaceSplit(
        signal_vectors=vectors[:, :n],
        signal_values=values[:n],
        noise_vectors=vectors[:, n:],
        noise_values=values[n:],
        warnings=tuple(notes),
    )


def whiten(
    c: CenteredCube | ArrayLike, split: SubspaceSplit
) -> tuple[NDArray[np.float64], Whitener]:
    """Project onto the signal subspace and rescale to unit variance.

    Returns the ``(n, T)`` whitened data and the :class:`Whitener` holding
    ``Q = L^-1/2 V^T`` and ``Q+ = V L^1/2``.
    """
    data = c.data if isinstance(c, CenteredCube) else np.asarray(c, dtype=float)
    V, lam = split.signal_vectors, split.signal_values
    if data.shape[0] != V.shape[0]:
        raise DimensionError(
            f"cube has {data.shape[0]} pixels but the subspace was built for {V.shape[0]}"
        )
    scale = max(float(lam[0]), 1.0) if lam.size else 1.0
    if lam.size == 0 or np.any(lam <= SINGULAR_EIGENVALUE_TOL * scale):
        raise SingularSubspaceError(
            f"signal eigenvalues {lam} include a zero; reduce the source count"
        )
    q = (V / np.sqrt(lam)).T
    q_pinv = V * np.sqrt(lam)
    return q @ data, Whitener(q, q_pinv)


def delayed_covariance(whitened: ArrayLike, delay: int) -> NDArray[np.float64]:
    """Lagged covariance ``sum_k z(k) z(k - delay)^T / (T - delay)``.

    Normalised by the number of summed products rather than by ``T``.
    """
    Z = np.asarray(whitened, dtype=float)
    if Z.ndim != 2:
        raise DimensionError(f"whitened data must be 2-D, got shape {Z.shape}")
    T = Z.shape[1]
    if int(delay) != delay or delay < 1:
        raise ValueError(f"delay must be a positive integer, got {delay}")
    if delay >= T:
        raise ValueError(f"delay {delay} must be smaller than the number of samples {T}")
    delay = int(delay)
    return Z[:, delay:] @ Z[:, :-delay].T / (T - delay)


def rotation_from_delayed(
    R_tau: ArrayLike, mode: RotationMode = "sym-evd"
) -> tuple[NDArray[np.float64], NDArray[np.float64], tuple[str, ...]]:
    """Orthogonal rotation that diagonalises the delayed covariance.

    ``sym-evd`` eigendecomposes ``(R + R^T)/2`` and orders eigenvectors by
    decreasing absolute eigenvalue. ``plain-svd`` takes the left singular
    vectors of ``R`` itself.

    Returns
    -------
    rotation : ndarray, shape (n, n)
    spectrum : ndarray, shape (n,)
    warnings : tuple of str
        Non-empty when two spectrum entries coincide, in which case the
        rotation is not unique and sources are mixed at this delay.
    """
    R = np.asarray(R_tau, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise DimensionError(f"delayed covariance must be square, got shape {R.shape}")
    if not np.all(np.isfinite(R)):
        raise ValueError("delayed covariance contains non-finite values")

    if mode == "sym-evd":
        values, vectors = np.linalg.eigh((R + R.T) / 2.0)
        order = np.argsort(-np.abs(values), kind="stable")
        spectrum, rotation = values[order], vectors[:, order]
    elif mode == "plain-svd":
        rotation, spectrum, _ = np.linalg.svd(R)
    else:
        raise ValueError(f"unknown rotation mode {mode!r}; use one of {ROTATION_MODES}")
    rotation = _fix_signs(rotation)

    notes: list[str] = []
    n = spectrum.size
    if n > 1:
        # whitened rows have unit variance, so |spectrum| <= 1 sets the scale
        tol = DELAY_DEGENERACY_RTOL * max(np.max(np.abs(spectrum)), 1.0)
        gaps = np.abs(spectrum[:, None] - spectrum[None, :])
        np.fill_diagonal(gaps, np.inf)
        if np.any(gaps <= tol):
            msg = (
                f"delayed covariance spectrum {np.round(spectrum, 12)} has repeated entries; "
                "sources are not identifiable at this delay, try another one"
            )
            warnings.warn(msg, NonIdentifiableDelayWarning, stacklevel=2)
            notes.append(msg)
    return rotation, spectrum, tuple(notes)


def estimate_mixing(w: Whitener, rotation: ArrayLike) -> NDArray[np.float64]:
    """``Q+ U``: columns are the mixing-matrix estimates of each source."""
    U = np.asarray(rotation, dtype=float)
    if w.q_pinv.shape[1] != U.shape[0]:
        raise DimensionError(f"whitener rank {w.q_pinv.shape[1]} does not match rotation {U.shape}")
    return w.q_pinv @ U


def estimate_sources(rotation: ArrayLike, whitened: ArrayLike) -> NDArray[np.float64]:
    """``U^T z``: the recovered source signals."""
    U = np.asarray(rotation, dtype=float)
    Z = np.asarray(whitened, dtype=float)
    if U.shape[0] != Z.shape[0]:
        raise DimensionError(f"rotation {U.shape} does not match whitened data {Z.shape}")
    return U.T @ Z


def amuse(
    cube: HyperspectralCube,
    n: int | Literal["auto"] = "auto",
    delay: int = 1,
    mode: RotationMode = "sym-evd",
    rel_tol: float = AUTO_RANK_RTOL,
) -> UnmixingModel:
    """Separate ``cube`` into pure spectra and concentration profiles.

    Parameters
    ----------
    cube : HyperspectralCube
    n : int or "auto"
        Number of sources. ``"auto"`` counts the zero-lag eigenvalues above
        ``rel_tol`` times the largest.
    delay : int
        Lag in wavelength samples, ``1 <= delay < T``.
    mode : {"sym-evd", "plain-svd"}

    Returns
    -------
    UnmixingModel
    """
    if mode not in ROTATION_MODES:
        raise ValueError(f"unknown rotation mode {mode!r}; use one of {ROTATION_MODES}")
    if int(delay) != delay or delay < 1:
        raise ValueError(f"delay must be a positive integer, got {delay}")
    if delay >= cube.samples:
        raise ValueError(f"delay {delay} must be smaller than the number of samples {cube.samples}")

    c = center(cube)
    split = signal_subspace(covariance_zero_lag(c), n, rel_tol=rel_tol)
    Z, w = whiten(c, split)
    rotation, spectrum, rot_notes = rotation_from_delayed(delayed_covariance(Z, delay), mode)
    return UnmixingModel(
        mixing_estimate=estimate_mixing(w, rotation),
        sources=estimate_sources(rotation, Z),
        rotation=rotation,
        delay=int(delay),
        n_sources=split.n,
        grid=cube.grid,
        delayed_spectrum=spectrum,
        mode=mode,
        signal_values=split.signal_values,
        noise_values=split.noise_values,
        means=c.means,
        whitener=w,
        warnings=split.warnings + rot_notes,
    )
