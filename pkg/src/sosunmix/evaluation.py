"""Scoring recovered sources and mixing matrices against ground truth.

Blind separation returns sources in arbitrary order, sign and scale, so
estimates are first paired with true components (:func:`match_sources`)
before anything is compared.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import linear_sum_assignment

from .errors import DimensionError, SingularMatrixError, UndefinedCorrelationError
from .spectra_model import MixingMatrix

__all__ = [
    "MatchResult",
    "ConcentrationProfile",
    "correlation_matrix",
    "match_sources",
    "align",
    "amari_index",
    "column_cosines",
    "concentration_profiles",
    "sign_accuracy",
]

EXHAUSTIVE_MAX_N = 6


@dataclass(frozen=True, eq=False)
class MatchResult:
    """Pairing of estimated components with true ones.

    All arrays are indexed by estimated component ``j``:
    ``permutation[j]`` is the true component it was paired with,
    ``signs[j]`` and ``correlations[j]`` the sign and value of the Pearson
    correlation, and ``scales[j] > 0`` the least-squares factor with
    ``truth[permutation[j]] ~ scales[j] * signs[j] * estimate[j]`` on
    mean-removed rows.
    """

    permutation: NDArray[np.int64]
    signs: NDArray[np.float64]
    scales: NDArray[np.float64]
    correlations: NDArray[np.float64]

    @property
    def abs_correlations(self) -> NDArray[np.float64]:
        return np.abs(self.correlations)


@dataclass(frozen=True, eq=False)
class ConcentrationProfile:
    component: int
    weights: NDArray[np.float64]


def _rows(x: ArrayLike, name: str) -> NDArray[np.float64]:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    return arr


def correlation_matrix(truth: ArrayLike, estimate: ArrayLike) -> NDArray[np.float64]:
    """Pearson correlations, ``C[i, j] = corr(truth[i], estimate[j])``."""
    t, e = _rows(truth, "truth"), _rows(estimate, "estimate")
    if t.shape[1] != e.shape[1]:
        raise DimensionError(f"truth has {t.shape[1]} samples, estimate has {e.shape[1]}")
    tc = t - t.mean(axis=1, keepdims=True)
    ec = e - e.mean(axis=1, keepdims=True)
    tn, en = np.linalg.norm(tc, axis=1), np.linalg.norm(ec, axis=1)
    for name, norms in (("truth", tn), ("estimate", en)):
        bad = np.flatnonzero(norms == 0)
        if bad.size:
            raise UndefinedCorrelationError(f"{name} row {int(bad[0])} has zero variance")
    return np.clip((tc @ ec.T) / np.outer(tn, en), -1.0, 1.0)


def _assign(score: NDArray[np.float64]) -> NDArray[np.int64]:
    # score[i, j] for true i, estimate j; returns true index per estimate.
    n = score.shape[0]
    if n <= EXHAUSTIVE_MAX_N:
        best, best_perm = -np.inf, None
        cols = np.arange(n)
        for perm in itertools.permutations(range(n)):
            total = score[list(perm), cols].sum()
            if total > best:
                best, best_perm = total, perm
        return np.array(best_perm, dtype=np.int64)
    rows, cols = linear_sum_assignment(score, maximize=True)
    out = np.empty(n, dtype=np.int64)
    out[cols] = rows
    return out


def match_sources(truth: ArrayLike, estimate: ArrayLike) -> MatchResult:
    """Pair estimated rows with true rows by maximising the summed ``|r|``.

    Exhaustive search for up to six components, Hungarian assignment above.
    """
    t, e = _rows(truth, "truth"), _rows(estimate, "estimate")
    if t.shape != e.shape:
        raise DimensionError(f"truth {t.shape} and estimate {e.shape} differ in shape")
    C = correlation_matrix(t, e)
    perm = _assign(np.abs(C))
    cols = np.arange(e.shape[0])
    r = C[perm, cols]
    signs = np.where(r < 0, -1.0, 1.0)
    tc = t - t.mean(axis=1, keepdims=True)
    ec = (e - e.mean(axis=1, keepdims=True)) * signs[:, None]
    scales = np.einsum("ij,ij->i", tc[perm], ec) / np.einsum("ij,ij->i", ec, ec)
    return MatchResult(perm, signs, scales, r)


def align(estimate: ArrayLike, match: MatchResult) -> NDArray[np.float64]:
    """Reorder, re-sign and rescale mean-removed estimates onto the truth rows."""
    e = _rows(estimate, "estimate")
    ec = e - e.mean(axis=1, keepdims=True)
    out = np.empty_like(ec)
    out[match.permutation] = ec * (match.signs * match.scales)[:, None]
    return out


def amari_index(A_true: ArrayLike, A_est: ArrayLike) -> float:
    """Amari performance index of ``G = pinv(A_est) @ A_true``.

    Both matrices have their columns scaled to unit norm first. Without
    that step the index would change when a column of either argument is
    rescaled, and separation is only defined up to such scalings. Zero
    exactly when ``G`` is a scaled permutation; bounded by 1.
    """
    A = np.asarray(A_true, dtype=float)
    B = np.asarray(A_est, dtype=float)
    if A.ndim != 2 or A.shape != B.shape:
        raise DimensionError(f"mixing matrices differ in shape: {A.shape} vs {B.shape}")
    n = B.shape[1]
    if np.linalg.matrix_rank(B) < n:
        raise SingularMatrixError("estimated mixing matrix is rank deficient")
    if n == 1:
        return 0.0
    A = A / np.linalg.norm(A, axis=0)
    B = B / np.linalg.norm(B, axis=0)
    G = np.abs(np.linalg.pinv(B) @ A)
    rows = (G.sum(axis=1) / G.max(axis=1) - 1.0).sum()
    cols = (G.sum(axis=0) / G.max(axis=0) - 1.0).sum()
    return float((rows + cols) / (2.0 * n * (n - 1)))


def column_cosines(A_true: ArrayLike, A_est: ArrayLike, match: MatchResult) -> NDArray[np.float64]:
    """Signed cosine between estimated column ``j`` and true column ``permutation[j]``.

    The match signs are deliberately not applied, so an inverted profile
    scores negative.
    """
    A = np.asarray(A_true, dtype=float)
    B = np.asarray(A_est, dtype=float)
    if A.shape != B.shape:
        raise DimensionError(f"mixing matrices differ in shape: {A.shape} vs {B.shape}")
    At = A[:, match.permutation]
    return np.einsum("ij,ij->j", At, B) / (np.linalg.norm(At, axis=0) * np.linalg.norm(B, axis=0))


def concentration_profiles(A: MixingMatrix | ArrayLike) -> list[ConcentrationProfile]:
    """One per-pixel weight vector per component (the columns of ``A``)."""
    entries = A.entries if isinstance(A, MixingMatrix) else np.asarray(A, dtype=float)
    if entries.ndim != 2:
        raise DimensionError("mixing matrix must be 2-D")
    return [ConcentrationProfile(j, entries[:, j].copy()) for j in range(entries.shape[1])]


def sign_accuracy(truth: ArrayLike, corrected: ArrayLike) -> float:
    """Fraction of matched components whose correlation with the truth is positive."""
    match = match_sources(truth, corrected)
    return float(np.mean(match.correlations > 0))
