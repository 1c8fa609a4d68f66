"""Peak-direction judgment for recovered spectra.

Blind separation leaves the sign of every source undetermined. Absorbance
spectra look like long flat stretches with peaks rising above them, so each
recovered spectrum is judged against a baseline taken from its histogram:

1. histogram the intensities (10 equal-width bins by default) and take the
   centre of the most populated bin as the baseline ``b``;
2. locate interior extrema from sign changes of the first difference, giving
   the largest extremum ``p_max`` and the smallest ``p_min``;
3. keep or flip the spectrum according to where ``p_max`` and ``p_min`` sit
   relative to ``b``:

   ==============  ==============  =======================  =======
   p_max - b       p_min - b       magnitudes               verdict
   ==============  ==============  =======================  =======
   > 0             > 0                                      keep
   > 0             < 0             ``|max| > |min|``        keep
   < 0             < 0                                      flip
   > 0             < 0             ``|max| < |min|``        flip
   ==============  ==============  =======================  =======

   Anything on a boundary (a difference of exactly zero, or equal
   magnitudes) is kept.

Flipping a source also negates the matching column of the mixing estimate,
so ``mixing_estimate @ sources`` does not change.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .amuse import UnmixingModel
from .spectra_model import Spectrum

__all__ = [
    "Histogram",
    "ExtremaSet",
    "SignVerdict",
    "histogram",
    "baseline",
    "find_extrema",
    "judge_direction",
    "judge_spectrum",
    "correct_signs",
]

DEFAULT_BINS = 10

Rule = Literal["both-above", "max-dominant", "both-below", "min-dominant", "boundary"]


def _values(s: Spectrum | ArrayLike) -> NDArray[np.float64]:
    return s.values if isinstance(s, Spectrum) else np.asarray(s, dtype=float).ravel()


@dataclass(frozen=True, eq=False)
class Histogram:
    bin_centers: NDArray[np.float64]
    counts: NDArray[np.int64]

    @property
    def bin_count(self) -> int:
        return self.counts.size

    @property
    def bin_width(self) -> float:
        if self.bin_centers.size < 2:
            return 0.0
        return float(self.bin_centers[1] - self.bin_centers[0])


@dataclass(frozen=True)
class ExtremaSet:
    """Interior extrema as ``(index, value)`` pairs, indices 0-based."""

    maxima: tuple[tuple[int, float], ...]
    minima: tuple[tuple[int, float], ...]
    p_max: float
    p_min: float

    @property
    def fallback(self) -> bool:
        """True when no interior extremum exists and endpoints were used."""
        return not self.maxima and not self.minima


@dataclass(frozen=True)
class SignVerdict:
    decision: Literal["keep", "flip"]
    baseline: float
    p_max: float
    p_min: float
    rule_fired: Rule

    @property
    def flip(self) -> bool:
        return self.decision == "flip"

    def to_dict(self) -> dict:
        return {
            "decision": self.decision,
            "baseline": self.baseline,
            "p_max": self.p_max,
            "p_min": self.p_min,
            "rule": self.rule_fired,
        }


def histogram(s: Spectrum | ArrayLike, bins: int = DEFAULT_BINS) -> Histogram:
    """Equal-width histogram over ``[min(s), max(s)]``.

    A value ``v`` goes to bin ``ceil((v - min) / w)`` (1-based) clamped to
    ``[1, bins]``, so an edge value belongs to the bin below it and the
    minimum lands in the first bin. A constant input gives a single bin.
    """
    v = _values(s)
    if v.size == 0:
        raise ValueError("cannot histogram an empty spectrum")
    if int(bins) != bins or bins < 1:
        raise ValueError(f"bins must be a positive integer, got {bins}")
    bins = int(bins)
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        return Histogram(np.array([lo]), np.array([v.size], dtype=np.int64))
    w = (hi - lo) / bins
    idx = np.clip(np.ceil((v - lo) / w).astype(np.int64), 1, bins) - 1
    counts = np.bincount(idx, minlength=bins).astype(np.int64)
    centers = lo + (np.arange(bins) + 0.5) * w
    return Histogram(centers, counts)


def baseline(h: Histogram) -> float:
    """Centre of the most populated bin; ties go to the lowest centre."""
    return float(h.bin_centers[int(np.argmax(h.counts))])


def find_extrema(s: Spectrum | ArrayLike) -> ExtremaSet:
    """Interior maxima and minima from sign changes of the first difference.

    Zero differences are skipped, so a flat-topped peak is reported once, at
    the first index of its plateau. Without any interior extremum ``p_max``
    and ``p_min`` fall back to the global max and min.
    """
    v = _values(s)
    if v.size < 3:
        raise ValueError(f"need at least 3 samples to find extrema, got {v.size}")
    d = np.diff(v)
    nz = np.flatnonzero(d)
    maxima: list[tuple[int, float]] = []
    minima: list[tuple[int, float]] = []
    if nz.size >= 2:
        left, right = nz[:-1], nz[1:]
        sl, sr = np.sign(d[left]), np.sign(d[right])
        # plateau between left and right starts at left + 1
        for i in np.flatnonzero((sl > 0) & (sr < 0)):
            k = int(left[i] + 1)
            maxima.append((k, float(v[k])))
        for i in np.flatnonzero((sl < 0) & (sr > 0)):
            k = int(left[i] + 1)
            minima.append((k, float(v[k])))
    if maxima or minima:
        values = [val for _, val in maxima + minima]
        p_max, p_min = max(values), min(values)
    else:
        p_max, p_min = float(v.max()), float(v.min())
    return ExtremaSet(tuple(maxima), tuple(minima), p_max, p_min)


def judge_direction(b: float, p_max: float, p_min: float) -> SignVerdict:
    """Keep/flip decision from the baseline and the extreme peak values."""
    if p_max < p_min:
        raise ValueError(f"p_max ({p_max}) must not be smaller than p_min ({p_min})")
    up = p_max - b
    down = p_min - b
    decision, rule = "keep", "boundary"
    if up > 0 and down > 0:
        rule = "both-above"
    elif up < 0 and down < 0:
        decision, rule = "flip", "both-below"
    elif up > 0 and down < 0:
        if abs(up) > abs(down):
            rule = "max-dominant"
        elif abs(up) < abs(down):
            decision, rule = "flip", "min-dominant"
    return SignVerdict(decision, float(b), float(p_max), float(p_min), rule)


def judge_spectrum(s: Spectrum | ArrayLike, bins: int = DEFAULT_BINS) -> SignVerdict:
    """Histogram baseline, extrema and verdict for one spectrum."""
    ext = find_extrema(s)
    return judge_direction(baseline(histogram(s, bins)), ext.p_max, ext.p_min)


def correct_signs(model: UnmixingModel, bins: int = DEFAULT_BINS) -> UnmixingModel:
    """Flip every source judged upside down, together with its mixing column.

    The verdicts are recorded on the returned model as ``sign_verdicts``, in
    source order.
    """
    verdicts = tuple(judge_spectrum(row, bins) for row in model.sources)
    signs = np.array([-1.0 if v.flip else 1.0 for v in verdicts])
    return replace(
        model,
        sources=model.sources * signs[:, None],
        mixing_estimate=model.mixing_estimate * signs[None, :],
        rotation=model.rotation * signs[None, :],
        sign_verdicts=verdicts,
    )
