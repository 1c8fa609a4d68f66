"""
Designing pure spectra that AMUSE can separate
==============================================

AMUSE finds the one rotation that makes both the zero-lag and the lagged
covariance of the whitened data diagonal. It returns the true sources only if
the true sources themselves have diagonal covariances at both lags. Gaussian
bands on a flat baseline are correlated almost always, so the fixture spectra
need a little tuning: for each fixture we free a few peak centres/widths and
solve for zero cross-covariance at lag 0 and lag 1.

Run ``python demos/06_designing_fixtures.py --write`` to regenerate the files
in ``src/sosunmix/fixtures``.
"""

import itertools
import json
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares

from sosunmix import (
    PeakModel,
    WavelengthGrid,
    amuse,
    delayed_covariance,
    match_sources,
    mix,
    paper_three_component_matrix,
    paper_two_component_matrix,
    synth_spectrum,
)
from sosunmix.io import write_matrix_csv, write_spectra_csv

grid = WavelengthGrid()  # 400-1000 nm, 2 nm steps


def cross_terms(S):
    """Normalised lag-0 and symmetrised lag-1 cross-covariances of every pair."""
    Sc = S - S.mean(axis=1, keepdims=True)
    sd = Sc.std(axis=1)
    R0 = Sc @ Sc.T / S.shape[1]
    R1 = delayed_covariance(Sc, 1)
    out = []
    for i, j in itertools.combinations(range(len(S)), 2):
        out += [R0[i, j] / (sd[i] * sd[j]), (R1[i, j] + R1[j, i]) / (2 * sd[i] * sd[j])]
    return np.array(out)


def spectra(components):
    return np.stack([
        synth_spectrum([PeakModel(*p) for p in peaks], base, grid).values
        for base, peaks in components
    ])


def solve(layout, x0, lo, hi):
    sol = least_squares(
        lambda p: 1e3 * cross_terms(spectra(layout(p))), x0, bounds=(lo, hi),
        xtol=1e-15, ftol=1e-15, gtol=1e-15,
    )
    return sol.x


# %%
# Two components: a sharp band and a broader one. The sharp band's centre and
# the broad band's width are free.


def two_component(p):
    c1, w2 = p
    return [(0.05, [(c1, 10.0, 1.0)]), (0.08, [(720.0, w2, 0.8)])]


p2 = solve(two_component, [600.0, 40.0], [420.0, 5.0], [980.0, 300.0])
S2 = spectra(two_component(p2))
print("two-component parameters:", p2.tolist())
print("  max |cross-correlation|:", np.abs(cross_terms(S2)).max())

sources = [synth_spectrum([PeakModel(*pk) for pk in peaks], b, grid) for b, peaks in two_component(p2)]
model = amuse(mix(paper_two_component_matrix(), sources))
print("  AMUSE matched r:", match_sources(S2, model.sources).correlations)

# %%
# Three components: a sharp band, a medium band and a two-band spectrum. Nine
# parameters are free; the starting point below comes from a random search
# that favoured large gaps between the lag-1 eigenvalues.


def three_component(p):
    c1, w1, c2, w2, c3, w3, c4, w4, h4 = p
    return [
        (0.05, [(c1, w1, 1.0)]),
        (0.10, [(c2, w2, 0.8)]),
        (0.05, [(c3, w3, 0.9), (c4, w4, h4)]),
    ]


x3 = [668.2, 8.24, 593.0, 38.7, 446.1, 107.9, 742.4, 63.0, 0.674]
p3 = solve(three_component, x3, [420, 8, 420, 8, 420, 8, 420, 8, 0.2], [980, 120, 980, 150, 980, 120, 980, 120, 1.5])
S3 = spectra(three_component(p3))
print("three-component parameters:", p3.tolist())
print("  max |cross-correlation|:", np.abs(cross_terms(S3)).max())

# %%
# A mixing matrix on which raw AMUSE returns one spectrum upside down. The rows
# follow the (a, 1 - a) pattern of the two-component experiment, with ``a``
# drawn in tenths from a seeded generator.

INVERSION_SEED = 16
a = np.random.default_rng(INVERSION_SEED).integers(0, 11, 7) / 10
A_inv = np.round(np.column_stack([a, 1 - a]), 10)
print("inversion matrix rows:", A_inv.tolist())


# %%
# Write the fixture files.


def scenario(name, description, layout, mixing, **extra):
    comps = []
    for i, (base, peaks) in enumerate(layout):
        comps.append({
            "name": f"P{i + 1}",
            "baseline": base,
            "peaks": [{"center": float(c), "width": float(w), "height": float(h)} for c, w, h in peaks],
        })
    doc = {
        "name": name,
        "description": description,
        "grid": {"start": grid.start, "step": grid.step, "count": grid.count},
        "components": comps,
        "mixing": mixing,
        "noise": {"kind": "none"},
        "tau": 1,
        "n": "auto",
        "mode": "sym-evd",
        "bins": 10,
    }
    doc.update(extra)
    return doc


if "--write" in sys.argv:
    out = Path(__file__).resolve().parents[1] / "src" / "sosunmix" / "fixtures"
    docs = {
        "paper2": scenario(
            "paper2", "Two solutes, 7 pixels, noiseless.",
            two_component(p2), {"csv": "paper2_matrix.csv"},
        ),
        "paper3": scenario(
            "paper3", "Three solutes, 9 pixels, noiseless.",
            three_component(p3), {"csv": "paper3_matrix.csv"},
        ),
        "inversion": scenario(
            "inversion",
            "Two-component spectra on a seeded (a, 1-a) mixing matrix with 40 dB noise; "
            "raw AMUSE returns the second spectrum inverted.",
            two_component(p2), {"csv": "inversion_matrix.csv"},
            noise={"kind": "gaussian", "snr_db": 40.0, "seed": INVERSION_SEED}, n=2,
        ),
    }
    for name, doc in docs.items():
        (out / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")
    write_matrix_csv(out / "paper2_matrix.csv", paper_two_component_matrix())
    write_matrix_csv(out / "paper3_matrix.csv", paper_three_component_matrix())
    write_matrix_csv(out / "inversion_matrix.csv", A_inv)
    for name, S in (("paper2", S2), ("paper3", S3), ("inversion", S2)):
        write_spectra_csv(out / f"{name}_spectra.csv", S, grid=grid,
                          names=[f"P{i + 1}" for i in range(len(S))])
    print("fixtures written to", out)
