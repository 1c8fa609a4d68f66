"""
Fixing upside-down spectra
==========================

A separated source can come out with its sign flipped: ``-s`` explains the
data just as well as ``s`` once the matching mixing column is negated too.
For spectra the flip is easy to spot by eye, since the peaks point down.
The correction does the same by machine:

* the most populated histogram bin gives the baseline;
* the extrema of the spectrum are compared with that baseline;
* whichever side holds the larger excursion is taken as "up".

The ``inversion`` fixture is a seeded case where raw AMUSE returns one
source inverted.
"""

from pathlib import Path

import numpy as np

from sosunmix import amuse, correct_signs, find_extrema, histogram, match_sources, sign_accuracy
from sosunmix.scenario import load_scenario
from sosunmix.sign_correction import baseline

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

sc = load_scenario("inversion")
truth = sc.true_sources()
raw = amuse(sc.simulate(), n=sc.n)

# %%
print("raw correlations with the truth:", match_sources(truth, raw.sources).correlations.round(5))
print("raw sign accuracy:", sign_accuracy(truth, raw.sources))

# %%
# The pieces of the judgment, for each raw source.

for i, s in enumerate(raw.sources):
    h = histogram(s)
    b = baseline(h)
    ext = find_extrema(s)
    print(f"source {i}: counts {h.counts.tolist()}")
    print(f"  baseline {b:+.4f}, p_max - b = {ext.p_max - b:+.4f}, p_min - b = {ext.p_min - b:+.4f}")

# %%
# ``correct_signs`` applies the verdicts. Flipping a source also negates its
# mixing column, so the reconstruction is unchanged.

fixed = correct_signs(raw)
for i, v in enumerate(fixed.sign_verdicts):
    print(f"source {i}: {v.decision} ({v.rule_fired})")
print("corrected sign accuracy:", sign_accuracy(truth, fixed.sources))
print("reconstruction unchanged:",
      np.allclose(fixed.mixing_estimate @ fixed.sources, raw.mixing_estimate @ raw.sources))

# %%
# Running it again changes nothing.

again = correct_signs(fixed)
print("idempotent:", np.array_equal(again.sources, fixed.sources))

# %%

if plt is not None:
    out = Path("demo-figures")
    out.mkdir(exist_ok=True)
    wl = sc.grid.wavelengths
    fig, axes = plt.subplots(1, 2, figsize=(10, 3.5), sharey=True)
    for ax, model, title in ((axes[0], raw, "raw AMUSE"), (axes[1], fixed, "after sign correction")):
        for i, s in enumerate(model.sources):
            ax.plot(wl, s, label=f"source {i}")
        ax.set(title=title, xlabel="wavelength (nm)")
    axes[0].legend()
    fig.tight_layout()
    fig.savefig(out / "03_sign_correction.png", dpi=100)
    print("figure written to", out / "03_sign_correction.png")
