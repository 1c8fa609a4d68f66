"""
Simulating a hyperspectral cube
===============================

Every pixel of a cube is a weighted sum of a few pure spectra plus noise,
``X = A S + N``. This script builds the two pure spectra shipped with the
``paper2`` fixture, mixes them with the 7 x 2 concentration matrix and shows
what the mixtures look like at a few noise levels.

Figures are written to ``demo-figures/`` when matplotlib is installed.
"""

from pathlib import Path

import numpy as np

from sosunmix import NoiseSpec, mix, noise_for_snr
from sosunmix.scenario import load_scenario

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:  # plotting is optional
    plt = None

FIGURES = Path("demo-figures")

# %%
# The fixture file describes each pure spectrum as Gaussian bands on a flat
# baseline. ``sources()`` evaluates them on the 400-1000 nm grid.

sc = load_scenario("paper2")
sources = sc.sources()
for comp, s in zip(sc.components, sources):
    print(f"{comp.name}: baseline {comp.baseline}, peaks at "
          f"{[round(p.center, 1) for p in comp.peaks]} nm, max {s.values.max():.3f}")

# %%
# Column j of the mixing matrix is the concentration of component j in each
# of the seven pixels.

A = sc.mixing
print("mixing matrix (pixels x components):")
print(A.entries)

# %%
# Noiseless mixing is a plain matrix product.

cube = mix(A, sources)
S = np.stack([s.values for s in sources])
assert np.allclose(cube.data, A.entries @ S)
print("cube shape:", cube.data.shape)

# %%
# Noise is specified either by sigma or by a target SNR. The SNR is measured
# against the power of the mean-removed clean cube.

for snr in (40, 30, 20):
    spec = noise_for_snr(cube, snr, seed=0)
    noisy = mix(A, sources, spec)
    print(f"{snr} dB -> sigma = {spec.sigma:.4g}, "
          f"max deviation {np.abs(noisy.data - cube.data).max():.3g}")

same = mix(A, sources, NoiseSpec.gaussian(0.01, seed=3))
again = mix(A, sources, NoiseSpec.gaussian(0.01, seed=3))
print("seeded noise is reproducible:", np.array_equal(same.data, again.data))

# %%

if plt is not None:
    FIGURES.mkdir(exist_ok=True)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 3.5))
    wl = cube.grid.wavelengths
    for comp, s in zip(sc.components, sources):
        ax1.plot(wl, s.values, label=comp.name)
    ax1.set(title="pure spectra", xlabel="wavelength (nm)")
    ax1.legend()
    for i, row in enumerate(cube.data):
        ax2.plot(wl, row, lw=0.8, label=f"pixel {i}")
    ax2.set(title="mixtures", xlabel="wavelength (nm)")
    fig.tight_layout()
    fig.savefig(FIGURES / "01_forward_model.png", dpi=100)
    print("figure written to", FIGURES / "01_forward_model.png")
