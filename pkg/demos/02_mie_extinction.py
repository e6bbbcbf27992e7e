# # Extinction by single spheres
#
# Q_ext as a function of size parameter for a weakly absorbing sphere, from the
# Rayleigh regime through the resonance ripple to the large-particle limit of 2.

# %%

import numpy as np

from disturbed_fso import mie_efficiencies, size_parameter

m = 1.55 + 0.005j
for x in np.geomspace(0.01, 2000, 15):
    e = mie_efficiencies(m, x)
    print(f"x = {x:9.3f}  Q_ext = {e.q_ext:.5f}  Q_sca = {e.q_sca:.5f}  Q_abs = {e.q_abs:.5f}")

# %% [markdown]
# Size parameters that matter here: a 12 um cloud droplet and a 130 um soil
# grain at two laser wavelengths. Both are far outside the Rayleigh regime, which
# is why the extinction barely depends on wavelength.

# %%

for d in (12e-6, 130e-6):
    for lam in (800e-9, 1550e-9):
        x = size_parameter(d, lam)
        q = mie_efficiencies(m, x).q_ext
        print(f"d = {d * 1e6:5.0f} um, lambda = {lam * 1e9:4.0f} nm: x = {x:7.1f}, Q_ext = {q:.4f}")
