# # Clear-air link budget
#
# A 400 km link between a ground station and a satellite in low orbit. The
# space terminal has a 0.1 m aperture and the ground terminal a 1 m aperture.
# Which of the two transmits makes a large difference.

# %%

import numpy as np

from disturbed_fso import (
    LinkGeometry,
    LossLedger,
    beam_divergence,
    combine_losses_logsum,
    fried_parameter,
    link_attenuation,
    reference_geometry,
)

down = reference_geometry("downlink")
up = reference_geometry("uplink")
print(f"divergence, downlink: {beam_divergence(down):.3e} rad")
print(f"divergence, uplink:   {beam_divergence(up):.3e} rad")

# %% [markdown]
# The uplink beam starts out ten times narrower, but it passes through the
# turbulent layer near the ground first. The coherence length r0 sets how much
# extra spread that adds.

# %%

for nm in (500, 800, 1550):
    r0 = fried_parameter(reference_geometry("uplink", wavelength=nm * 1e-9))
    print(f"r0 at {nm:4d} nm: {r0 * 100:.2f} cm")

print(f"\ndownlink loss: {link_attenuation(down):.2f} dB")
print(f"uplink loss:   {link_attenuation(up):.2f} dB")

# %% [markdown]
# Extra losses (debris, smoke, pointing) go into a ledger. Two combination rules
# are available: the log-sum, dominated by the largest term, and a plain dB sum
# for attenuators in series.

# %%

for extra in (2.67, 9.12, 18.0, 55.6):
    ledger = LossLedger(a_atm=16.0, a_nuc=extra)
    print(f"debris {extra:5.2f} dB -> log-sum {combine_losses_logsum(ledger):6.2f} dB")

# %%

distances = np.linspace(200e3, 2000e3, 10)
for L in distances:
    g = LinkGeometry(1550e-9, L, transmitter_aperture=0.1, receiver_aperture=1.0)
    print(f"{L / 1e3:6.0f} km: {link_attenuation(g):5.2f} dB")
