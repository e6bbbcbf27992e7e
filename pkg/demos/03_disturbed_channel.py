# # Debris clouds, dispersal and haze
#
# Attenuation through a stabilized cloud of water droplets and lofted soil,
# how it falls as the cloud spreads, and the comparatively small effect of
# smoke haze.

# %%

import math

from disturbed_fso import (
    HazeScenario,
    LossLedger,
    cloud_for_yield,
    column_attenuation,
    combine_losses_logsum,
    gaussian_puff_column,
    haze_attenuation,
    stabilized_cloud_attenuation,
)

for y in (10, 100, 1000):
    total = stabilized_cloud_attenuation(cloud_for_yield(y), 1550e-9)
    soil = stabilized_cloud_attenuation(cloud_for_yield(y, water_content=0.0), 1550e-9)
    print(f"{y:5d} kt: {total:8.0f} dB through the center ({soil:.0f} dB from soil alone)")

# %% [markdown]
# A link that looks through a freshly stabilized cloud is simply closed. As the
# cloud disperses the path gets longer but the particles thin out faster.

# %%

cloud = cloud_for_yield(1000)
for hours in (0, 0.5, 1, 2, 6, 24):
    col = gaussian_puff_column(cloud, hours * 3600)
    print(f"{hours:4} h: {column_attenuation(col, 1550e-9):10.1f} dB")

# %%

for pm in (25, 100, 300):
    for elev in (90, 30):
        a = haze_attenuation(HazeScenario(pm25=pm, elevation_angle=math.radians(elev)))
        total = combine_losses_logsum(LossLedger(a_atm=16.0, a_smoke=a))
        print(f"PM2.5 {pm:3d} ug/m3, elevation {elev:2d} deg: haze {a:5.2f} dB, link {total:5.2f} dB")
