"""
Synthetic scenes and the two statistical baselines
==================================================

The data generator builds little Mondrian worlds: patches of random
reflectance lit by one illuminant drawn from a named pool, plus sensor
noise.  Labels are exact by construction, which makes the generator a
test fixture as much as a data source.  Grey-world and shades-of-grey
then give calibration points that need no training at all.
"""

import numpy as np

from mcde.baselines import grey_world, shades_of_grey
from mcde.color import recovery_error
from mcde.datagen import POOLS, GenConfig, gen_dataset

# Three pools are built in.  "full" covers the whole positive octant
# minus a guard margin; "band-a" is a blue-shifted cap and "band-b" a
# red-shifted one.  The two bands are disjoint, which demo 05 exploits.
for name, spec in POOLS.items():
    print(f"pool {name:>7}: azimuth {spec.phi_deg}, inclination {spec.varphi_deg}")

# Generation is deterministic per (config, index): scene 3 of seed 11
# is the same array today and tomorrow, so experiments can be rerun
# from nothing but their echoed configuration.
config = GenConfig(n_scenes=24, width=16, height=16, pool="full",
                   noise_std=0.01, base_seed=11)
dataset = gen_dataset(config)
scene = dataset.scenes[0]
print("\nscene shape:", scene.pixels.shape, "label:", np.round(scene.label, 4))

# Grey-world assumes the average reflectance of a scene is achromatic,
# so the mean pixel color IS the illuminant estimate.  Shades-of-grey
# generalizes the mean to a Minkowski p-norm; large p leans toward the
# brightest pixels (p=1 recovers grey-world exactly).
errors = {"grey-world": [], "sog p=6": []}
for scene in dataset.scenes:
    errors["grey-world"].append(
        recovery_error(scene.label, grey_world(scene.pixels)))
    errors["sog p=6"].append(
        recovery_error(scene.label, shades_of_grey(scene.pixels, p=6.0)))

for name, errs in errors.items():
    errs = np.asarray(errs)
    print(f"{name:>11}: mean {errs.mean():5.2f} deg, "
          f"worst {errs.max():5.2f} deg over {len(errs)} scenes")

# The same generator drives the command line:
#   mcde gen-data --scenes 24 --pool full --seed 11 --out data/full
# writes the identical dataset to disk (a manifest, a labels table,
# and one binary blob per scene, all byte-reproducible).
