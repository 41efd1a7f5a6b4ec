"""
Scoring predictions
===================

A stand-in estimator whose error grows with the distance to the nearest
training rotation, scored the same way as the result tables.
"""

import numpy as np

from rotkit import datagen, evaluation
from rotkit import representations as rp
from rotkit.so3 import geodesic_angle

ds = datagen.generate_dataset(datagen.DistributionSpec.big_hole(1))
dist = evaluation.nearest_train_distances(ds)

# perturb each test rotation by 1 deg plus half its distance to the training set
rng = np.random.default_rng(0)
axes = rng.standard_normal((len(dist), 3))
axes /= np.linalg.norm(axes, axis=1, keepdims=True)
turn = np.radians(1.0 + 0.5 * dist)[:, None]
pred = ds.split("test") @ rp.aa3_to_matrix(axes * turn)
errors = np.degrees(geodesic_angle(ds.split("test"), pred))

rep = evaluation.report(errors)
print(rep.to_json())

# the accuracy curve, every 5 degrees
for t, a in rep.curve.sample(np.arange(0, 41, 5)):
    print(f"{t:4.0f} deg  {'#' * int(40 * a):40s} {a:.2f}")

fit = evaluation.nearest_train_fit(ds, errors)
print(f"error ~ {fit.slope:.3f} * distance + {fit.intercept:.3f}")
