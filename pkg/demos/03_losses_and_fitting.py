"""
Losses, gradients and fitting one rotation
==========================================

The catalog pairs each representation with the losses it was trained
with. Without a network, the simplest experiment is to fit a single
rotation by gradient descent and see which pairs get there.
"""

import numpy as np

from rotkit import continuity, losses
from rotkit.so3 import haar_random

for i, spec in losses.CATALOG.items():
    print(f"{i:2d}  {spec.label:24s} {spec.dim:4d} parameters")

# analytic gradients agree with central differences away from singular points
rng = np.random.default_rng(0)
gt = haar_random(1, 1)[0]
for i in (1, 5, 9, 15, 19):
    spec = losses.loss_catalog(i)
    x = losses.regular_points(spec, gt, 1, rng)[0]
    print(f"id {i:2d} gradcheck relative error {losses.gradcheck(spec, x, gt).max_rel_error:.1e}")

# twenty random fits per id at the calibrated step size
for i in (1, 5, 7, 18, 19, 20):
    rate, traces = continuity.fit_success_rate(i, runs=20, seed=3)
    med = np.median([t.iterations for t in traces])
    print(f"id {i:2d} {losses.loss_catalog(i).label:22s} success {rate:4.0%}  median iterations {med:.0f}")
