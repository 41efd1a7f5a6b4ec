"""
Which representations jump?
===========================

Two rotations a hair apart should get nearby parameter vectors. The planar
case shows how an angle in [0, 2 pi) fails this; the probes repeat the
experiment in 3D for each representation.
"""

import math

from rotkit import continuity

# planar rotations by +eps and -eps
for eps in (0.1, 0.01, 0.001):
    true, rep = continuity.probe_2d(eps)
    print(f"eps={eps:<6} true distance {true:.4f}  encoded distance {rep:.4f}  ratio {rep / true:.0f}")

# Random pairs one milliradian apart: continuous representations keep the
# jump proportional to delta; the others occasionally flip
delta = 1e-3
for rep in continuity.PROBE_REPRESENTATIONS:
    pr = continuity.probe_discontinuity(rep, delta, 100_000, seed=0)
    print(f"{rep:8s} max jump {pr.max_rep_distance:8.4f}  ({pr.max_rep_distance / delta:8.1f} x delta)")

# The flips can be produced on purpose
for rep in ("euler", "quat", "aa3"):
    w = continuity.witness_pair(rep)
    print(f"{rep:6s} rotations {math.degrees(w.e_re):.3f} deg apart, vectors {w.rep_distance:.3f} apart")

# GS6 stays bounded as delta shrinks
for delta in (1e-2, 1e-3, 1e-4):
    pr = continuity.probe_discontinuity("gs6", delta, 10_000, seed=1)
    print(f"gs6 delta={delta:g}: max jump / delta = {pr.max_rep_distance / delta:.4f}")
