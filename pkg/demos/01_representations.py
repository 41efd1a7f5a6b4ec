"""
Rotation representations and the round trip through the matrix
===============================================================

"""

import math

import numpy as np

from rotkit import representations as rp
from rotkit.so3 import geodesic_angle, haar_random, rot_z

np.set_printoptions(precision=4, suppress=True)

# A quarter turn about z, written seven ways
r = rot_z(math.pi / 2)
for tag in ("euler", "aa3", "aa4", "quat", "gs6", "stereo5"):
    print(f"{tag:8s}", rp.from_matrix(tag, r))

# Every representation maps back to the same matrix
rs = haar_random(0, 10_000)
for tag in ("euler", "aa3", "aa4", "quat", "gs6", "stereo5"):
    back = rp.to_matrix(tag, rp.from_matrix(tag, rs))
    print(f"{tag:8s} worst round-trip error {np.abs(back - rs).max():.2e}")

# Gram-Schmidt accepts any two independent columns, not just orthonormal ones
free = np.array([2.0, 0.0, 0.0, 1.0, 1.0, 0.0])
print("f_GS(2e1, e1+e2) =\n", rp.gs6_to_matrix(free))

# Binned angles: 360 bins per Euler angle, decoded by a circular mean,
# so mass split between bins 0 and 359 decodes near 0 instead of 180
p = np.zeros(360)
p[[0, 359]] = 0.5
print("decode(bins 0 and 359) =", math.degrees(rp.bin_decode(p)) % 360, "deg")

# The binned encodings quantise: each angle is off by at most half a bin
back = rp.to_matrix("euler_bin", rp.from_matrix("euler_bin", rs[:1000]))
print("euler_bin worst error", np.degrees(geodesic_angle(rs[:1000], back)).max(), "deg")
