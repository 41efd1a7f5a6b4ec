"""
Synthetic datasets with held-out neighborhoods
==============================================

"""

import numpy as np

from rotkit import datagen
from rotkit.so3 import geodesic_angle

# The three distributions at the default 8000/2000/1000 split
for kind in datagen.KINDS:
    ds = datagen.generate_dataset(datagen.DistributionSpec.named(kind, seed=0))
    sizes = {s: int(np.sum(ds.splits == s)) for s in datagen.SPLITS}
    print(f"{kind:10s} {sizes}  zeta = {datagen.zeta(ds):.2f} deg")

# Test rotations sit inside the hole, train and val outside
ds = datagen.generate_dataset(datagen.DistributionSpec.big_hole(0))
d = np.degrees(geodesic_angle(ds.spec.centers[0], ds.rotations))
print("test max distance to centre", d[ds.splits == "test"].max())
print("train min distance to centre", d[ds.splits == "train"].min())

# The twenty ManyHoles centres carry (1, 0, 0) onto a Fibonacci spiral
pts = datagen.fibonacci_sphere(20)
spec = datagen.DistributionSpec.many_holes()
print("centre error", np.abs(spec.centers @ [1.0, 0.0, 0.0] - pts).max())

# Files are JSON Lines with 17 significant digits, so reloading is exact
text = datagen.dumps_dataset(ds)
print(text.splitlines()[1][:90], "...")
print("bit-exact reload:", datagen.loads_dataset(text).rotations.tobytes() == ds.rotations.tobytes())
