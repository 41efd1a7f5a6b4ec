"""3D rotation representations, rotation losses, synthetic rotation datasets
and pose-error metrics, built on numpy."""

from .errors import RotkitError
from .so3 import compose, geodesic_angle, haar_random, inverse, validate
from .representations import from_matrix, to_matrix
from .losses import loss_catalog
from .datagen import DistributionSpec, SplitCounts, generate_dataset, zeta
from .evaluation import accuracy_curve, maa, report

__version__ = "0.1.0"
