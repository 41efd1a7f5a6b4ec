"""Exception hierarchy shared by every rotkit module.

Everything raised on bad *data* (as opposed to programming errors) derives
from :class:`RotkitError`, which is what the command line maps to exit code 1.
"""


class RotkitError(Exception):
    """Base class for domain errors."""


class NotARotation(RotkitError):
    def __init__(self, orthogonality_defect, det):
        self.orthogonality_defect = float(orthogonality_defect)
        self.det = float(det)
        super().__init__(
            f"not a rotation: ||M^T M - I||_F = {self.orthogonality_defect:.3g}, "
            f"det = {self.det:.12g}"
        )


class NotUnit(RotkitError):
    pass


class ZeroAxis(RotkitError):
    pass


class DegenerateInput(RotkitError):
    pass


class PoleSingularity(RotkitError):
    pass


class InvalidDistribution(RotkitError):
    pass


class ZeroVector(RotkitError):
    pass


class LengthMismatch(RotkitError):
    pass


class UnknownId(RotkitError):
    pass


class RepMismatch(RotkitError):
    pass


class QuotaUnreachable(RotkitError):
    pass


class EmptySplit(RotkitError):
    pass


class EmptyInput(RotkitError):
    pass


class DatasetFormatError(RotkitError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class DivergedToSingular(RotkitError):
    def __init__(self, iteration, cause):
        self.iteration = iteration
        self.cause = cause
        super().__init__(f"descent hit a singular parameter at iteration {iteration}: {cause}")
