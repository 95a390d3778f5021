"""Exception hierarchy shared by all eqalign modules.

The CLI maps these onto process exit codes, so new exception types should
subclass one of the categories below rather than ``Exception`` directly.
"""


class EqalignError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(EqalignError):
    """Invalid run configuration (schema violation, bad preset, bad weights)."""

    def __init__(self, message, path=""):
        super().__init__(message)
        self.path = path  # JSON pointer into the offending config document


class DataError(EqalignError):
    """Bad or insufficient input data (too few samples, corrupt files,
    pipeline collapse)."""


class ShapeError(EqalignError):
    """Tensor/matrix dimension mismatch."""


class NumericalError(EqalignError):
    """Numerical contract violation (non-symmetric input, failed
    factorization, matrix not PSD)."""


class UsageError(EqalignError):
    """API misuse, e.g. backward without a forward tape."""


class ArtifactMissingError(EqalignError):
    """A required on-disk artifact (checkpoint, dataset, report) is absent."""

    def __init__(self, message, path=""):
        super().__init__(message)
        self.path = path


class TrainingDivergedError(EqalignError):
    """Non-finite loss or gradient encountered during training.

    Carries whatever loss history was recorded up to the failure.
    """

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history
