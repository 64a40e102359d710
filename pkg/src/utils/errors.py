"""
Error Module for the Lord's Paradox Laboratory

This module defines the exception hierarchy shared by every package. Model
problems (bad structural models, bad units, bad configuration) derive from
ModelValidationError; problems met while fitting or summarizing derive from
EstimatorError. The CLI maps the two branches to distinct exit codes.
"""

from typing import Optional, Sequence


class LordsLabError(Exception):
    """Base class for all laboratory errors."""


class ModelValidationError(LordsLabError, ValueError):
    """A structural model, dataset or configuration failed validation."""


class CycleError(ModelValidationError):
    """The dependency graph of a structural model contains a cycle."""

    def __init__(self, cycle: Sequence[str]):
        self.cycle = list(cycle)
        super().__init__(f"Cycle detected in structural model: {' -> '.join(self.cycle)}")


class UnknownNodeError(ModelValidationError):
    """A parent, rescale key or forced value names a node that does not exist."""

    def __init__(self, name: str, context: str = "node"):
        self.name = name
        super().__init__(f"Unknown {context}: {name!r}")


class DuplicateNodeError(ModelValidationError):
    """Two nodes share a name."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Duplicate node name: {name!r}")


class NodeArityError(ModelValidationError):
    """A node's parents, coefficients or noise do not fit its kind."""


class InfeasibleStandardizationError(ModelValidationError):
    """Path coefficients already explain more than unit variance."""

    def __init__(self, node: str, noise_variance: float):
        self.node = node
        self.noise_variance = noise_variance
        super().__init__(
            f"Cannot standardize {node!r}: implied noise variance {noise_variance:.6f} is negative"
        )


class UnitsError(ModelValidationError):
    """A dataset is in the wrong unit system for the requested operation."""


class EstimatorError(LordsLabError):
    """An estimator could not produce a result."""


class MissingColumnError(EstimatorError):
    """A dataset lacks a column an estimator needs."""

    def __init__(self, missing: Sequence[str]):
        self.missing = list(missing)
        super().__init__(f"Dataset is missing required column(s): {', '.join(self.missing)}")


class SingularDesignError(EstimatorError):
    """The design matrix is rank deficient."""


class PositivityViolationError(SingularDesignError):
    """Regressors are fully determined by the exposure, so their effects cannot be separated."""

    def __init__(self, columns: Sequence[str]):
        self.columns = list(columns)
        super().__init__(
            "Positivity violation: columns "
            f"{', '.join(self.columns)} are collinear with the exposure and cannot be separated"
        )


class EmptyGroupError(EstimatorError):
    """An exposure arm or plotting group has too few rows."""


class DegenerateDataError(EstimatorError):
    """A variable has no variance where variance is required."""


class ReplicationError(EstimatorError):
    """An estimator failed inside a Monte Carlo replication."""

    def __init__(self, replication: int, cause: Optional[BaseException] = None):
        self.replication = replication
        self.cause = cause
        super().__init__(f"Replication {replication} failed: {cause}")

    def __reduce__(self):
        # worker processes send this back to the parent; the cause may not pickle
        cause = EstimatorError(f"{type(self.cause).__name__}: {self.cause}") if self.cause else None
        return (self.__class__, (self.replication, cause))
