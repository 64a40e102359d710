"""
Structural Model Schema Module for the Lord's Paradox Laboratory

This module defines the data types shared by the simulation code: node and
model specifications (pydantic models that serialize to the JSON model file)
and the Dataset container that every estimator consumes.
"""

from enum import Enum
from typing import Dict, List, Literal, Mapping, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from src.utils.errors import ModelValidationError, UnknownNodeError, UnitsError

Units = Literal["standardized", "natural"]


class NodeKind(str, Enum):
    """How a node's column is produced from its parents."""
    SYMMETRIC_BINARY = "symmetric_binary"
    LINEAR_GAUSSIAN = "linear_gaussian"
    COPY_OF_PARENT = "copy_of_parent"
    DIFFERENCE = "difference"


class NodeSpec(BaseModel):
    """
    One variable of a linear structural causal model.

    Coefficients and noise_sd are on the standardized scale. Kind-specific
    arity rules are checked by validate_scm, not here, so that violations
    surface as NodeArityError rather than a pydantic ValidationError.
    """
    model_config = ConfigDict(frozen=True, use_enum_values=False)

    name: str = Field(..., min_length=1)
    kind: NodeKind
    parents: Tuple[str, ...] = ()
    coefficients: Tuple[float, ...] = ()
    noise_sd: float = Field(0.0, ge=0.0)

    @property
    def weights(self) -> Dict[str, float]:
        return dict(zip(self.parents, self.coefficients))


class ScmSpec(BaseModel):
    """A directed acyclic structural model plus natural-unit rescaling targets."""
    model_config = ConfigDict(frozen=True)

    nodes: Tuple[NodeSpec, ...]
    rescale: Dict[str, Tuple[float, float]] = Field(default_factory=dict)

    @property
    def names(self) -> List[str]:
        return [node.name for node in self.nodes]

    def node(self, name: str) -> NodeSpec:
        for node in self.nodes:
            if node.name == name:
                return node
        raise UnknownNodeError(name)

    def natural_sd(self, name: str) -> float:
        """Natural-unit sd of a node (1.0 when the node is not rescaled)."""
        return float(self.rescale[name][1]) if name in self.rescale else 1.0


class Dataset:
    """
    A rectangular table of n observations tagged with its unit system.

    The underlying frame is copied on the way in and on the way out, so a
    Dataset can be shared between threads and replications without anyone
    mutating it.
    """

    __slots__ = ("_frame", "_units")

    def __init__(self, frame: pd.DataFrame, units: Units = "standardized"):
        if units not in ("standardized", "natural"):
            raise UnitsError(f"Unknown unit system: {units!r}")
        if len(frame) < 1:
            raise ModelValidationError("Dataset must contain at least one observation")
        values = frame.to_numpy(dtype=float)
        if not np.all(np.isfinite(values)):
            bad = [c for c in frame.columns if not np.all(np.isfinite(frame[c].to_numpy(dtype=float)))]
            raise ModelValidationError(f"Dataset contains non-finite values in column(s): {', '.join(bad)}")
        self._frame = frame.astype(float).reset_index(drop=True)
        self._units = units

    @classmethod
    def from_columns(cls, columns: Mapping[str, np.ndarray], units: Units = "standardized") -> "Dataset":
        lengths = {name: len(values) for name, values in columns.items()}
        if len(set(lengths.values())) > 1:
            raise ModelValidationError(f"Columns have unequal lengths: {lengths}")
        return cls(pd.DataFrame({name: np.asarray(v, dtype=float) for name, v in columns.items()}), units)

    @property
    def n(self) -> int:
        return len(self._frame)

    @property
    def units(self) -> Units:
        return self._units

    @property
    def names(self) -> List[str]:
        return list(self._frame.columns)

    @property
    def frame(self) -> pd.DataFrame:
        return self._frame.copy()

    def column(self, name: str) -> np.ndarray:
        if name not in self._frame.columns:
            raise UnknownNodeError(name, context="column")
        return self._frame[name].to_numpy(dtype=float, copy=True)

    def with_columns(self, units: Optional[Units] = None, **columns: np.ndarray) -> "Dataset":
        """Return a new Dataset with some columns replaced or added."""
        frame = self._frame.copy()
        for name, values in columns.items():
            frame[name] = np.asarray(values, dtype=float)
        return Dataset(frame, units or self._units)

    def equals(self, other: "Dataset") -> bool:
        return self._units == other._units and self._frame.equals(other._frame)

    def __repr__(self) -> str:
        return f"Dataset(n={self.n}, units={self._units}, columns={self.names})"
