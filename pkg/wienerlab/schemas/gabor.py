import itertools
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class CoeffProfile(str, Enum):
    CONSTANT = "constant"
    POWER = "power"
    KRONECKER = "kronecker"
    CUSTOM = "custom"
    RANDOM = "random"


class CoeffSequence(BaseModel):
    """Finitely supported sequence on Z^n, stored densely on the box |k|_inf <= N (k = 0 at index N)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dimension: int = Field(..., ge=1)
    support_radius: int = Field(..., ge=0)
    values: np.ndarray
    profile: CoeffProfile = CoeffProfile.CUSTOM
    beta: Optional[float] = None

    @model_validator(mode="after")
    def _check(self) -> "CoeffSequence":
        side = 2 * self.support_radius + 1
        if self.values.shape != (side,) * self.dimension:
            raise ValueError(f"values shape {self.values.shape} does not match box side {side}")
        values = np.array(self.values, dtype=np.complex128)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        return self

    def points(self) -> List[Tuple[int, ...]]:
        r = range(-self.support_radius, self.support_radius + 1)
        return list(itertools.product(r, repeat=self.dimension))

    def entries(self) -> Dict[Tuple[int, ...], complex]:
        """Nonzero entries keyed by lattice point."""
        flat = self.values.reshape(-1)
        return {k: complex(v) for k, v in zip(self.points(), flat) if v != 0}

    def brackets(self) -> np.ndarray:
        """<k> = (1 + |k|^2)^{1/2} on the box, same shape as ``values``."""
        axis = np.arange(-self.support_radius, self.support_radius + 1, dtype=float)
        mesh = np.meshgrid(*([axis] * self.dimension), indexing="ij")
        return np.sqrt(1.0 + sum(c**2 for c in mesh))

    def scaled(self, factor: complex) -> "CoeffSequence":
        return self.model_copy(update={"values": self.values * factor, "profile": CoeffProfile.CUSTOM})


class Verdict(str, Enum):
    BOUNDED = "bounded"
    GROWING = "growing"
    INCONCLUSIVE = "inconclusive"


class ScanReport(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    label: str = Field(..., description="What was scanned, e.g. lemma_ratio p=1 q=inf s=1")
    parameters: Dict[str, float] = Field(default_factory=dict)
    axis_name: str = "N"
    axis: List[float]
    ratios: List[float]
    increments: List[float] = Field(..., description="Relative increment from the previous axis value")
    slope: float = Field(..., description="Least-squares slope of the declared coordinates")
    slope_coordinates: str = "log ratio vs log N"
    decay_ratio: Optional[float] = Field(None, description="Last increment over the one before")
    classification: Verdict
