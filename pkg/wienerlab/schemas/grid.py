import math
from enum import Enum
from typing import Callable, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class Side(str, Enum):
    SPACE = "space"
    FREQUENCY = "frequency"


class GridSpec(BaseModel):
    """Uniform grid on [-L, L)^n with M samples per axis and its reciprocal frequency grid."""

    model_config = ConfigDict(frozen=True)

    dimension: int = Field(..., ge=1, description="Spatial dimension n")
    half_extent: float = Field(..., gt=0, description="Half width L of the domain [-L, L)^n")
    samples_per_dim: int = Field(..., ge=2, description="Even number of samples M per axis")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_extent / self.samples_per_dim

    @property
    def dxi(self) -> float:
        return math.pi / self.half_extent

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.samples_per_dim,) * self.dimension

    @property
    def frequency_limit(self) -> float:
        return math.pi / self.dx

    def space_axis(self) -> np.ndarray:
        return -self.half_extent + self.dx * np.arange(self.samples_per_dim)

    def frequency_indices(self) -> np.ndarray:
        m = self.samples_per_dim
        return np.arange(-m // 2 + 1, m // 2 + 1)

    def frequency_axis(self) -> np.ndarray:
        return self.dxi * self.frequency_indices()

    def axis(self, side: "Side") -> np.ndarray:
        return self.space_axis() if side == Side.SPACE else self.frequency_axis()

    def step(self, side: "Side") -> float:
        return self.dx if side == Side.SPACE else self.dxi

    def mesh(self, side: "Side") -> Tuple[np.ndarray, ...]:
        axis = self.axis(side)
        return tuple(np.meshgrid(*([axis] * self.dimension), indexing="ij"))

    def squared_radius(self, side: "Side") -> np.ndarray:
        return sum(c**2 for c in self.mesh(side))

    def index_of(self, coordinate: float, side: "Side", tol: float = 1e-9) -> Optional[int]:
        """Array index of ``coordinate`` along one axis, or None when it is not a sample."""
        if side == Side.SPACE:
            raw = (coordinate + self.half_extent) / self.dx
            offset = 0
        else:
            raw = coordinate / self.dxi
            offset = self.samples_per_dim // 2 - 1
        nearest = round(raw)
        if abs(raw - nearest) > tol * max(1.0, abs(raw)):
            return None
        index = nearest + offset
        if not 0 <= index < self.samples_per_dim:
            return None
        return int(index)


class SampledField(BaseModel):
    """Complex samples of a function on one side of a grid, in centered order."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: GridSpec
    side: Side
    values: np.ndarray

    @model_validator(mode="after")
    def _check_shape(self) -> "SampledField":
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} does not match grid shape {self.grid.shape}")
        values = np.array(self.values, dtype=np.complex128)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        return self

    @property
    def step(self) -> float:
        return self.grid.step(self.side)

    def replace_values(self, values: np.ndarray, side: Optional[Side] = None) -> "SampledField":
        return SampledField(grid=self.grid, side=side or self.side, values=np.asarray(values, dtype=np.complex128))

    def scaled(self, factor: complex) -> "SampledField":
        return self.replace_values(self.values * factor)


class GaussianProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: str = "gaussian"
    center: Union[float, Tuple[float, ...]] = 0.0
    width: float = Field(1.0, gt=0)
    modulation: Union[float, Tuple[float, ...]] = 0.0


class PointMassProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: str = "point_mass_approx"


class CustomProfile(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: str = "custom"
    evaluator: Callable[..., np.ndarray] = Field(..., description="Called with one coordinate array per axis")


Profile = Union[GaussianProfile, PointMassProfile, CustomProfile]


class SymbolKind(str, Enum):
    UNIMODULAR = "unimodular"
    BESSEL = "bessel"
    IDENTITY = "identity"
    CUSTOM = "custom"


class SymbolSpec(BaseModel):
    """Fourier multiplier symbol evaluated on the centered frequency grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: SymbolKind
    alpha: float = Field(2.0, ge=0, description="Phase exponent of exp(sign*i*|xi|^alpha)")
    sign: int = Field(-1, description="Phase sign; -1 with alpha=2 is exp(i Laplacian)")
    order: float = Field(0.0, description="Order t of the Bessel symbol <xi>^t")
    table: Optional[np.ndarray] = None

    @model_validator(mode="after")
    def _check_sign(self) -> "SymbolSpec":
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")
        if self.kind == SymbolKind.CUSTOM and self.table is None:
            raise ValueError("custom symbol requires a table")
        return self

    @classmethod
    def unimodular(cls, alpha: float, sign: int) -> "SymbolSpec":
        return cls(kind=SymbolKind.UNIMODULAR, alpha=alpha, sign=sign)

    @classmethod
    def schroedinger(cls, sign: int = -1) -> "SymbolSpec":
        return cls.unimodular(2.0, sign)

    @classmethod
    def bessel(cls, order: float) -> "SymbolSpec":
        return cls(kind=SymbolKind.BESSEL, order=order)

    @classmethod
    def identity(cls) -> "SymbolSpec":
        return cls(kind=SymbolKind.IDENTITY)

    @classmethod
    def custom(cls, table: np.ndarray) -> "SymbolSpec":
        return cls(kind=SymbolKind.CUSTOM, table=np.asarray(table, dtype=np.complex128))
