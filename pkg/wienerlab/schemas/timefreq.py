from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from wienerlab.schemas.grid import SampledField


class WindowKind(str, Enum):
    GAUSSIAN = "gaussian"
    BUMP = "bump"
    PLATEAU = "plateau"
    CHIRPED = "chirped"


class WindowCertificate(BaseModel):
    """Facts about a window that were verified on its samples at construction."""

    model_config = ConfigDict(frozen=True)

    support_half_width: Optional[float] = Field(None, description="Samples vanish outside [-h, h]^n")
    plateau_half_width: Optional[float] = Field(None, description="Samples equal 1 on [-h, h]^n")
    transform_peak: Optional[float] = Field(None, description="|window^(0)| by direct quadrature")
    transform_lower_bound: Optional[float] = Field(None, description="min |window^| over the certified box")
    transform_box_half_width: Optional[float] = Field(None, description="Half width of the box where the lower bound holds")
    sup_norm: float = Field(..., description="Largest sample modulus")


class Window(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: WindowKind
    base_kind: Optional[WindowKind] = None
    sign: int = Field(-1, description="Chirp sign: samples are multiplied by exp(sign*i*|t|^2)")
    width: float = Field(1.0, gt=0, description="Gaussian width")
    scale: float = Field(1.0, description="Constant factor applied to the profile")
    samples: SampledField
    certificate: WindowCertificate

    @property
    def grid(self):
        return self.samples.grid

    @property
    def label(self) -> str:
        if self.kind == WindowKind.CHIRPED:
            return f"chirped({self.base_kind.value},{self.sign:+d})"
        if self.kind == WindowKind.GAUSSIAN:
            return f"gaussian({self.width:g})"
        return self.kind.value


class LatticeSpec(BaseModel):
    """Product lattice of space points and frequency points, identical on every axis."""

    model_config = ConfigDict(frozen=True)

    x_step: float = Field(..., gt=0)
    xi_step: float = Field(..., gt=0)
    x_count: int = Field(..., ge=1)
    xi_count: int = Field(..., ge=1)
    x_offset: float = Field(0.0, description="First space point on every axis")
    xi_offset: float = Field(0.0, description="First frequency point on every axis")

    def x_points(self) -> np.ndarray:
        return self.x_offset + self.x_step * np.arange(self.x_count)

    def xi_points(self) -> np.ndarray:
        return self.xi_offset + self.xi_step * np.arange(self.xi_count)

    @staticmethod
    def _is_multiple(value: float, step: float, tol: float = 1e-9) -> bool:
        ratio = value / step
        return abs(ratio - round(ratio)) <= tol * max(1.0, abs(ratio))

    @property
    def shear_compatible(self) -> bool:
        return self._is_multiple(2.0 * self.x_step, self.xi_step) and self._is_multiple(2.0 * self.x_offset, self.xi_step)


class TimeFrequencyMatrix(BaseModel):
    """|V_g f| on a lattice: axes are the n space axes followed by the n frequency axes."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lattice: LatticeSpec
    dimension: int = Field(..., ge=1)
    magnitudes: np.ndarray
    phases: Optional[np.ndarray] = None

    @model_validator(mode="after")
    def _check(self) -> "TimeFrequencyMatrix":
        expected = self.expected_shape
        if self.magnitudes.shape != expected:
            raise ValueError(f"magnitudes shape {self.magnitudes.shape} does not match lattice shape {expected}")
        if np.any(self.magnitudes < 0):
            raise ValueError("magnitudes must be nonnegative")
        self.magnitudes.flags.writeable = False
        return self

    @property
    def expected_shape(self) -> Tuple[int, ...]:
        n = self.dimension
        return (self.lattice.x_count,) * n + (self.lattice.xi_count,) * n

    def as_matrix(self) -> np.ndarray:
        """Flatten to a (space points) x (frequency points) array."""
        n = self.dimension
        return self.magnitudes.reshape(self.lattice.x_count**n, self.lattice.xi_count**n)
