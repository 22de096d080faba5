import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator

from wienerlab.errors import ExponentError


class Flavor(str, Enum):
    MODULATION = "modulation"
    AMALGAM = "amalgam"


class ExponentPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: float = Field(..., description="Exponent in the space variable; math.inf allowed")
    q: float = Field(..., description="Exponent in the frequency variable; math.inf allowed")

    @field_validator("p", "q")
    @classmethod
    def _at_least_one(cls, value: float) -> float:
        # raised as-is: pydantic wraps only ValueError and AssertionError
        if not value >= 1:
            raise ExponentError(f"exponent must lie in [1, inf], got {value}")
        return value

    @staticmethod
    def conjugate(value: float) -> float:
        if value == 1:
            return math.inf
        if math.isinf(value):
            return 1.0
        return value / (value - 1.0)

    def conjugates(self) -> "ExponentPair":
        return ExponentPair(p=self.conjugate(self.p), q=self.conjugate(self.q))


class NormSpec(BaseModel):
    """Weighted mixed norm over a time-frequency matrix.

    modulation: L^p in x inside, L^q in xi outside. amalgam: L^q in xi inside, L^p in x outside.
    """

    model_config = ConfigDict(frozen=True)

    exponents: ExponentPair
    s: float = Field(0.0, description="Frequency weight order: <xi>^s")
    s1: float = Field(0.0, description="Space weight order: <x>^s1")
    flavor: Flavor = Flavor.MODULATION

    @classmethod
    def modulation(cls, p: float, q: float, s: float = 0.0, s1: float = 0.0) -> "NormSpec":
        return cls(exponents=ExponentPair(p=p, q=q), s=s, s1=s1, flavor=Flavor.MODULATION)

    @classmethod
    def amalgam(cls, p: float, q: float, s: float = 0.0, s1: float = 0.0) -> "NormSpec":
        return cls(exponents=ExponentPair(p=p, q=q), s=s, s1=s1, flavor=Flavor.AMALGAM)
