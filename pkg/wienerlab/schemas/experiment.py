import math
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from wienerlab.schemas.gabor import ScanReport
from wienerlab.schemas.grid import GridSpec
from wienerlab.schemas.timefreq import WindowCertificate, WindowKind

REPORT_SCHEMA_VERSION = "1"


class Scenario(str, Enum):
    IDENTITIES = "identities"
    NORMS = "norms"
    LEMMA_SCAN = "lemma_scan"
    SHARPNESS = "sharpness"
    OPERATOR_SPOT = "operator_spot"


class ReportFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


def _split_list(value):
    if isinstance(value, str):
        return [item for item in value.replace(",", " ").split() if item]
    return value


class ExperimentConfig(BaseModel):
    """Everything needed to re-run a scenario; echoed verbatim into its report."""

    model_config = ConfigDict(frozen=True, extra="forbid", ser_json_inf_nan="strings")

    scenario: Scenario
    dimension: int = Field(1, ge=1, le=2)
    p: float = Field(1.0, ge=1)
    q: float = Field(math.inf, ge=1)
    s: float = 0.0
    s_list: List[float] = Field(default_factory=lambda: [0.5, 1.0, 1.5])
    n_list: List[int] = Field(default_factory=lambda: [16, 32, 64, 128, 256])
    spot_n_list: Optional[List[int]] = Field(
        None,
        description="N values for operator-level runs; operator_spot falls back to [2, 4], sharpness adds the operator path only when set",
    )
    grid_m: int = Field(256, ge=8, description="Samples per axis")
    grid_l: Optional[float] = Field(None, gt=0, description="Half extent; None selects the shear-compatible grid")
    window: WindowKind = WindowKind.GAUSSIAN
    window_width: float = Field(1.0, gt=0)
    boundary_tolerance: float = Field(1e-8, gt=0)
    format: ReportFormat = ReportFormat.JSON
    out: Optional[Path] = None

    @field_validator("s_list", "n_list", "spot_n_list", mode="before")
    @classmethod
    def _parse_list(cls, value):
        return _split_list(value)

    @field_validator("n_list", "spot_n_list")
    @classmethod
    def _increasing(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is None:
            return value
        if any(n < 1 for n in value):
            raise ValueError("support radii must be at least 1")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("must be strictly increasing")
        return value

    @model_validator(mode="after")
    def _scenario_requirements(self) -> "ExperimentConfig":
        if self.scenario in (Scenario.LEMMA_SCAN, Scenario.SHARPNESS) and not self.n_list:
            raise ValueError("n_list must not be empty")
        if self.scenario == Scenario.SHARPNESS and not self.s_list:
            raise ValueError("s_list must not be empty")
        if self.scenario == Scenario.OPERATOR_SPOT and self.spot_n_list is not None and len(self.spot_n_list) < 2:
            raise ValueError("spot_n_list needs at least two entries")
        if self.grid_m % 2:
            raise ValueError("grid_m must be even")
        return self


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    name: str
    value: float
    tolerance: float = Field(..., description="Bound the value was compared against")
    comparison: str = Field(
        ..., description="How value relates to tolerance when the check passes: '<=', '>', '>=', or '~' for relative drift from reference"
    )
    reference: Optional[float] = Field(None, description="Recorded baseline for '~' checks")
    passed: bool


class Fingerprint(BaseModel):
    model_config = ConfigDict(frozen=True)

    version: str
    threads: int
    grid: Optional[GridSpec] = None
    windows: Dict[str, WindowCertificate] = Field(default_factory=dict)


class Report(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    schema_version: str = REPORT_SCHEMA_VERSION
    config: ExperimentConfig
    checks: List[CheckResult] = Field(default_factory=list)
    scans: List[ScanReport] = Field(default_factory=list)
    fingerprint: Fingerprint
    timings: Dict[str, float] = Field(default_factory=dict, description="Wall-clock seconds per stage")

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)
