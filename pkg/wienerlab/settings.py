from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class LabSettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="WIENERLAB_")

    threads: int = Field(1, ge=1, description="Worker count for FFT batches and scan cells")


@lru_cache(maxsize=1)
def get_settings() -> LabSettings:
    return LabSettings()
