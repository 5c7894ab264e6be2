from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="CAMOBENCH_",
        case_sensitive=False,
    )

    seed: int = 0
    jobs: int = 1
    out_dir: str = "out"
    log_level: str = "INFO"

    database_url: str = "sqlite:///./camobench_runs.db"
    report_dir: str = "reports"


@lru_cache
def get_settings() -> Settings:
    return Settings()
