"""
STOL - Configuration
"""

import logging
import sys
from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict

DATA_DIR = Path(__file__).parent.parent / "data"


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="STOL_", env_file=".env", extra="ignore")

    # App
    APP_NAME: str = "STOL"
    APP_VERSION: str = "0.1.0"
    LOG: str = "WARNING"  # STOL_LOG

    # Trainer defaults (normalized Hamming loss scale)
    DEFAULT_C: float = 100.0
    DEFAULT_EPS_CP: float = 1e-3
    DEFAULT_EPS_QP: float = 1e-8
    DEFAULT_MAX_CP_ITERS: int = 1000

    # QP / inference limits
    QP_MAX_UPDATES: int = 1_000_000
    BRUTE_FORCE_LIMIT: int = 1_000_000

    # Data
    DOMAIN_DEFAULTS_FILE: str = str(DATA_DIR / "domain_defaults.json")


settings = Settings()


def configure_logging(level: str = None) -> None:
    """STOL_LOG 기준으로 로깅 설정 ([Tag] message 형식)"""
    name = (level or settings.LOG).upper()
    root = logging.getLogger("stol")
    root.setLevel(getattr(logging, name, logging.WARNING))
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("[%(name)s] %(message)s"))
        root.addHandler(handler)
