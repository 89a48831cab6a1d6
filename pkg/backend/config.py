from pathlib import Path
from typing import List
from pydantic_settings import BaseSettings

class Settings(BaseSettings):
    """Application settings loaded from FANFORGE_* environment variables"""

    # Application
    APP_NAME: str = "fanforge"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False

    # Database
    DATABASE_PATH: Path = Path(__file__).parent.parent / "database" / "fanforge.db"

    # CORS
    CORS_ORIGINS: List[str] = [
        "http://localhost:8000",
        "http://127.0.0.1:8000",
    ]

    # Search ceilings (CLI flags override these)
    CAP: int = 50_000  # candidate isomorphism classes per certificate
    NODE_CAP: int = 200_000  # recognizer nodes per candidate
    THREADS: int = 1
    SEED: int = 0

    # Certification
    DEPTH: int = 2
    MAX_ELEMENTS: int = 24

    class Config:
        env_prefix = "FANFORGE_"
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"

# Global settings instance
settings = Settings()
