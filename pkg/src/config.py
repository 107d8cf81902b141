"""
Configuration module for the modular-curve splitting toolkit
"""
import logging
import os
from pathlib import Path
from pydantic_settings import BaseSettings
from dotenv import load_dotenv

# Load environment variables from project root
project_root = Path(__file__).parent.parent
env_path = project_root / ".env"
load_dotenv(dotenv_path=env_path)


class Settings(BaseSettings):
    """Application settings"""

    # Registry Configuration
    registry_path: str = os.getenv("REGISTRY_PATH", str(project_root / "data" / "curves.txt"))
    verify_checksum: bool = os.getenv("VERIFY_CHECKSUM", "true").lower() in ("1", "true", "yes")

    # Sampling Configuration
    sample_height: int = int(os.getenv("SAMPLE_HEIGHT", "200"))

    # Residue Enumeration Configuration
    escalation_margin: int = int(os.getenv("ESCALATION_MARGIN", "8"))

    # Witness Search Configuration
    witness_scan_limit: int = int(os.getenv("WITNESS_SCAN_LIMIT", "100000"))

    # Table Configuration
    unramified_prime_bound: int = int(os.getenv("UNRAMIFIED_PRIME_BOUND", "100"))

    # Execution Configuration
    jobs: int = int(os.getenv("JOBS", "1"))
    log_level: str = os.getenv("LOG_LEVEL", "WARNING")

    class Config:
        env_file = ".env"
        protected_namespaces = ('settings_',)


# Global settings instance
settings = Settings()


def configure_logging(level: str | None = None) -> None:
    """
    Configure root logging once for the command line

    Args:
        level: Optional override of the configured log level
    """
    logging.basicConfig(
        level=(level or settings.log_level).upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
