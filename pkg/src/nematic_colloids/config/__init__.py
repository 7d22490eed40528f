"""
Run configuration: Pydantic models, file loading and domain construction.
"""
from .loader import load_config
from .models import LoggingConfig, RunConfig

__all__ = ["load_config", "LoggingConfig", "RunConfig"]
