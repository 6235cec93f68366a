"""
Core module for the WDRA toolkit.
"""
from app.core.config import settings
from app.core.logging import logger

__all__ = ["settings", "logger"]
