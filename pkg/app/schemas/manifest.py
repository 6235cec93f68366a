"""
Run manifest schema.
"""
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from app.core.config import settings


class RunManifest(BaseModel):
    """What a command ran with and what it produced.

    Written last, after every listed output exists.
    """

    command: str
    config: Dict[str, Any]
    seed: Optional[int] = None
    input_digests: Dict[str, str] = Field(default_factory=dict)
    outputs: List[str] = Field(default_factory=list)
    duration_seconds: float = 0.0
    exit_code: int = 0
    version: str = Field(default_factory=lambda: settings.VERSION)
    created_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
