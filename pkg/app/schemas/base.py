"""
Shared pieces for schemas that carry numpy arrays.
"""
from typing import Annotated, Any

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, PlainSerializer


def _as_float_array(v: Any) -> np.ndarray:
    return np.array(v, dtype=np.float64)


FloatArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_float_array),
    PlainSerializer(lambda a: np.asarray(a).tolist(), return_type=list),
]


class ArrayModel(BaseModel):
    """Base schema for models holding numpy arrays."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
