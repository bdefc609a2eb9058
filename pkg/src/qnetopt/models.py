"""Shared pydantic field types for numeric data.

Arrays are validated into read-only numpy arrays and serialized as nested
lists, so models holding them dump to plain JSON with round-trip-safe floats.
"""

from __future__ import annotations

from typing import Annotated, Any

import numpy as np
from pydantic import PlainSerializer, PlainValidator


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _as_float_array(value: Any) -> np.ndarray:
    return _frozen(np.array(value, dtype=float))


def _as_int_array(value: Any) -> np.ndarray:
    arr = np.array(value)
    if arr.size and not np.all(np.equal(np.mod(arr, 1), 0)):
        raise ValueError("expected integer entries")
    return _frozen(arr.astype(np.int64))


def _as_bool_array(value: Any) -> np.ndarray:
    return _frozen(np.array(value, dtype=bool))


def _to_list(arr: np.ndarray) -> list[Any]:
    out: list[Any] = arr.tolist()
    return out


FloatArray = Annotated[
    np.ndarray, PlainValidator(_as_float_array), PlainSerializer(_to_list, return_type=list)
]
IntArray = Annotated[
    np.ndarray, PlainValidator(_as_int_array), PlainSerializer(_to_list, return_type=list)
]
BoolArray = Annotated[
    np.ndarray, PlainValidator(_as_bool_array), PlainSerializer(_to_list, return_type=list)
]
