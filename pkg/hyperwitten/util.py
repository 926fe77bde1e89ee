"""hyperwitten utilities: environment, deterministic JSON and CSV output"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from enum import Enum
from typing import Any, Iterable, NamedTuple, Optional, Sequence, TextIO

import numpy as np

from .errors import ConfigError, PotentialFormatError


class EnvironmentVariables(NamedTuple):
    WITTEN_THREADS: Optional[str]
    WITTEN_DEBUG: Optional[str]


def get_environment_variables(default: Optional[str] = None) -> EnvironmentVariables:
    return EnvironmentVariables(
        **{name: os.getenv(name, default) for name in EnvironmentVariables._fields}
    )


def thread_cap(env: EnvironmentVariables) -> Optional[int]:
    """Parse WITTEN_THREADS, None when unset"""
    if not env.WITTEN_THREADS:
        return None
    try:
        threads = int(env.WITTEN_THREADS)
    except ValueError as err:
        raise ConfigError(f"WITTEN_THREADS must be an integer: {err}") from err
    if threads < 1:
        raise ConfigError("WITTEN_THREADS must be at least 1")
    return threads


class Format(str, Enum):
    """Output formats of the command line"""

    JSON = "json"
    CSV = "csv"


def complex_to_json(value: complex) -> dict[str, float]:
    value = complex(value)
    return {"re": value.real, "im": value.imag}


def complex_from_json(obj: dict[str, Any]) -> complex:
    return complex(float(obj["re"]), float(obj.get("im", 0.0)))


def _reject_constant(name: str):
    raise PotentialFormatError(f"non-finite number {name} in input")


def load_json(stream: TextIO) -> Any:
    """Parse JSON, rejecting NaN and Infinity"""
    try:
        return json.load(stream, parse_constant=_reject_constant)
    except json.JSONDecodeError as err:
        raise PotentialFormatError(f"malformed JSON: {err}") from err


def format_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"cannot serialise non-finite value {value}")
    if value == 0.0:
        return "0.0"
    text = format(value, ".17g")
    if "e" not in text and "." not in text:
        text += ".0"
    return text


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode(complex_to_json(obj), indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, Enum):
        return json.dumps(obj.value)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{json.dumps(str(key))}: {_encode(value, indent, level + 1)}"
            for key, value in obj.items()
        ]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [_encode(value, indent, level + 1) for value in obj]
        return "[" + pad + ("," + pad).join(items) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON: insertion-ordered keys, floats with 17 significant digits"""
    return _encode(obj, indent, 0) + "\n"


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [format_float(float(v)) if isinstance(v, (float, np.floating)) else v for v in row]
        )
    return buffer.getvalue()
