"""Locate the data files shipped in hyperwitten.resources"""
from __future__ import annotations

import importlib.resources as pkg_resources
from typing import TYPE_CHECKING, Any, Dict

import hyperwitten.resources

from .util import load_json

if TYPE_CHECKING:
    from importlib.abc import Traversable

_all: Dict[str, Traversable] = {
    entry.name: entry
    for entry in pkg_resources.files(hyperwitten.resources).iterdir()
    if entry.is_file() and entry.name.endswith(".json")
}


def names() -> list[str]:
    return sorted(_all)


def get(key: str) -> Traversable:
    """Get a resource by its file name"""
    try:
        return _all[key]
    except KeyError:
        raise KeyError(f"no resource named {key!r}; known: {', '.join(names())}") from None


def load(key: str) -> Any:
    """Parse a JSON resource"""
    with get(key).open("r", encoding="utf-8") as stream:
        return load_json(stream)
