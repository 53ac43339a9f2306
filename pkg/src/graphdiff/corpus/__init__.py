"""Bundled example graphs with boundary data, used by tests and demos."""
from __future__ import annotations

from importlib import resources
from pathlib import Path


def names() -> list[str]:
    root = resources.files(__name__)
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def path(name: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(f"{name}.json")))


def load(name: str):
    """Graph and assembled boundary data of a bundled example."""
    from ..io import boundary_from_dict, load as load_file

    graph, raw = load_file(path(name))
    return graph, boundary_from_dict(graph, raw)
