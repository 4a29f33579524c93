"""Bundled demo domains (pick_place, mini) and their sidecar configs."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def data_path(filename: str) -> Path:
    """Filesystem path of a bundled data file."""
    path = resources.files(__package__).joinpath(filename)
    return Path(str(path))


def bundle_paths(name: str) -> dict[str, Path]:
    """Paths of a bundled domain's .pddl/.weights/.shapes/.rules files."""
    return {
        "domain_path": data_path(f"{name}.pddl"),
        "weights_path": data_path(f"{name}.weights"),
        "shapes_path": data_path(f"{name}.shapes"),
        "rules_path": data_path(f"{name}.rules"),
    }
