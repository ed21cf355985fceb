"""Bundled run configurations.

Four source setups ship with the package: a dispersion-engineered
waveguide with matched group velocities ("ideal-waveguide"), the same
geometry with a finite pump quadratic term and a band-pass filter
("geo2-taper-taylor"), and two microring variants with strongly
mismatched and with equal quality factors.  The test suite drives these
rather than hand-built configurations.
"""

from __future__ import annotations

import json
from importlib import resources

from .config import RunConfig
from .errors import ConfigError

__all__ = ["preset_names", "load_preset_dict", "load_preset"]

_PRESET_FILES = {
    "ideal-waveguide": "ideal-waveguide.json",
    "geo2-taper-taylor": "geo2-taper-taylor.json",
    "ring-mismatched-q": "ring-mismatched-q.json",
    "ring-equal-q": "ring-equal-q.json",
}


def preset_names() -> tuple:
    return tuple(_PRESET_FILES)


def load_preset_dict(name: str) -> dict:
    """Raw configuration dictionary for a named preset."""
    key = str(name).lower()
    if key not in _PRESET_FILES:
        known = ", ".join(_PRESET_FILES)
        raise ConfigError("preset", f"unknown preset {name!r}; known: {known}")
    ref = resources.files("topdc.data.presets") / _PRESET_FILES[key]
    return json.loads(ref.read_text())


def load_preset(name: str) -> RunConfig:
    return RunConfig.from_dict(load_preset_dict(name))
