"""INI configuration for the sweeps.

Every key is optional; anything missing keeps the value in
``configs/default.ini`` (which mirrors the dataclass defaults).
"""
from __future__ import annotations

import configparser
from dataclasses import fields, replace
from pathlib import Path

from .clustering import KMeansConfig
from .costmodel import DecayModel, PricingCatalog
from .errors import ConfigurationError
from .experiments import ScenarioConfig
from .workload import GopStats, TranscodeTimeModel

_SECTIONS = {
    "pricing": ("pricing", PricingCatalog),
    "gop_stats": ("gop_stats", GopStats),
    "transcode": ("time_model", TranscodeTimeModel),
    "decay": ("decay", DecayModel),
    "kmeans": ("kmeans", KMeansConfig),
}

_TUPLE_KEYS = {"weibull_shapes": float, "fav_targets": float, "view_growth_steps": float,
               "seeds": int}


def _coerce(raw: str, default):
    if isinstance(default, bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw.strip()


def _parse_list(raw: str, kind):
    return tuple(kind(p) for p in raw.replace(",", " ").split())


def _section_to(obj, section, where):
    known = {f.name: getattr(obj, f.name) for f in fields(obj)}
    updates = {}
    for key, raw in section.items():
        if key not in known:
            raise KeyError(f"unknown key {key!r} in [{where}]")
        updates[key] = _coerce(raw, known[key])
    return replace(obj, **updates)


def load_config(path=None, base: ScenarioConfig | None = None) -> ScenarioConfig:
    cfg = ScenarioConfig() if base is None else base
    if path is None:
        return cfg
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path) as fh:
        try:
            parser.read_file(fh)
        except configparser.Error as exc:
            raise ConfigurationError(f"malformed config {path}: {exc}") from exc
    updates = {}
    for name in parser.sections():
        section = parser[name]
        if name == "experiment":
            for key, raw in section.items():
                if key in _TUPLE_KEYS:
                    updates[key] = _parse_list(raw, _TUPLE_KEYS[key])
                elif key == "view_scale":
                    updates[key] = None if raw.strip().lower() in ("", "auto", "none") else float(raw)
                elif key in {f.name for f in fields(ScenarioConfig)}:
                    updates[key] = _coerce(raw, getattr(cfg, key))
                else:
                    raise KeyError(f"unknown key {key!r} in [experiment]")
        elif name in _SECTIONS:
            attr, _ = _SECTIONS[name]
            updates[attr] = _section_to(getattr(cfg, attr), section, name)
        else:
            raise KeyError(f"unknown section [{name}]")
    return replace(cfg, **updates)


def dump_config(cfg: ScenarioConfig) -> str:
    """INI text that :func:`load_config` reads back to ``cfg``."""
    lines = ["[experiment]"]
    for f in fields(ScenarioConfig):
        value = getattr(cfg, f.name)
        if f.name in ("pricing", "gop_stats", "time_model", "decay", "kmeans"):
            continue
        if f.name in _TUPLE_KEYS:
            value = ", ".join(repr(v) for v in value)
        elif value is None:
            value = "auto"
        lines.append(f"{f.name} = {value}")
    for name, (attr, _) in _SECTIONS.items():
        obj = getattr(cfg, attr)
        lines += ["", f"[{name}]"]
        lines += [f"{f.name} = {getattr(obj, f.name)!r}" for f in fields(obj)]
    return "\n".join(lines) + "\n"


def default_config_path() -> Path:
    return Path(__file__).resolve().parents[2] / "configs" / "default.ini"
