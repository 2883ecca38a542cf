"""Flat ``key=value`` configuration and the built-in presets."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

__all__ = ["Config", "ConfigError", "PRESETS", "preset", "parse_config", "parse_overrides",
           "load_config", "dump_config"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    """Engine configuration; defaults reproduce the Gaussian preset."""

    sr: float = 44100.0
    kind: str = "gaussian"
    T: float = 1.0 / 6.0
    R: float = 4.0
    K: float = 8.0
    a: float | None = None
    C_b: float = 2.0
    C_d: float = 2.0
    C_cut: float = 1000.0
    C_Tc: float = 3.0
    T_max: float = 0.4
    f0: float = 12.0
    k: float = 36.0
    uniform_hop: bool = False
    seed: int = 0
    duration: float = 5.0
    cache: str | None = None

    def replace(self, **kw) -> "Config":
        return dataclasses.replace(self, **kw)

    def validate(self) -> "Config":
        positive = ["sr", "T", "R", "K", "C_b", "C_d", "C_cut", "C_Tc", "T_max",
                    "f0", "k", "duration"]
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.a is not None and not self.a > 0:
            raise ConfigError(f"a must be positive, got {self.a}")
        if self.kind not in ("gaussian", "raised-cosine"):
            raise ConfigError(f"window.kind must be gaussian or raised-cosine, got {self.kind!r}")
        if self.C_Tc < 1:
            raise ConfigError("C_Tc must be >= 1")
        if self.C_cut <= 1:
            raise ConfigError("C_cut must be > 1")
        return self


# file key -> (attribute, parser)
_KEYS = {
    "sr": ("sr", float),
    "window.kind": ("kind", str),
    "window.T": ("T", float),
    "R": ("R", float),
    "K": ("K", float),
    "a": ("a", float),
    "C_b": ("C_b", float),
    "C_d": ("C_d", float),
    "C_cut": ("C_cut", float),
    "C_Tc": ("C_Tc", float),
    "T_max": ("T_max", float),
    "map.f0": ("f0", float),
    "map.k": ("k", float),
    "uniform_hop": ("uniform_hop", lambda s: s.strip().lower() in ("1", "true", "yes", "on")),
    "seed": ("seed", int),
    "duration": ("duration", float),
    "cache": ("cache", str),
}


PRESETS = {
    # C_Tc = 3.0 gives a 0.80 s compute length
    "gaussian": Config(),
    # a is pinned to 1/24 s so that b = 12/7 Hz and 229 bands; C_Tc = 2.93 gives 1.40 s
    "rcw": Config(kind="raised-cosine", T=0.30, R=7.0, K=14.0, a=1.0 / 24.0,
                  C_d=4.0, C_cut=55.0, C_Tc=2.93, T_max=0.5),
}


def preset(name: str, **overrides) -> Config:
    try:
        base = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return base.replace(**overrides).validate()


def parse_overrides(text: str):
    """Return ``(preset_name, {attribute: value})`` for the keys set in ``text``."""
    values = {}
    name = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key == "preset":
            if val not in PRESETS:
                raise ConfigError(f"line {lineno}: unknown preset {val!r}")
            name = val
            continue
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        attr, conv = _KEYS[key]
        try:
            values[attr] = conv(val)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key}: {val!r}") from None
    return name, values


def parse_config(text: str, base: Config | None = None) -> Config:
    """Apply the ``key = value`` lines of ``text`` (``preset = name`` picks the base)."""
    name, values = parse_overrides(text)
    if name is not None:
        base = PRESETS[name]
    return (base or Config()).replace(**values).validate()


def load_config(path) -> Config:
    return parse_config(Path(path).read_text())


def dump_config(cfg: Config) -> str:
    lines = []
    for key, (attr, _) in _KEYS.items():
        val = getattr(cfg, attr)
        if val is None:
            continue
        lines.append(f"{key} = {val!r}" if isinstance(val, float) else f"{key} = {val}")
    return "\n".join(lines) + "\n"
