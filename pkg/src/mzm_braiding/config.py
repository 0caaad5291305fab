"""Line-oriented ``key = value`` configuration with dotted section keys.

Example::

    chain1.mu = 0.02
    protocol.duration = 20.0
    composite.order = fig3
    # comments and blank lines are ignored

Values are coerced to int, float or bool where possible, otherwise kept as
strings.  The pseudo-prefix ``chain.`` fans out to both ``chain1.`` and
``chain2.`` (convenient for sweeps over a parameter shared by both chains).
"""

from __future__ import annotations

from typing import Iterable

__all__ = ["ConfigError", "coerce_value", "parse_config_text", "parse_config_file",
           "parse_overrides", "apply_setting"]


class ConfigError(ValueError):
    """Invalid configuration (unknown key, malformed line, bad value)."""


def coerce_value(raw: str):
    s = raw.strip()
    low = s.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        pass
    return s


def parse_config_text(text: str) -> dict:
    out: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = coerce_value(value)
    return out


def parse_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc


def parse_overrides(pairs: Iterable[str]) -> dict:
    """Parse ``--set key=value`` arguments."""
    out: dict = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        out[key] = coerce_value(value)
    return out


def apply_setting(config: dict, key: str, value) -> None:
    """Set one key, expanding the ``chain.`` fan-out prefix; the key (after
    expansion) must already exist in the config."""
    if key.startswith("chain."):
        suffix = key[len("chain."):]
        apply_setting(config, f"chain1.{suffix}", value)
        apply_setting(config, f"chain2.{suffix}", value)
        return
    if key not in config:
        raise ConfigError(f"unknown config key {key!r}")
    config[key] = value
