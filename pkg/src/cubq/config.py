"""Runtime settings for the CLI and the tile service.

Sources, lowest precedence first: built-in defaults, a key=value config
file, CUBQ_* environment variables, explicit flag values.  The file format
is one `key = value` pair per line, `#` starts a comment, keys match the
long CLI flags with either hyphens or underscores.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

ENV_PREFIX = "CUBQ_"


@dataclass(frozen=True)
class Settings:
    cache_dir: str = "~/.cache/cubq"
    port: int = 8742
    workers: int = 2

    @property
    def cache_path(self) -> Path:
        return Path(self.cache_dir).expanduser()


_FIELD_NAMES = tuple(f.name for f in fields(Settings))


def _as_int(name, value, lo, hi):
    try:
        value = int(str(value), 10)
    except ValueError:
        raise ValueError("%s must be an integer, got %r" % (name, value))
    if not lo <= value <= hi:
        raise ValueError("%s must be in %d..%d, got %d" % (name, lo, hi,
                                                           value))
    return value


def _coerce(name, value):
    if name == "port":
        return _as_int(name, value, 1, 65535)
    if name == "workers":
        return _as_int(name, value, 1, 64)
    return str(value)


def parse_config_file(path) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise ValueError("%s:%d: expected key = value" % (path, lineno))
        if key not in _FIELD_NAMES:
            raise ValueError("%s:%d: unknown setting %r" % (path, lineno,
                                                            key))
        out[key] = _coerce(key, value.strip())
    return out


def load_settings(path=None, env=None, **overrides) -> Settings:
    """Resolve settings; overrides with value None are treated as unset."""
    values = {}
    if path is not None:
        values.update(parse_config_file(path))
    env = os.environ if env is None else env
    for name in _FIELD_NAMES:
        raw = env.get(ENV_PREFIX + name.upper())
        if raw is not None:
            values[name] = _coerce(name, raw)
    for name, value in overrides.items():
        if name not in _FIELD_NAMES:
            raise TypeError("unknown setting %r" % name)
        if value is not None:
            values[name] = _coerce(name, value)
    return Settings(**values)
