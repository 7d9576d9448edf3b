"""Run configuration: a validated, hashable bundle of settings.

Settings come from an optional TOML or JSON file plus command-line
overrides.  Validation happens at load time so a bad value is rejected
before any work starts, and the effective settings hash into a stable
fingerprint that run manifests record.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ImportError:  # 3.10 and older
    import tomli as tomllib


class ConfigError(ValueError):
    """A setting failed validation or the config file is unusable."""


@dataclass(frozen=True)
class Settings:
    """Everything a run needs, with conservative defaults."""

    suite: str | None = None  # None = bundled task suite
    provider: str = "oracle"
    endpoint: str | None = None
    provider_root: str | None = None
    temperatures: tuple = (0.2,)
    top_p: float = 0.93
    samples: int = 100
    max_new_tokens: int = 512
    k: tuple = (1, 10, 100)
    seed: int = 0
    workers: int | None = None
    mpi_ranks: int = 4
    build_timeout_s: float = 60.0
    run_timeout_s: float = 30.0
    cxx: str | None = None
    mpicxx: str | None = None
    measure_baselines: bool = True

    def __post_init__(self):
        if self.provider not in ("file", "http", "oracle"):
            raise ConfigError(f"provider must be file, http, or oracle: {self.provider!r}")
        if not self.temperatures:
            raise ConfigError("at least one temperature is required")
        for t in self.temperatures:
            if not t > 0:
                raise ConfigError(f"temperature must be positive, got {t}")
        if not 0 < self.top_p <= 1:
            raise ConfigError(f"top_p must be in (0, 1], got {self.top_p}")
        if self.samples < 1:
            raise ConfigError(f"samples must be >= 1, got {self.samples}")
        if self.max_new_tokens < 1:
            raise ConfigError("max_new_tokens must be >= 1")
        if not self.k or any(kv < 1 for kv in self.k):
            raise ConfigError(f"k values must be >= 1, got {self.k}")
        if self.mpi_ranks < 2:
            raise ConfigError("mpi_ranks must be >= 2")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.build_timeout_s <= 0 or self.run_timeout_s <= 0:
            raise ConfigError("timeouts must be positive")

    @property
    def temperature(self) -> float:
        return self.temperatures[0]


_FIELD_NAMES = {f.name for f in dataclasses.fields(Settings)}
# accepted spellings for list-or-scalar temperature input
_ALIASES = {"temperature": "temperatures"}


def _coerce(name: str, value):
    if name == "temperatures":
        if isinstance(value, (int, float)):
            return (float(value),)
        return tuple(float(v) for v in value)
    if name == "k":
        if isinstance(value, int):
            return (value,)
        if isinstance(value, str):
            return parse_k(value)
        return tuple(int(v) for v in value)
    return value


def load_settings(path=None, overrides: dict | None = None) -> Settings:
    """Build Settings from an optional config file plus overrides.

    The file may be TOML or JSON (by suffix).  Unknown keys are an error,
    not a warning: a typo that silently falls back to a default would
    poison a whole run.
    """
    merged: dict = {}
    if path is not None:
        p = Path(path)
        try:
            raw = p.read_bytes()
        except OSError as exc:
            raise ConfigError(f"cannot read config {p}: {exc}") from exc
        if p.suffix == ".toml":
            try:
                data = tomllib.loads(raw.decode("utf-8"))
            except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
                raise ConfigError(f"bad TOML in {p}: {exc}") from exc
        elif p.suffix == ".json":
            try:
                data = json.loads(raw)
            except (json.JSONDecodeError, UnicodeDecodeError) as exc:
                raise ConfigError(f"bad JSON in {p}: {exc}") from exc
        else:
            raise ConfigError(f"config must be .toml or .json, got {p.suffix!r}")
        if not isinstance(data, dict):
            raise ConfigError(f"config root must be a table/object, got {type(data).__name__}")
        merged.update(data)
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})

    cleaned: dict = {}
    for key, value in merged.items():
        name = _ALIASES.get(key, key)
        if name not in _FIELD_NAMES:
            raise ConfigError(f"unknown setting {key!r}")
        try:
            cleaned[name] = _coerce(name, value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from exc
    try:
        return Settings(**cleaned)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def parse_k(text: str) -> tuple:
    """Parse a comma-separated k list like "1,10,100"."""
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"bad k list {text!r}: {exc}") from exc
    if not values:
        raise ConfigError(f"bad k list {text!r}: no values")
    return values


def settings_dict(settings: Settings) -> dict:
    out = dataclasses.asdict(settings)
    out["temperatures"] = list(settings.temperatures)
    out["k"] = list(settings.k)
    return out


def config_hash(settings: Settings) -> str:
    """Stable fingerprint: sha256 of the canonical JSON of all settings."""
    canonical = json.dumps(
        settings_dict(settings), sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
