"""TOML config files and the flags > file > defaults precedence."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from typing import Any, Dict, Mapping, Optional

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .model import ConfigError, PipelineConfig, validate_config

WORKERS_ENV = "CORPUS_FORGE_WORKERS"

# (section, key) -> PipelineConfig field
FIELD_MAP = {
    (None, "seed"): "seed",
    (None, "worker_count"): "worker_count",
    (None, "workers"): "worker_count",
    ("quality", "min_line_words"): "min_line_words",
    ("quality", "bullet_ratio_max"): "bullet_ratio_max",
    ("quality", "ellipsis_ratio_max"): "ellipsis_ratio_max",
    ("quality", "duplicate_line_fraction_max"): "duplicate_line_fraction_max",
    ("quality", "top_2gram_fraction_max"): "top_2gram_fraction_max",
    ("langid", "threshold"): "langid_threshold",
    ("langid", "target_language"): "target_language",
    ("dedup", "permutations"): "minhash_permutations",
    ("dedup", "bands"): "lsh_bands",
    ("dedup", "rows"): "lsh_rows",
    ("dedup", "shingle_size"): "shingle_size",
    ("dedup", "min_sentence_chars"): "min_sentence_chars",
    ("chunk", "max_words"): "chunk_max_words",
}
_CONFIG_FIELDS = {f.name for f in fields(PipelineConfig)}


@dataclass
class FileSettings:
    """Everything a config file can carry besides the ``PipelineConfig`` fields."""

    overrides: Dict[str, Any] = field(default_factory=dict)
    pii: Dict[str, str] = field(default_factory=dict)
    stages: Optional[str] = None
    allow_reorder: bool = False
    langid_model: Optional[str] = None


def parse_settings(data: Mapping[str, Any]) -> FileSettings:
    settings = FileSettings()
    for key, value in data.items():
        if isinstance(value, dict):
            section = key
            for sub, v in value.items():
                if section == "pii":
                    settings.pii[sub] = v
                elif section == "pipeline" and sub == "stages":
                    settings.stages = ",".join(v) if isinstance(v, list) else str(v)
                elif section == "pipeline" and sub == "allow_reorder":
                    settings.allow_reorder = bool(v)
                elif section == "langid" and sub == "model":
                    settings.langid_model = v
                elif (section, sub) in FIELD_MAP:
                    settings.overrides[FIELD_MAP[(section, sub)]] = v
                else:
                    raise ConfigError(f"unknown config key [{section}] {sub}")
        elif (None, key) in FIELD_MAP:
            settings.overrides[FIELD_MAP[(None, key)]] = value
        elif key in _CONFIG_FIELDS:
            settings.overrides[key] = value
        else:
            raise ConfigError(f"unknown config key {key}")
    return settings


def load_settings(path) -> FileSettings:
    with open(path, "rb") as fh:
        return parse_settings(tomllib.load(fh))


def resolve_config(
    file_settings: Optional[FileSettings] = None,
    flag_overrides: Optional[Mapping[str, Any]] = None,
    environ: Mapping[str, str] = os.environ,
) -> PipelineConfig:
    """Defaults, then the config file, then ``CORPUS_FORGE_WORKERS``, then flags."""
    values: Dict[str, Any] = {}
    if file_settings is not None:
        values.update(file_settings.overrides)
    env_workers = environ.get(WORKERS_ENV)
    if env_workers:
        try:
            values["worker_count"] = int(env_workers)
        except ValueError as exc:
            raise ConfigError(f"{WORKERS_ENV}={env_workers!r} is not an integer") from exc
    if flag_overrides:
        values.update({k: v for k, v in flag_overrides.items() if v is not None})
    return validate_config(PipelineConfig(**values))
