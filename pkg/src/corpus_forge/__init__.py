"""Deterministic corpus curation for low-resource-language LLM training data."""

from .model import (
    ConfigError,
    Decision,
    Document,
    FilterOutcome,
    PipelineConfig,
    Reason,
    SourceKind,
    validate_config,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "Decision",
    "Document",
    "FilterOutcome",
    "PipelineConfig",
    "Reason",
    "SourceKind",
    "validate_config",
]
