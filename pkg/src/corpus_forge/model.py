"""Shared data model: documents, filter outcomes and pipeline configuration."""

from __future__ import annotations

import dataclasses
import enum
import unicodedata
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

NORMALIZATION_FORM = "NFC"


class SourceKind(str, enum.Enum):
    WEB = "web"
    DOCUMENT = "document"
    WIKI = "wiki"
    TRANSCRIPT = "transcript"


class Decision(str, enum.Enum):
    KEEP = "Keep"
    DROP = "Drop"
    TRANSFORMED = "Transformed"


class Reason(str, enum.Enum):
    # drop reasons
    EMPTY_AFTER_C4 = "EmptyAfterC4"
    BULLET_RATIO = "BulletRatio"
    ELLIPSIS_RATIO = "EllipsisRatio"
    DUPLICATE_LINE_FRACTION = "DuplicateLineFraction"
    TOP_2GRAM_FRACTION = "Top2GramFraction"
    LANGID_BELOW_THRESHOLD = "LangIdBelowThreshold"
    DUPLICATE_SENTENCE = "DuplicateSentence"
    NEAR_DUPLICATE_DOC = "NearDuplicateDoc"
    # line-level / transform reasons
    TOO_FEW_WORDS_LINE = "TooFewWordsLine"
    NO_TERMINAL_PUNCT = "NoTerminalPunct"
    PII_SCRUBBED = "PiiScrubbed"
    SENTENCES_REMOVED = "SentencesRemoved"
    CHUNKED = "Chunked"

    @property
    def is_drop(self) -> bool:
        return self in DROP_REASONS


DROP_REASONS = frozenset(
    {
        Reason.EMPTY_AFTER_C4,
        Reason.BULLET_RATIO,
        Reason.ELLIPSIS_RATIO,
        Reason.DUPLICATE_LINE_FRACTION,
        Reason.TOP_2GRAM_FRACTION,
        Reason.LANGID_BELOW_THRESHOLD,
        Reason.DUPLICATE_SENTENCE,
        Reason.NEAR_DUPLICATE_DOC,
    }
)


@dataclass(frozen=True)
class FilterOutcome:
    decision: Decision
    reason: Optional[Reason] = None
    detail: Optional[str] = None

    def __post_init__(self):
        if self.decision is Decision.DROP and (self.reason is None or not self.reason.is_drop):
            raise ValueError(f"Drop needs a drop reason, got {self.reason!r}")
        if self.decision is not Decision.DROP and self.reason is not None and self.reason.is_drop:
            raise ValueError(f"{self.decision.value} cannot carry drop reason {self.reason.value}")

    @property
    def dropped(self) -> bool:
        return self.decision is Decision.DROP

    @classmethod
    def keep(cls) -> "FilterOutcome":
        return KEEP

    @classmethod
    def drop(cls, reason: Reason, detail: Optional[str] = None) -> "FilterOutcome":
        return cls(Decision.DROP, reason, detail)

    @classmethod
    def transformed(cls, reason: Optional[Reason] = None, detail: Optional[str] = None) -> "FilterOutcome":
        return cls(Decision.TRANSFORMED, reason, detail)


KEEP = FilterOutcome(Decision.KEEP)


def normalize_text(text: str) -> str:
    """Canonical form applied once at ingest: NFC and ``\\n`` line endings."""
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    return unicodedata.normalize(NORMALIZATION_FORM, text)


def word_count(text: str) -> int:
    return len(text.split())


@dataclass(frozen=True)
class Document:
    id: str
    source: str
    text: str
    source_kind: SourceKind = SourceKind.WEB
    lang_confidence: Optional[float] = None
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise ValueError("Document id must be non-empty")
        if not isinstance(self.source_kind, SourceKind):
            object.__setattr__(self, "source_kind", SourceKind(self.source_kind))
        if self.lang_confidence is not None and not 0.0 <= self.lang_confidence <= 1.0:
            raise ValueError(f"lang_confidence out of [0, 1]: {self.lang_confidence}")

    @classmethod
    def create(cls, id: str, source: str, text: str, **kwargs) -> "Document":
        """Build a document from raw text, applying ingest normalization."""
        return cls(id=id, source=source, text=normalize_text(text), **kwargs)

    def replace(self, **changes) -> "Document":
        return dataclasses.replace(self, **changes)

    @property
    def words(self) -> int:
        return word_count(self.text)

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "source": self.source,
            "source_kind": self.source_kind.value,
            "text": self.text,
            "meta": dict(self.meta),
        }
        if self.lang_confidence is not None:
            d["lang_confidence"] = self.lang_confidence
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Document":
        return cls(
            id=d["id"],
            source=d.get("source", "unknown"),
            text=d["text"],
            source_kind=SourceKind(d.get("source_kind", "web")),
            lang_confidence=d.get("lang_confidence"),
            meta=dict(d.get("meta") or {}),
        )


@dataclass(frozen=True)
class PipelineConfig:
    langid_threshold: float = 0.65
    target_language: str = "mk"
    min_line_words: int = 3
    bullet_ratio_max: float = 0.90
    ellipsis_ratio_max: float = 0.30
    # optional Gopher repetition rules; None disables
    duplicate_line_fraction_max: Optional[float] = None
    top_2gram_fraction_max: Optional[float] = None
    chunk_max_words: int = 4000
    min_sentence_chars: int = 15
    minhash_permutations: int = 128
    lsh_bands: int = 16
    lsh_rows: int = 8
    shingle_size: int = 5
    seed: int = 1234
    worker_count: int = 1

    def replace(self, **changes) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)

    @property
    def lsh_threshold(self) -> float:
        """Similarity at which a pair collides in a band with probability ~0.5."""
        return (1.0 / self.lsh_bands) ** (1.0 / self.lsh_rows)


_RATIO_FIELDS = ("langid_threshold", "bullet_ratio_max", "ellipsis_ratio_max")
_OPTIONAL_RATIO_FIELDS = ("duplicate_line_fraction_max", "top_2gram_fraction_max")
_COUNT_FIELDS = (
    "min_line_words",
    "chunk_max_words",
    "min_sentence_chars",
    "minhash_permutations",
    "lsh_bands",
    "lsh_rows",
    "shingle_size",
    "worker_count",
)


class ConfigError(ValueError):
    pass


def validate_config(config: PipelineConfig) -> PipelineConfig:
    for name in _RATIO_FIELDS:
        value = getattr(config, name)
        if not 0.0 <= value <= 1.0:
            raise ConfigError(f"{name}={value} is outside [0, 1]")
    for name in _OPTIONAL_RATIO_FIELDS:
        value = getattr(config, name)
        if value is not None and not 0.0 <= value <= 1.0:
            raise ConfigError(f"{name}={value} is outside [0, 1]")
    for name in _COUNT_FIELDS:
        value = getattr(config, name)
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ConfigError(f"{name}={value!r} must be an integer >= 1")
    if config.lsh_bands * config.lsh_rows != config.minhash_permutations:
        raise ConfigError(
            f"lsh_bands x lsh_rows = {config.lsh_bands * config.lsh_rows} "
            f"!= minhash_permutations = {config.minhash_permutations}"
        )
    if not config.target_language:
        raise ConfigError("target_language must be non-empty")
    return config
