"""Language identification: a rank-order character n-gram classifier and the gate.

The reference classifier follows the classic profile approach: each language
is a ranked list of its most frequent character n-grams, and a text is
assigned to the language whose ranking is closest under the out-of-place
distance. External models plug in through :class:`LanguageClassifier`.
"""

from __future__ import annotations

import functools
import json
import re
import struct
import zlib
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Protocol, Sequence, Tuple, runtime_checkable

from .model import Document, FilterOutcome, KEEP, PipelineConfig, Reason

UNDETERMINED = "und"
MAX_CHARS = 4096
DEFAULT_N_RANGE = (1, 4)
DEFAULT_TOP_K = 3000
# how many of the text's own n-grams are compared against each profile
DOC_TOP_K = 400
# scales the relative distance margin between the two closest languages
CONFIDENCE_GAIN = 8.0

MODEL_MAGIC = b"CFLANGID"
MODEL_VERSION = 1

_NON_LETTERS = re.compile(r"[\W\d_]+")


@dataclass(frozen=True)
class LangPrediction:
    language: str
    confidence: float

    def __post_init__(self):
        if not self.language:
            raise ValueError("language code must be non-empty")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence out of [0, 1]: {self.confidence}")


@runtime_checkable
class LanguageClassifier(Protocol):
    def predict(self, text: str) -> LangPrediction: ...


def _prepare(text: str) -> str:
    text = _NON_LETTERS.sub(" ", text[:MAX_CHARS].lower()).strip()
    return f" {text} " if text else ""


def ngram_counts(text: str, n_range: Tuple[int, int] = DEFAULT_N_RANGE) -> Counter:
    text = _prepare(text)
    counts: Counter = Counter()
    lo, hi = n_range
    for n in range(lo, hi + 1):
        counts.update(text[i : i + n] for i in range(len(text) - n + 1))
    counts.pop(" ", None)
    return counts


def rank_profile(counts: Mapping[str, int], top_k: int) -> Dict[str, int]:
    # ties broken by the gram itself so the ranking never depends on insertion order
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]
    return {gram: rank for rank, (gram, _) in enumerate(ordered)}


class NgramProfileClassifier:
    def __init__(self, profiles: Mapping[str, Mapping[str, int]], n_range=DEFAULT_N_RANGE, top_k=DEFAULT_TOP_K):
        if len(profiles) < 2:
            raise ValueError("need profiles for at least two languages")
        self.profiles = {lang: dict(p) for lang, p in sorted(profiles.items())}
        self.n_range = tuple(n_range)
        self.top_k = top_k

    @property
    def languages(self) -> List[str]:
        return list(self.profiles)

    def distances(self, text: str) -> Dict[str, float]:
        """Out-of-place distance to each language, normalized to [0, 1]."""
        doc = rank_profile(ngram_counts(text, self.n_range), DOC_TOP_K)
        if not doc:
            return {lang: 1.0 for lang in self.profiles}
        penalty = self.top_k
        grams = list(doc.items())
        out = {}
        for lang, prof in self.profiles.items():
            get = prof.get
            total = 0
            for gram, rank in grams:
                other = get(gram, -penalty)
                d = rank - other if rank > other else other - rank
                total += d if d < penalty else penalty
            out[lang] = total / (penalty * len(grams))
        return out

    def predict(self, text: str) -> LangPrediction:
        dist = self.distances(text)
        if all(d >= 1.0 for d in dist.values()):
            return LangPrediction(UNDETERMINED, 0.0)
        ranked = sorted(dist.items(), key=lambda kv: (kv[1], kv[0]))
        (best, d1), (_, d2) = ranked[0], ranked[1]
        margin = (d2 - d1) / d2 if d2 > 0 else 0.0
        return LangPrediction(best, min(1.0, CONFIDENCE_GAIN * margin))

    # -- serialization --------------------------------------------------

    def to_bytes(self) -> bytes:
        payload = json.dumps(
            {"n_range": list(self.n_range), "top_k": self.top_k, "profiles": {
                lang: sorted(prof, key=prof.__getitem__) for lang, prof in self.profiles.items()
            }},
            ensure_ascii=False,
            sort_keys=True,
        ).encode("utf-8")
        return MODEL_MAGIC + struct.pack("<H", MODEL_VERSION) + zlib.compress(payload, 9)

    @classmethod
    def from_bytes(cls, data: bytes) -> "NgramProfileClassifier":
        if not data.startswith(MODEL_MAGIC):
            raise ValueError("not a language-ID profile model")
        (version,) = struct.unpack_from("<H", data, len(MODEL_MAGIC))
        if version != MODEL_VERSION:
            raise ValueError(f"unsupported profile model version {version}")
        body = json.loads(zlib.decompress(data[len(MODEL_MAGIC) + 2 :]).decode("utf-8"))
        profiles = {lang: {g: r for r, g in enumerate(grams)} for lang, grams in body["profiles"].items()}
        return cls(profiles, tuple(body["n_range"]), body["top_k"])

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "NgramProfileClassifier":
        return cls.from_bytes(Path(path).read_bytes())


def train_ngram_profiles(
    samples: Iterable[Tuple[str, str]],
    n_range: Tuple[int, int] = DEFAULT_N_RANGE,
    top_k: int = DEFAULT_TOP_K,
) -> NgramProfileClassifier:
    """Build per-language rank profiles from ``(text, language)`` samples."""
    counts: Dict[str, Counter] = {}
    for text, lang in samples:
        if not lang:
            raise ValueError("empty language code")
        grams = ngram_counts(text, n_range)
        if grams:
            counts.setdefault(lang, Counter()).update(grams)
    if len(counts) < 2:
        raise ValueError(f"need non-empty samples for at least two languages, got {sorted(counts)}")
    return NgramProfileClassifier({lang: rank_profile(c, top_k) for lang, c in counts.items()}, n_range, top_k)


BUNDLED_LANGUAGES = ("bg", "en", "mk", "ru", "sr")


def bundled_samples() -> List[Tuple[str, str]]:
    root = resources.files("corpus_forge") / "langid_data"
    samples = []
    for lang in BUNDLED_LANGUAGES:
        text = (root / f"{lang}.txt").read_text(encoding="utf-8")
        samples.extend((para, lang) for para in text.split("\n") if para.strip())
    return samples


@functools.lru_cache(maxsize=None)
def bundled_classifier() -> NgramProfileClassifier:
    """Reference classifier trained on the small bundled bg/en/mk/ru/sr texts."""
    return train_ngram_profiles(bundled_samples())


class FastTextAdapter:
    """Adapter for a pretrained fastText language-ID model (``pip install fasttext``)."""

    def __init__(self, model_path, label_prefix: str = "__label__"):
        import fasttext  # optional dependency

        self.model_path = str(model_path)
        self.label_prefix = label_prefix
        self._model = fasttext.load_model(self.model_path)

    def predict(self, text: str) -> LangPrediction:
        text = text[:MAX_CHARS].replace("\n", " ").strip()
        if not text:
            return LangPrediction(UNDETERMINED, 0.0)
        labels, probs = self._model.predict(text, k=1)
        lang = labels[0][len(self.label_prefix):] if labels else UNDETERMINED
        conf = float(probs[0]) if len(probs) else 0.0
        return LangPrediction(lang or UNDETERMINED, min(1.0, max(0.0, conf)))

    def __reduce__(self):
        return (type(self), (self.model_path, self.label_prefix))


def load_classifier(spec: Optional[str] = None) -> LanguageClassifier:
    """Resolve ``--langid-model``: ``bundled`` / None, ``fasttext:PATH`` or a profile model file."""
    if spec in (None, "", "bundled"):
        return bundled_classifier()
    if spec.startswith("fasttext:"):
        return FastTextAdapter(spec[len("fasttext:"):])
    return NgramProfileClassifier.load(spec)


def gate(doc: Document, clf: LanguageClassifier, config: PipelineConfig) -> Tuple[Document, FilterOutcome]:
    pred = clf.predict(doc.text)
    doc = doc.replace(lang_confidence=pred.confidence, meta={**doc.meta, "language": pred.language})
    return doc, gate_decision(pred, config)


def gate_decision(pred: LangPrediction, config: PipelineConfig) -> FilterOutcome:
    if pred.language == config.target_language and pred.confidence > config.langid_threshold:
        return KEEP
    return FilterOutcome.drop(Reason.LANGID_BELOW_THRESHOLD, f"{pred.language}:{pred.confidence:.4f}")
