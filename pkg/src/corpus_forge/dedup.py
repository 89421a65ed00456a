"""Exact sentence deduplication and MinHash/LSH near-duplicate document removal.

Both passes keep the first occurrence in ascending document-id order, so the
result depends only on the input set, never on worker scheduling.
"""

from __future__ import annotations

import hashlib
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .model import Document, FilterOutcome, PipelineConfig, Reason
from .sentences import sentence_pieces

# fixed, published key for all 64-bit content hashes
HASH_KEY = b"corpus-forge/v1"
_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_WS = re.compile(r"\s+")

Mapper = Callable[..., Iterable]


def hash64(data: str, key: bytes = HASH_KEY) -> int:
    return int.from_bytes(hashlib.blake2b(data.encode("utf-8"), digest_size=8, key=key).digest(), "little")


# -- sentence-level ---------------------------------------------------------


def normalize_sentence(sentence: str) -> str:
    s = unicodedata.normalize("NFC", sentence).casefold()
    return _WS.sub(" ", s).strip()


def sentence_key(sentence: str) -> int:
    return hash64(normalize_sentence(sentence))


@dataclass
class DedupResult:
    kept: List[Document] = field(default_factory=list)
    dropped: List[Tuple[Document, FilterOutcome]] = field(default_factory=list)
    outcomes: Dict[str, FilterOutcome] = field(default_factory=dict)
    report: List[dict] = field(default_factory=list)

    def __iter__(self):
        return iter(self.kept)


def sentence_dedup(docs: Iterable[Document], min_chars: int = 15) -> DedupResult:
    """Remove every repeat of a sentence seen earlier in the corpus.

    Sentences shorter than ``min_chars`` (after whitespace collapsing) are
    never treated as duplicates.
    """
    seen: Set[int] = set()
    result = DedupResult()
    for doc in sorted(docs, key=lambda d: d.id):
        prefix, pieces = sentence_pieces(doc.text)
        kept_pieces = []
        removed = 0
        for sentence, sep in pieces:
            norm = normalize_sentence(sentence)
            if len(norm) >= min_chars:
                key = hash64(norm)
                if key in seen:
                    removed += 1
                    continue
                seen.add(key)
            kept_pieces.append(sentence + sep)
        if not removed:
            result.kept.append(doc)
            continue
        if not kept_pieces:
            outcome = FilterOutcome.drop(Reason.DUPLICATE_SENTENCE, f"removed={removed}")
            result.dropped.append((doc, outcome))
        else:
            outcome = FilterOutcome.transformed(Reason.SENTENCES_REMOVED, f"removed={removed}")
            result.kept.append(doc.replace(text=prefix + "".join(kept_pieces)))
        result.outcomes[doc.id] = outcome
    return result


# -- MinHash ----------------------------------------------------------------


@dataclass(frozen=True)
class MinHashSignature:
    doc_id: str
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MinHashSignature)
            and self.doc_id == other.doc_id
            and np.array_equal(self.values, other.values)
        )

    def similarity(self, other: "MinHashSignature") -> float:
        return estimate_similarity(self.values, other.values)


def estimate_similarity(a: np.ndarray, b: np.ndarray) -> float:
    if len(a) != len(b):
        raise ValueError("signatures differ in length")
    return float(np.count_nonzero(a == b)) / len(a)


_TOKEN = re.compile(r"\w+")


def shingle_tokens(text: str) -> List[str]:
    """Casefolded word tokens with punctuation removed."""
    return _TOKEN.findall(text.casefold())


def shingles(text: str, k: int) -> Set[str]:
    """Word k-shingles over :func:`shingle_tokens`; short texts give one shingle."""
    words = shingle_tokens(text)
    if len(words) < k:
        return {" ".join(words)}
    return {" ".join(words[i : i + k]) for i in range(len(words) - k + 1)}


def permutation_seeds(n: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, 2**64, size=n, dtype=np.uint64, endpoint=False)


def _mix64(z: np.ndarray) -> np.ndarray:
    # SplitMix64 finalizer; uint64 arithmetic wraps
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


_BLOCK = 4096


def signature_values(shingle_set: Iterable[str], seeds: np.ndarray, key: bytes = HASH_KEY) -> np.ndarray:
    base = np.fromiter((hash64(s, key) for s in shingle_set), dtype=np.uint64)
    out = np.full(len(seeds), _MASK64, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for i in range(0, len(base), _BLOCK):
            block = base[i : i + _BLOCK, None] + seeds[None, :]
            np.minimum(out, _mix64(block).min(axis=0), out=out)
    return out


def minhash_signature(doc: Document, config: PipelineConfig) -> MinHashSignature:
    seeds = permutation_seeds(config.minhash_permutations, config.seed)
    return MinHashSignature(doc.id, signature_values(shingles(doc.text, config.shingle_size), seeds))


class _SignatureJob:
    """Picklable per-document signature task for process pools."""

    def __init__(self, config: PipelineConfig):
        self.k = config.shingle_size
        self.seeds = permutation_seeds(config.minhash_permutations, config.seed)

    def __call__(self, doc: Document) -> np.ndarray:
        return signature_values(shingles(doc.text, self.k), self.seeds)


def compute_signatures(docs: Sequence[Document], config: PipelineConfig, mapper: Mapper = map) -> List[MinHashSignature]:
    values = mapper(_SignatureJob(config), docs)
    return [MinHashSignature(d.id, v) for d, v in zip(docs, values)]


# -- LSH --------------------------------------------------------------------


class LshIndex:
    """One table per band, mapping the band's slot values to document ids."""

    def __init__(self, bands: int, rows: int):
        self.bands = bands
        self.rows = rows
        self.tables: List[Dict[bytes, Set[str]]] = [{} for _ in range(bands)]

    def _keys(self, values: np.ndarray):
        if len(values) != self.bands * self.rows:
            raise ValueError(f"signature length {len(values)} != {self.bands} x {self.rows}")
        for b in range(self.bands):
            yield b, values[b * self.rows : (b + 1) * self.rows].tobytes()

    def insert(self, sig: MinHashSignature) -> None:
        for b, key in self._keys(sig.values):
            self.tables[b].setdefault(key, set()).add(sig.doc_id)

    def merge(self, other: "LshIndex") -> None:
        for mine, theirs in zip(self.tables, other.tables):
            for key, ids in theirs.items():
                mine.setdefault(key, set()).update(ids)

    def candidates(self, sig: MinHashSignature) -> Set[str]:
        found: Set[str] = set()
        for b, key in self._keys(sig.values):
            found.update(self.tables[b].get(key, ()))
        found.discard(sig.doc_id)
        return found

    def collides(self, a: MinHashSignature, b: MinHashSignature) -> bool:
        return any(ka == kb for (_, ka), (_, kb) in zip(self._keys(a.values), self._keys(b.values)))


def lsh_dedup(
    docs: Iterable[Document],
    config: PipelineConfig,
    mapper: Mapper = map,
    threshold: Optional[float] = None,
) -> DedupResult:
    """Two-pass near-duplicate removal.

    Pass 1 signs every document and fills the band index. Pass 2 walks the
    documents by ascending id and drops one when a band-colliding, already
    kept document has estimated similarity at or above ``threshold``
    (default: the band-implied ``(1/bands) ** (1/rows)``).
    """
    threshold = config.lsh_threshold if threshold is None else threshold
    docs = sorted(docs, key=lambda d: d.id)
    sigs = compute_signatures(docs, config, mapper)
    index = LshIndex(config.lsh_bands, config.lsh_rows)
    for sig in sigs:
        index.insert(sig)

    by_id = {s.doc_id: s for s in sigs}
    kept_ids: Set[str] = set()
    result = DedupResult()
    for doc, sig in zip(docs, sigs):
        best: Optional[Tuple[float, str]] = None
        # most similar kept match wins; ties go to the smallest id
        for cid in sorted(index.candidates(sig)):
            if cid >= doc.id or cid not in kept_ids:
                continue
            sim = sig.similarity(by_id[cid])
            if sim >= threshold and (best is None or sim > best[0]):
                best = (sim, cid)
        if best is None:
            kept_ids.add(doc.id)
            result.kept.append(doc)
            continue
        sim, kept_id = best
        outcome = FilterOutcome.drop(Reason.NEAR_DUPLICATE_DOC, f"{kept_id}:{sim:.4f}")
        result.dropped.append((doc, outcome))
        result.outcomes[doc.id] = outcome
        result.report.append({"dropped_id": doc.id, "kept_id": kept_id, "estimated_similarity": sim})
    return result

