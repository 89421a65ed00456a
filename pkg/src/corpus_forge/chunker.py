"""Greedy sentence-aligned chunking of long document-derived texts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from .model import Document, FilterOutcome, KEEP, PipelineConfig, Reason, SourceKind
from .sentences import sentence_pieces


@dataclass(frozen=True)
class Chunk:
    parent_id: str
    index: int
    text: str
    word_count: int
    oversized: bool = False

    @property
    def id(self) -> str:
        return f"{self.parent_id}#{self.index}"


def chunk_text(text: str, max_words: int) -> List[Tuple[str, int, bool]]:
    """Pack whole sentences into ``(text, words, oversized)`` chunks.

    Each chunk carries its sentences' trailing separators (and the first chunk
    the leading whitespace), so joining chunk texts gives back ``text``.
    """
    prefix, pieces = sentence_pieces(text)
    chunks: List[Tuple[str, int, bool]] = []
    buf: List[str] = [prefix]
    words = 0
    for sentence, sep in pieces:
        n = len(sentence.split())
        if words and words + n > max_words:
            chunks.append(("".join(buf), words, False))
            buf, words = [], 0
        if not words and n > max_words:
            # a single sentence over budget is never split mid-sentence
            chunks.append(("".join(buf) + sentence + sep, n, True))
            buf = []
            continue
        buf.append(sentence + sep)
        words += n
    if words or not chunks:
        chunks.append(("".join(buf), words, False))
    elif buf and "".join(buf):
        # trailing whitespace-only remainder belongs to the last chunk
        t, w, o = chunks[-1]
        chunks[-1] = (t + "".join(buf), w, o)
    return chunks


def chunk_document(doc: Document, config: PipelineConfig) -> List[Chunk]:
    """Split a document into chunks of at most ``config.chunk_max_words`` words.

    Only ``source_kind=document`` records are chunked; everything else comes
    back as a single chunk equal to the input.
    """
    if doc.source_kind is not SourceKind.DOCUMENT:
        return [Chunk(doc.id, 0, doc.text, doc.words)]
    return [
        Chunk(doc.id, i, text, words, oversized)
        for i, (text, words, oversized) in enumerate(chunk_text(doc.text, config.chunk_max_words))
    ]


def chunk_to_documents(doc: Document, config: PipelineConfig) -> Tuple[List[Document], FilterOutcome]:
    chunks = chunk_document(doc, config)
    if len(chunks) == 1 and not chunks[0].oversized:
        return [doc], KEEP
    out = []
    for c in chunks:
        meta = {**doc.meta, "parent_id": doc.id, "chunk_index": c.index}
        if c.oversized:
            meta["oversized_sentence"] = True
        out.append(doc.replace(id=c.id, text=c.text, meta=meta))
    return out, FilterOutcome.transformed(Reason.CHUNKED, f"chunks={len(chunks)}")
