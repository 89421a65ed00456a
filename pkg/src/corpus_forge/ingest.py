"""JSONL / plain-text corpus readers and the deterministic JSONL writer."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Callable, Iterable, Iterator, List, Optional, Union

from .model import Document, SourceKind, normalize_text

PathLike = Union[str, os.PathLike]


class IngestError(RuntimeError):
    pass


class CorpusStream:
    """Lazy, re-iterable sequence of documents.

    Errors hit while reading (malformed lines, undecodable files) are appended
    to ``errors`` as ``{"path", "line", "error"}`` dicts; each fresh iteration
    clears them first.
    """

    def __init__(self, factory: Callable[["CorpusStream"], Iterator[Document]], origins=(), format="jsonl"):
        self._factory = factory
        self.origins = [str(p) for p in origins]
        self.format = format
        self.errors: List[dict] = []

    def __iter__(self) -> Iterator[Document]:
        self.errors = []
        return self._factory(self)

    @classmethod
    def from_documents(cls, docs: Iterable[Document]) -> "CorpusStream":
        docs = list(docs)
        return cls(lambda _s: iter(docs), format="memory")

    def write_sidecar(self, path: PathLike) -> int:
        with open(path, "w", encoding="utf-8") as fh:
            for err in self.errors:
                fh.write(json.dumps(err, ensure_ascii=False) + "\n")
        return len(self.errors)


def read_jsonl(path: PathLike, strict: bool = False, source: Optional[str] = None) -> CorpusStream:
    """Read documents from a JSONL file, in file order.

    Records without an ``id`` get ``"<filename>:<line-number>"`` (1-based).
    Malformed lines are recorded on the stream's ``errors`` and skipped, or
    raise :class:`IngestError` when ``strict``.
    """
    path = Path(path)

    def generate(stream: CorpusStream) -> Iterator[Document]:
        with open(path, "r", encoding="utf-8", errors="strict", newline="\n") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                    if not isinstance(record, dict):
                        raise ValueError("line is not a JSON object")
                    if not isinstance(record.get("text"), str):
                        raise ValueError("missing or non-string 'text'")
                    record.setdefault("id", f"{path.name}:{lineno}")
                    if source is not None:
                        record.setdefault("source", source)
                    doc = Document.from_dict(record)
                    doc = doc.replace(text=normalize_text(doc.text))
                except (ValueError, KeyError, TypeError) as exc:
                    if strict:
                        raise IngestError(f"{path}:{lineno}: {exc}") from exc
                    stream.errors.append({"path": str(path), "line": lineno, "error": str(exc)})
                    continue
                yield doc

    return CorpusStream(generate, origins=[path], format="jsonl")


def read_text_dir(path: PathLike, source: str, strict: bool = False) -> CorpusStream:
    """One ``source_kind=document`` record per regular file, in sorted path order."""
    root = Path(path)

    def generate(stream: CorpusStream) -> Iterator[Document]:
        files = sorted(p for p in root.rglob("*") if p.is_file())
        for file in files:
            rel = file.relative_to(root).as_posix()
            try:
                text = file.read_bytes().decode("utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                if strict:
                    raise IngestError(f"{file}: {exc}") from exc
                stream.errors.append({"path": str(file), "line": None, "error": str(exc)})
                continue
            yield Document.create(
                id=f"{source}:{rel}",
                source=source,
                text=text,
                source_kind=SourceKind.DOCUMENT,
                meta={"path": rel},
            )

    return CorpusStream(generate, origins=[root], format="text-dir")


def dumps_document(doc: Document) -> str:
    return json.dumps(doc.to_dict(), ensure_ascii=False, separators=(", ", ": "))


def write_jsonl(stream: Iterable[Document], path: PathLike) -> int:
    """Write documents sorted by ascending id. Returns the document count."""
    docs = sorted(stream, key=lambda d: d.id)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in docs:
            fh.write(dumps_document(doc))
            fh.write("\n")
    return len(docs)


def write_records(records: Iterable[dict], path: PathLike) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
            n += 1
    return n


def read_records(path: PathLike) -> Iterator[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield json.loads(line)
