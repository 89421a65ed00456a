"""Deterministic synthetic corpora with known violations of every filter rule.

Used by the test-suite, the demos and the throughput measurement. Text is
built from the vocabulary of the bundled language-ID samples.
"""

from __future__ import annotations

import random
import re
from importlib import resources
from typing import Dict, List, Optional

from .model import Document, SourceKind

# long document-kind texts appear on a fixed schedule so small fixtures get one too
LONG_DOC_EVERY = 150
LONG_DOC_OFFSET = 20

BOILERPLATE = "Сите права се задржани од страна на издавачот и авторите."

_WORD = re.compile(r"[^\W\d_]+(?:-[^\W\d_]+)?")


def vocabulary(lang: str) -> List[str]:
    text = (resources.files("corpus_forge") / "langid_data" / f"{lang}.txt").read_text(encoding="utf-8")
    return sorted({w.lower() for w in _WORD.findall(text)})


class CorpusGenerator:
    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)
        self.vocab: Dict[str, List[str]] = {lang: vocabulary(lang) for lang in ("mk", "sr", "bg", "ru", "en")}

    def sentence(self, lang: str = "mk", lo: int = 6, hi: int = 14, end: str = ".") -> str:
        words = self.rng.choices(self.vocab[lang], k=self.rng.randint(lo, hi))
        words[0] = words[0].capitalize()
        return " ".join(words) + end

    def paragraph(self, lang: str = "mk", sentences: int = 3) -> str:
        return " ".join(self.sentence(lang) for _ in range(sentences))

    def web_doc(self, lang: str = "mk", lines: Optional[int] = None) -> str:
        rng = self.rng
        out = []
        for _ in range(lines or rng.randint(4, 20)):
            r = rng.random()
            if r < 0.08:
                out.append(" ".join(rng.choices(self.vocab[lang], k=2)))  # too few words
            elif r < 0.15:
                out.append(self.sentence(lang, end=""))  # no terminal punctuation
            else:
                out.append(self.paragraph(lang, rng.randint(1, 3)))
        if rng.random() < 0.3:
            out.append(BOILERPLATE)
        return "\n".join(out)

    def bullet_doc(self) -> str:
        lines = [f"• {self.sentence()}" for _ in range(19)]
        lines.insert(self.rng.randint(0, 19), "Ова е вовед во листата на производи.")
        # 19 of 20 bullet lines: 95 %
        return "\n".join(lines)

    def ellipsis_doc(self) -> str:
        lines = [self.sentence() for _ in range(6)] + [self.sentence(end="...") for _ in range(4)]
        self.rng.shuffle(lines)
        return "\n".join(lines)

    def pii_doc(self) -> str:
        user = "".join(self.rng.choices("abcdefghijklmnopqrstuvwxyz", k=6))
        extras = [
            f"За повеќе информации пишете на {user}@primer.mk или јавете се.",
            f"Телефон за контакт е +389 70 {self.rng.randint(100, 999)} {self.rng.randint(100, 999)} секој работен ден.",
            f"Серверот е достапен на адреса 192.168.{self.rng.randint(0, 255)}.{self.rng.randint(1, 254)} во локалната мрежа.",
        ]
        return self.web_doc() + "\n" + "\n".join(extras)

    def long_document(self, words: int) -> str:
        paras, n = [], 0
        while n < words:
            p = self.paragraph("mk", self.rng.randint(3, 8))
            paras.append(p)
            n += len(p.split())
        return "\n".join(paras)

    def near_copy(self, text: str, edit_fraction: float = 0.02) -> str:
        """Replace ``edit_fraction`` of the words and swap sentence-final periods
        for exclamation marks, so no sentence survives verbatim."""
        text = re.sub(r"\.(?=\s|$)", "!", text)
        lines = text.split("\n")
        words = [l.split(" ") for l in lines]
        flat = [(i, j) for i, ws in enumerate(words) for j in range(len(ws))]
        for i, j in self.rng.sample(flat, max(1, int(len(flat) * edit_fraction))):
            w = words[i][j]
            tail = w[-1] if w and w[-1] in ".!?" else ""
            words[i][j] = self.rng.choice(self.vocab["mk"]) + tail
        return "\n".join(" ".join(ws) for ws in words)


def generate_corpus(target_bytes: int = 1_000_000, seed: int = 0) -> List[Document]:
    """A mixed corpus of roughly ``target_bytes`` UTF-8 bytes.

    Mix: ordinary web documents (with short and unpunctuated lines and shared
    boilerplate), bullet-heavy and ellipsis-heavy documents, other-language
    documents, PII-bearing documents, exact and near duplicates, and long
    document-kind texts that need chunking.
    """
    gen = CorpusGenerator(seed)
    rng = gen.rng
    docs: List[Document] = []
    size = 0
    i = 0
    web_texts: List[str] = []
    sources = ("hplt2", "fineweb2", "macocu")
    while size < target_bytes:
        r = rng.random()
        kind = SourceKind.WEB
        source = sources[i % 3]
        if i % LONG_DOC_EVERY == LONG_DOC_OFFSET:
            text = gen.long_document(rng.randint(4500, 9000))
            kind, source = SourceKind.DOCUMENT, "documents"
        elif r < 0.04:
            text = gen.bullet_doc()
        elif r < 0.08:
            text = gen.ellipsis_doc()
        elif r < 0.14:
            text = gen.web_doc(rng.choice(["sr", "bg", "ru", "en"]))
        elif r < 0.20:
            text = gen.pii_doc()
        elif r < 0.25 and web_texts:
            text = gen.near_copy(rng.choice(web_texts))
        elif r < 0.28 and web_texts:
            text = rng.choice(web_texts)
        elif r < 0.30:
            text = gen.web_doc(lines=rng.randint(3, 8))
            kind, source = SourceKind.WIKI, "wikipedia"
        else:
            text = gen.web_doc()
            web_texts.append(text)
        docs.append(Document.create(f"{source}-{i:07d}", source, text, source_kind=kind, meta={"synthetic": True}))
        size += len(text.encode("utf-8"))
        i += 1
    return docs
