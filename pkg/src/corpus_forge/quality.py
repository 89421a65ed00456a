"""C4-style line filters and Gopher-style document repetition filters."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import List, Tuple

from .model import Document, FilterOutcome, KEEP, PipelineConfig, Reason

TERMINAL_MARKS = frozenset(".!?…")
# closers allowed after a terminal mark; Macedonian quotes close with “
TERMINAL_CLOSERS = frozenset('"»“”‘’\')')
BULLETS = ("•", "‣", "▪", "-", "–", "*")
ELLIPSES = ("…", "...")


def ends_with_terminal(line: str) -> bool:
    s = line.rstrip()
    while s and s[-1] in TERMINAL_CLOSERS:
        s = s[:-1]
    return bool(s) and s[-1] in TERMINAL_MARKS


def starts_with_bullet(line: str) -> bool:
    return line.lstrip().startswith(BULLETS)


def ends_with_ellipsis(line: str) -> bool:
    return line.rstrip().endswith(ELLIPSES)


@dataclass(frozen=True)
class LineStats:
    text: str
    word_count: int
    ends_terminal: bool
    starts_bullet: bool
    ends_ellipsis: bool

    @classmethod
    def of(cls, line: str) -> "LineStats":
        return cls(
            text=line,
            word_count=len(line.split()),
            ends_terminal=ends_with_terminal(line),
            starts_bullet=starts_with_bullet(line),
            ends_ellipsis=ends_with_ellipsis(line),
        )


@dataclass(frozen=True)
class DocRatios:
    bullet_line_ratio: float
    ellipsis_line_ratio: float
    line_count: int

    @classmethod
    def of(cls, text: str) -> "DocRatios":
        lines = content_lines(text)
        n = len(lines)
        if n == 0:
            return cls(0.0, 0.0, 0)
        bullets = sum(starts_with_bullet(l) for l in lines)
        ellipses = sum(ends_with_ellipsis(l) for l in lines)
        return cls(bullets / n, ellipses / n, n)


def content_lines(text: str) -> List[str]:
    """Non-blank lines; blank lines do not count towards line ratios."""
    return [l for l in text.split("\n") if l.strip()]


def c4_line_filter(doc: Document, config: PipelineConfig) -> Tuple[Document, FilterOutcome]:
    kept = []
    too_short = no_punct = 0
    for line in doc.text.split("\n"):
        stats = LineStats.of(line)
        if stats.word_count < config.min_line_words:
            too_short += 1
        elif not stats.ends_terminal:
            no_punct += 1
        else:
            kept.append(line)
    if not kept:
        return doc, FilterOutcome.drop(Reason.EMPTY_AFTER_C4)
    if not too_short and not no_punct:
        return doc, KEEP
    reason = Reason.TOO_FEW_WORDS_LINE if too_short >= no_punct else Reason.NO_TERMINAL_PUNCT
    detail = f"{Reason.TOO_FEW_WORDS_LINE.value}={too_short},{Reason.NO_TERMINAL_PUNCT.value}={no_punct}"
    return doc.replace(text="\n".join(kept)), FilterOutcome.transformed(reason, detail)


def duplicate_line_fraction(lines: List[str]) -> float:
    if not lines:
        return 0.0
    counts = Counter(l.strip() for l in lines)
    return sum(c for c in counts.values() if c > 1) / len(lines)


def top_2gram_fraction(text: str) -> float:
    """Share of characters covered by the most frequent word bigram."""
    words = text.split()
    if len(words) < 2:
        return 0.0
    grams = Counter(zip(words, words[1:]))
    (a, b), count = grams.most_common(1)[0]
    total = sum(len(w) for w in words)
    return min(1.0, count * (len(a) + len(b)) / total)


def gopher_doc_filter(doc: Document, config: PipelineConfig) -> FilterOutcome:
    ratios = DocRatios.of(doc.text)
    if ratios.bullet_line_ratio > config.bullet_ratio_max:
        return FilterOutcome.drop(Reason.BULLET_RATIO, f"{ratios.bullet_line_ratio:.4f}")
    if ratios.ellipsis_line_ratio > config.ellipsis_ratio_max:
        return FilterOutcome.drop(Reason.ELLIPSIS_RATIO, f"{ratios.ellipsis_line_ratio:.4f}")
    if config.duplicate_line_fraction_max is not None:
        frac = duplicate_line_fraction(content_lines(doc.text))
        if frac > config.duplicate_line_fraction_max:
            return FilterOutcome.drop(Reason.DUPLICATE_LINE_FRACTION, f"{frac:.4f}")
    if config.top_2gram_fraction_max is not None:
        frac = top_2gram_fraction(doc.text)
        if frac > config.top_2gram_fraction_max:
            return FilterOutcome.drop(Reason.TOP_2GRAM_FRACTION, f"{frac:.4f}")
    return KEEP
