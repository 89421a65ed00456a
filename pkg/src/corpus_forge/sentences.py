"""Sentence splitting that preserves the exact separators between sentences."""

from __future__ import annotations

import re
from typing import List, Tuple

from .quality import ends_with_terminal

# lowercase, including the trailing period
ABBREVIATIONS = frozenset(
    {
        "д-р.", "м-р.", "проф.", "доц.", "инж.", "акад.", "г-дин.", "г-ѓа.", "г-ца.",
        "ул.", "бр.", "стр.", "год.", "г.", "в.", "св.", "сп.", "т.е.", "т.н.", "т.с.",
        "англ.", "мак.", "лат.", "сл.", "пр.", "гл.", "чл.", "ст.", "др.", "итн.", "и.т.н.",
        "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "no.", "vs.", "e.g.", "i.e.", "etc.",
    }
)
# "итн." / "etc." usually close a sentence, so they are not treated as exceptions
SENTENCE_CLOSING_ABBREVIATIONS = frozenset({"итн.", "и.т.н.", "etc."})

_WS = re.compile(r"\s+")
_OPENERS = "\"'«„“‘(["


def _is_abbreviation(token: str) -> bool:
    token = token.lstrip(_OPENERS).lower()
    if token in SENTENCE_CLOSING_ABBREVIATIONS:
        return False
    if token in ABBREVIATIONS:
        return True
    # single-letter initials such as "А." in "А. Иванов"
    return len(token) == 2 and token[1] == "." and token[0].isalpha()


def sentence_pieces(text: str) -> Tuple[str, List[Tuple[str, str]]]:
    """Split into ``(prefix, [(sentence, trailing_separator), ...])``.

    ``prefix + "".join(s + sep for s, sep in pieces) == text`` always holds.
    A whitespace run is a boundary if it contains a newline, or if the text
    before it ends in terminal punctuation that is not an abbreviation.
    """
    pieces: List[Tuple[str, str]] = []
    m = re.match(r"\s*", text)
    prefix = m.group()
    start = m.end()
    for ws in _WS.finditer(text, start):
        if ws.start() == start:
            continue
        before = text[start : ws.start()]
        boundary = "\n" in ws.group()
        if not boundary and ends_with_terminal(before):
            token = before.rsplit(None, 1)[-1]
            boundary = not _is_abbreviation(token)
        if boundary:
            pieces.append((before, ws.group()))
            start = ws.end()
    if start < len(text):
        tail = text[start:]
        body = tail.rstrip()
        pieces.append((body, tail[len(body):]))
    return prefix, pieces


def split_sentences(text: str) -> List[str]:
    return [s for s, _ in sentence_pieces(text)[1]]
