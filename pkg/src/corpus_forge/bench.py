"""Placeholder-preserving translation of multiple-choice benchmark items.

The question stem is translated as a full sentence with a placeholder where
the answer goes; the placeholder is removed afterwards and each choice is
appended to form the candidate continuations.
"""

from __future__ import annotations

import json
import logging
import re
import shlex
import subprocess
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence

log = logging.getLogger(__name__)

PLACEHOLDER = "⟦X⟧"
PLACEHOLDER_LOST = "PlaceholderLost"

Translator = Callable[[str], str]


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class McqItem:
    id: str
    stem: str
    choices: Sequence[str]
    answer_index: int

    def __post_init__(self):
        object.__setattr__(self, "choices", tuple(self.choices))
        if not self.choices:
            raise ValueError(f"{self.id}: no choices")
        if not 0 <= self.answer_index < len(self.choices):
            raise ValueError(f"{self.id}: answer_index {self.answer_index} out of range")

    def to_dict(self) -> dict:
        return {"id": self.id, "stem": self.stem, "choices": list(self.choices), "answer_index": self.answer_index}

    @classmethod
    def from_dict(cls, d: dict) -> "McqItem":
        return cls(str(d["id"]), d["stem"], d["choices"], int(d["answer_index"]))


@dataclass(frozen=True)
class TemplatedItem:
    template: str
    placeholder: str = PLACEHOLDER
    flag: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.flag != PLACEHOLDER_LOST


def _tolerant_pattern(placeholder: str) -> re.Pattern:
    # allow whitespace between any two characters of the placeholder
    return re.compile(r"\s*".join(re.escape(c) for c in placeholder))


def make_template(item: McqItem, placeholder: str = PLACEHOLDER, slot: Optional[str] = None) -> TemplatedItem:
    """Append the placeholder to the stem (or substitute it for ``slot``)."""
    stem = item.stem
    if placeholder in stem:
        raise TemplateError(f"{item.id}: stem already contains {placeholder!r}")
    if slot is not None:
        if stem.count(slot) != 1:
            raise TemplateError(f"{item.id}: slot {slot!r} must occur exactly once")
        return TemplatedItem(stem.replace(slot, placeholder), placeholder)
    return TemplatedItem(f"{stem} {placeholder}" if stem else placeholder, placeholder)


def translate_template(t: TemplatedItem, translator: Translator) -> TemplatedItem:
    out = translator(t.template)
    if out.count(t.placeholder) == 1:
        return TemplatedItem(out, t.placeholder)
    matches = list(_tolerant_pattern(t.placeholder).finditer(out))
    if len(matches) == 1:
        m = matches[0]
        log.info("recovered mangled placeholder %r", m.group())
        return TemplatedItem(out[: m.start()] + t.placeholder + out[m.end() :], t.placeholder, "PlaceholderRecovered")
    return TemplatedItem(out, t.placeholder, PLACEHOLDER_LOST)


def strip_placeholder(t: TemplatedItem) -> str:
    """Remove the placeholder and one adjacent space (the preceding one if any)."""
    n = t.template.count(t.placeholder)
    if n != 1:
        raise TemplateError(f"placeholder {t.placeholder!r} occurs {n} times, expected 1")
    before, _, after = t.template.partition(t.placeholder)
    if before.endswith(" "):
        before = before[:-1]
    elif after.startswith(" "):
        after = after[1:]
    return before + after


def expand_choices(stem: str, choices: Sequence[str]) -> List[str]:
    return [f"{stem} {c}" if stem else c for c in choices]


class ReviewQueue:
    """Collects items whose placeholder did not survive translation.

    With a ``path``, entries are also appended to that JSONL file.
    """

    def __init__(self, path: Optional[Path] = None):
        self.path = Path(path) if path is not None else None
        self.entries: List[dict] = []
        self._lock = threading.Lock()

    def add(self, item: McqItem, translated: str, flag: str = PLACEHOLDER_LOST) -> None:
        entry = {**item.to_dict(), "translated_template": translated, "flag": flag}
        with self._lock:
            self.entries.append(entry)
            if self.path is not None:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(entry, ensure_ascii=False) + "\n")

    def __len__(self) -> int:
        return len(self.entries)


def translate_item(
    item: McqItem,
    translator: Translator,
    review: ReviewQueue,
    placeholder: str = PLACEHOLDER,
    translate_choices: bool = True,
) -> Optional[McqItem]:
    """Full workflow for one item; returns ``None`` if routed to review.

    Choices are translated one by one, never reordered, so ``answer_index``
    is carried over unchanged.
    """
    translated = translate_template(make_template(item, placeholder), translator)
    if not translated.ok:
        review.add(item, translated.template)
        return None
    stem = strip_placeholder(translated)
    choices = [translator(c) for c in item.choices] if translate_choices else list(item.choices)
    if any(placeholder in c for c in choices):
        review.add(item, translated.template, "PlaceholderInChoice")
        return None
    return McqItem(item.id, stem, choices, item.answer_index)


def identity_translator(text: str) -> str:
    return text


@dataclass
class CommandTranslator:
    """Runs an external command per string: text on stdin, translation on stdout."""

    command: str
    timeout: float = 60.0
    argv: List[str] = field(init=False)

    def __post_init__(self):
        self.argv = shlex.split(self.command)

    def __call__(self, text: str) -> str:
        proc = subprocess.run(
            self.argv, input=text, capture_output=True, text=True, encoding="utf-8", timeout=self.timeout, check=True
        )
        return proc.stdout.rstrip("\n")


def load_translator(spec: str) -> Translator:
    """``identity`` or ``command:<shell words>``."""
    if spec == "identity":
        return identity_translator
    if spec.startswith("command:"):
        return CommandTranslator(spec[len("command:"):])
    raise ValueError(f"unknown translator {spec!r}; use 'identity' or 'command:<cmd>'")
