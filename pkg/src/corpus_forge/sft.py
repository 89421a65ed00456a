"""Instruction-tuning mix assembly: weighted pool sampling, token-length
profiling with a cutoff, and plain-text chat serialization."""

from __future__ import annotations

import bisect
import logging
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

log = logging.getLogger(__name__)

ROLES = ("system", "user", "assistant")
TOKENS_PER_WORD = 1.4
DEFAULT_MAX_TOKENS = 4096
DEFAULT_RATIO = (2, 1)

TokenCounter = Callable[[str], int]


def estimate_tokens(text: str) -> int:
    """Whitespace words x 1.4, rounded up."""
    return math.ceil(len(text.split()) * TOKENS_PER_WORD)


def default_system_prompt() -> str:
    return (resources.files("corpus_forge") / "system_prompt_mk.txt").read_text(encoding="utf-8").strip()


@dataclass(frozen=True)
class Turn:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")


@dataclass(frozen=True)
class SftRecord:
    id: str
    source: str
    favored: bool
    turns: Tuple[Turn, ...]
    token_estimate: int = 0

    def __post_init__(self):
        object.__setattr__(self, "turns", tuple(self.turns))
        validate_turns(self.turns)

    @property
    def words(self) -> int:
        return sum(len(t.content.split()) for t in self.turns)

    @classmethod
    def build(cls, id: str, source: str, favored: bool, turns: Iterable, counter: TokenCounter = estimate_tokens):
        turns = tuple(t if isinstance(t, Turn) else Turn(t["role"], t["content"]) for t in turns)
        return cls(id, source, favored, turns, sum(counter(t.content) for t in turns))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "favored": self.favored,
            "turns": [{"role": t.role, "content": t.content} for t in self.turns],
            "token_estimate": self.token_estimate,
        }

    @classmethod
    def from_dict(cls, d: dict, counter: TokenCounter = estimate_tokens) -> "SftRecord":
        # token_estimate is always recomputed with the active counter
        return cls.build(d["id"], d.get("source", "unknown"), bool(d.get("favored", False)), d["turns"], counter)


def validate_turns(turns: Sequence[Turn]) -> None:
    """Optional leading system turn, then strictly alternating user/assistant."""
    body = turns[1:] if turns and turns[0].role == "system" else turns
    if not body:
        raise ValueError("record has no user/assistant turns")
    for i, t in enumerate(body):
        expected = "user" if i % 2 == 0 else "assistant"
        if t.role != expected:
            raise ValueError(f"turn {i}: expected {expected}, got {t.role}")
    if body[-1].role != "assistant":
        raise ValueError("record must end with an assistant turn")


# -- sampling ---------------------------------------------------------------


@dataclass
class MixResult:
    records: List[SftRecord]
    favored_draws: int
    recycled: Dict[str, int] = field(default_factory=dict)


class _Pool:
    def __init__(self, name: str, records: Sequence[SftRecord], rng: np.random.Generator):
        self.name = name
        self.records = list(records)
        self.rng = rng
        self.order: List[int] = []
        self.cycles = 0

    def draw(self) -> SftRecord:
        if not self.order:
            if self.cycles:
                log.info("pool %s exhausted; recycling (cycle %d)", self.name, self.cycles + 1)
            self.order = self.rng.permutation(len(self.records)).tolist()[::-1]
            self.cycles += 1
        return self.records[self.order.pop()]


def parse_ratio(text: str) -> Tuple[float, float]:
    a, sep, b = text.partition(":")
    if not sep:
        raise ValueError(f"ratio must look like '2:1', got {text!r}")
    fa, fb = float(a), float(b)
    if fa < 0 or fb < 0 or fa + fb == 0:
        raise ValueError(f"invalid ratio {text!r}")
    return fa, fb


def sample_mix(
    sources: Sequence[Sequence[SftRecord]],
    ratio: Tuple[float, float] = DEFAULT_RATIO,
    seed: int = 0,
    target_count: Optional[int] = None,
    mode: str = "records",
) -> MixResult:
    """Draw ``target_count`` records, choosing the favored pool with
    probability ``ratio[0] / sum(ratio)`` per draw.

    Records are pooled by their ``favored`` flag. Within a pool, draws are
    uniform without replacement; an exhausted pool is reshuffled and reused
    (counted in ``MixResult.recycled``). In ``mode="words"`` the draw
    probability is adjusted so the expected *word* shares follow the ratio.
    """
    if mode not in ("records", "words"):
        raise ValueError(f"unknown mode {mode!r}")
    favored = [r for src in sources for r in src if r.favored]
    translated = [r for src in sources for r in src if not r.favored]
    a, b = ratio
    if a > 0 and not favored:
        raise ValueError("favored pool is empty")
    if b > 0 and not translated:
        raise ValueError("translated pool is empty")
    if target_count is None:
        target_count = len(favored) + len(translated)

    p_favored = a / (a + b)
    if mode == "words" and 0 < p_favored < 1:
        wf = sum(r.words for r in favored) / len(favored)
        wt = sum(r.words for r in translated) / len(translated)
        if wf > 0 and wt > 0:
            p_favored = a * wt / (a * wt + b * wf)

    rng = np.random.default_rng(seed)
    choose = rng.random(target_count) < p_favored
    pools = {
        True: _Pool("favored", favored, np.random.default_rng([seed, 1])),
        False: _Pool("translated", translated, np.random.default_rng([seed, 2])),
    }
    records = [pools[bool(c)].draw() for c in choose]
    recycled = {p.name: p.cycles - 1 for p in pools.values() if p.cycles > 1}
    return MixResult(records, int(choose.sum()), recycled)


# -- length profile -----------------------------------------------------------


@dataclass(frozen=True)
class LengthProfile:
    lengths: Tuple[int, ...]
    cutoff: int
    coverage_at_cutoff: float

    def coverage(self, cutoff: int) -> float:
        """Empirical CDF: share of records with length <= cutoff."""
        if not self.lengths:
            return 0.0
        return bisect.bisect_right(self.lengths, cutoff) / len(self.lengths)

    def quantile_cutoff(self, coverage: float) -> int:
        """Smallest observed length whose coverage reaches ``coverage``."""
        if not self.lengths:
            raise ValueError("empty profile")
        idx = max(0, math.ceil(coverage * len(self.lengths)) - 1)
        return self.lengths[min(idx, len(self.lengths) - 1)]


def record_tokens(record: SftRecord, counter: TokenCounter = estimate_tokens) -> int:
    return sum(counter(t.content) for t in record.turns)


def length_profile(records: Iterable[SftRecord], counter: TokenCounter = estimate_tokens, cutoff: int = DEFAULT_MAX_TOKENS) -> LengthProfile:
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    lengths = tuple(sorted(record_tokens(r, counter) for r in records))
    profile = LengthProfile(lengths, cutoff, 0.0)
    return LengthProfile(lengths, cutoff, profile.coverage(cutoff))


# -- cutoff -------------------------------------------------------------------


@dataclass(frozen=True)
class CutoffOutcome:
    action: str  # "kept", "truncated" or "dropped"
    reason: Optional[str] = None


def apply_cutoff(
    record: SftRecord, max_tokens: int = DEFAULT_MAX_TOKENS, counter: TokenCounter = estimate_tokens
) -> Tuple[Optional[SftRecord], CutoffOutcome]:
    """Fit a record into ``max_tokens`` by dropping trailing user/assistant exchanges."""
    if max_tokens < 1:
        raise ValueError("max_tokens must be >= 1")
    costs = [counter(t.content) for t in record.turns]
    total = sum(costs)
    if total <= max_tokens:
        return record, CutoffOutcome("kept")
    head = 1 if record.turns[0].role == "system" else 0
    budget = max_tokens - sum(costs[:head])
    end = head
    used = 0
    while end + 1 < len(record.turns):
        pair = costs[end] + costs[end + 1]
        if used + pair > budget:
            break
        used += pair
        end += 2
    if end == head:
        return None, CutoffOutcome("dropped", "FirstExchangeExceedsBudget")
    turns = record.turns[:end]
    truncated = SftRecord(record.id, record.source, record.favored, turns, sum(costs[:end]))
    return truncated, CutoffOutcome("truncated", f"exchanges={(end - head) // 2}")


# -- chat format ----------------------------------------------------------------

# one marker line per turn; the body ends with END_MARKER
MARKERS = {role: f"<|{role}|>" for role in ROLES}
END_MARKER = "<|end|>"
_MARKER_LINE = re.compile(r"^<\|(system|user|assistant|end)\|>$", re.MULTILINE)


def with_system_prompt(record: SftRecord, system_prompt: str) -> SftRecord:
    if record.turns[0].role == "system":
        return record
    turns = (Turn("system", system_prompt),) + record.turns
    return SftRecord(record.id, record.source, record.favored, turns, record.token_estimate + estimate_tokens(system_prompt))


def format_chat(record: SftRecord, system_prompt: Optional[str] = None) -> str:
    """Serialize as::

        <|system|>
        ...
        <|user|>
        ...
        <|assistant|>
        ...
        <|end|>

    The system prompt is prepended unless the record already has one.
    """
    validate_turns(record.turns)
    if system_prompt is None:
        system_prompt = default_system_prompt()
    record = with_system_prompt(record, system_prompt)
    parts = []
    for t in record.turns:
        if _MARKER_LINE.search(t.content):
            raise ValueError(f"{record.id}: turn content contains a role marker line")
        parts.append(f"{MARKERS[t.role]}\n{t.content}\n")
    parts.append(END_MARKER + "\n")
    return "".join(parts)


def parse_chat(text: str) -> List[Turn]:
    """Inverse of :func:`format_chat` (turns only)."""
    markers = list(_MARKER_LINE.finditer(text))
    if not markers or markers[-1].group(1) != "end":
        raise ValueError("missing end marker")
    turns = []
    for m, nxt in zip(markers, markers[1:]):
        body = text[m.end() + 1 : nxt.start()]
        if not body.endswith("\n"):
            raise ValueError("turn body must end with a newline")
        turns.append(Turn(m.group(1), body[:-1]))
    validate_turns(turns)
    return turns


class Refiner:
    """Hook for model-assisted post-editing of translated records; a no-op here."""

    def refine(self, record: SftRecord) -> SftRecord:
        return record
