"""Funnel accounting per stage and the source/word distribution table."""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Union

from .model import Document, FilterOutcome, word_count

FORMATS = ("markdown", "json", "csv")


@dataclass
class StageStats:
    stage: str
    docs_in: int = 0
    docs_out: int = 0
    words_in: int = 0
    words_out: int = 0
    drop_reasons: Dict[str, int] = field(default_factory=dict)
    # records emitted; exceeds docs_out only when a stage splits documents
    records_out: Optional[int] = None

    @property
    def dropped(self) -> int:
        return self.docs_in - self.docs_out

    def merge(self, other: "StageStats") -> "StageStats":
        if other.stage != self.stage:
            raise ValueError(f"cannot merge {other.stage!r} into {self.stage!r}")
        reasons = Counter(self.drop_reasons)
        reasons.update(other.drop_reasons)
        records = None
        if self.records_out is not None or other.records_out is not None:
            records = (self.records_out if self.records_out is not None else self.docs_out) + (
                other.records_out if other.records_out is not None else other.docs_out
            )
        return StageStats(
            self.stage,
            self.docs_in + other.docs_in,
            self.docs_out + other.docs_out,
            self.words_in + other.words_in,
            self.words_out + other.words_out,
            dict(sorted(reasons.items())),
            records,
        )


@dataclass
class SourceStats:
    source: str
    words_in: int = 0
    words_out: int = 0


@dataclass
class FunnelReport:
    stages: List[StageStats] = field(default_factory=list)
    sources: List[SourceStats] = field(default_factory=list)

    @property
    def total_dropped(self) -> int:
        return sum(s.dropped for s in self.stages)

    def to_dict(self) -> dict:
        return {
            "stages": [asdict(s) for s in self.stages],
            "sources": [asdict(s) for s in self.sources],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "FunnelReport":
        return cls(
            stages=[StageStats(**s) for s in d.get("stages", [])],
            sources=[SourceStats(**s) for s in d.get("sources", [])],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "FunnelReport":
        return cls.from_dict(json.loads(text))


def tally(
    before: Iterable[Document],
    after: Iterable[Document],
    stage: str,
    outcomes: Union[Iterable[FilterOutcome], Mapping[str, int]] = (),
) -> StageStats:
    """Exact document/word counts for one stage.

    ``outcomes`` is either the stage's filter outcomes (drops are counted by
    reason) or a ready reason histogram.
    """
    before, after = list(before), list(after)
    if isinstance(outcomes, Mapping):
        reasons = Counter(outcomes)
    else:
        reasons = Counter(o.reason.value for o in outcomes if o.dropped)
    stats = StageStats(
        stage,
        docs_in=len(before),
        docs_out=len(after),
        words_in=sum(word_count(d.text) for d in before),
        words_out=sum(word_count(d.text) for d in after),
        drop_reasons=dict(sorted(reasons.items())),
    )
    if sum(reasons.values()) != stats.dropped:
        raise ValueError(f"stage {stage}: {stats.dropped} dropped but {sum(reasons.values())} drop reasons")
    return stats


def source_distribution(before: Iterable[Document], after: Iterable[Document] = ()) -> List[SourceStats]:
    words_in: Counter = Counter()
    words_out: Counter = Counter()
    for d in before:
        words_in[d.source] += word_count(d.text)
    for d in after:
        words_out[d.source] += word_count(d.text)
    return [SourceStats(s, words_in[s], words_out[s]) for s in sorted(set(words_in) | set(words_out))]


def source_rows(report: FunnelReport, basis: str = "out") -> List[dict]:
    """Source | Words | Percentage rows, descending by words, plus a Total row."""
    if basis not in ("in", "out"):
        raise ValueError(f"basis must be 'in' or 'out', got {basis!r}")
    counts = [(s.source, s.words_out if basis == "out" else s.words_in) for s in report.sources]
    counts.sort(key=lambda sw: (-sw[1], sw[0]))
    total = sum(w for _, w in counts)
    rows = [
        {"source": src, "words": w, "percentage": f"{100.0 * w / total:.2f}%" if total else "0.00%"}
        for src, w in counts
    ]
    rows.append({"source": "Total", "words": total, "percentage": "100.00%" if total else "0.00%"})
    return rows


def render_table(report: FunnelReport, format: str = "markdown", basis: str = "out") -> str:
    if format not in FORMATS:
        raise ValueError(f"unknown report format {format!r}; expected one of {FORMATS}")
    if format == "json":
        return report.to_json()
    rows = source_rows(report, basis)
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["Source", "Words", "Percentage"])
        for r in rows:
            writer.writerow([r["source"], r["words"], r["percentage"]])
        return buf.getvalue()
    lines = ["| Source | Words | Percentage |", "|---|---:|---:|"]
    for r in rows:
        if r["source"] == "Total":
            lines.append(f"| **Total** | **{r['words']}** | **{r['percentage']}** |")
        else:
            lines.append(f"| {r['source']} | {r['words']} | {r['percentage']} |")
    return "\n".join(lines) + "\n"


def render_funnel(report: FunnelReport) -> str:
    lines = [
        "| Stage | Docs in | Docs out | Words in | Words out | Drops |",
        "|---|---:|---:|---:|---:|---|",
    ]
    for s in report.stages:
        drops = ", ".join(f"{k}={v}" for k, v in s.drop_reasons.items()) or "-"
        lines.append(f"| {s.stage} | {s.docs_in} | {s.docs_out} | {s.words_in} | {s.words_out} | {drops} |")
    return "\n".join(lines) + "\n"
