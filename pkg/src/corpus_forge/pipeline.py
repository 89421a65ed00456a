"""Stage orchestration for the filtering funnel.

Per-document stages run in a process pool (or inline for one worker). The
two dedup stages are barriers: they see the whole surviving corpus and keep
first occurrences by ascending id, so results do not depend on the number of
workers or on scheduling.
"""

from __future__ import annotations

import json
import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from . import chunker, dedup, langid, pii, quality
from .ingest import dumps_document
from .model import Document, FilterOutcome, PipelineConfig, validate_config, word_count
from .stats import FunnelReport, StageStats, source_distribution

log = logging.getLogger(__name__)
audit = logging.getLogger("corpus_forge.audit")

DEFAULT_STAGES = ("pii", "c4", "gopher", "langid", "sentence-dedup", "chunk", "minhash-dedup")
BARRIER_STAGES = frozenset({"sentence-dedup", "minhash-dedup"})


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class StagePlan:
    stages: Tuple[str, ...] = DEFAULT_STAGES
    allow_reorder: bool = False

    def __post_init__(self):
        stages = tuple(self.stages)
        object.__setattr__(self, "stages", stages)
        unknown = [s for s in stages if s not in DEFAULT_STAGES]
        if unknown:
            raise PlanError(f"unknown stages {unknown}; known: {', '.join(DEFAULT_STAGES)}")
        if len(set(stages)) != len(stages):
            raise PlanError("a stage is listed twice")
        canonical = tuple(s for s in DEFAULT_STAGES if s in stages)
        if stages != canonical and not self.allow_reorder:
            raise PlanError(f"stage order {stages} differs from {canonical}; pass the reorder override to allow it")

    @classmethod
    def parse(cls, text: Optional[str], allow_reorder: bool = False) -> "StagePlan":
        if not text:
            return cls(allow_reorder=allow_reorder)
        return cls(tuple(s.strip() for s in text.split(",") if s.strip()), allow_reorder)

    def segments(self) -> List[Tuple[str, ...]]:
        """Group consecutive per-document stages; each barrier stage stands alone."""
        out: List[Tuple[str, ...]] = []
        run: List[str] = []
        for s in self.stages:
            if s in BARRIER_STAGES:
                if run:
                    out.append(tuple(run))
                    run = []
                out.append((s,))
            else:
                run.append(s)
        if run:
            out.append(tuple(run))
        return out


# -- per-document stage execution ----------------------------------------------

# (doc_id, stage, outcome, words_in, words_out, records_out)
StageEvent = Tuple[str, str, FilterOutcome, int, int, int]


@dataclass
class _DocStageRunner:
    stages: Tuple[str, ...]
    config: PipelineConfig
    classifier: Optional[langid.LanguageClassifier] = None
    rules: pii.PiiRuleSet = pii.DEFAULT_RULES

    def __call__(self, doc: Document) -> Tuple[List[Document], List[StageEvent]]:
        """Push one document through the stages; returns survivors and events."""
        docs = [doc]
        events: List[StageEvent] = []
        for stage in self.stages:
            nxt: List[Document] = []
            for d in docs:
                out, outcome = self._apply(stage, d)
                w_in = word_count(d.text)
                w_out = sum(word_count(o.text) for o in out)
                events.append((d.id, stage, outcome, w_in, w_out, len(out)))
                nxt.extend(out)
            docs = nxt
            if not docs:
                break
        return docs, events

    def _apply(self, stage: str, doc: Document) -> Tuple[List[Document], FilterOutcome]:
        cfg = self.config
        if stage == "pii":
            d, o = pii.scrub(doc, self.rules)
        elif stage == "c4":
            d, o = quality.c4_line_filter(doc, cfg)
        elif stage == "gopher":
            d, o = doc, quality.gopher_doc_filter(doc, cfg)
        elif stage == "langid":
            d, o = langid.gate(doc, self.classifier, cfg)
        elif stage == "chunk":
            return chunker.chunk_to_documents(doc, cfg)
        else:
            raise PlanError(f"{stage} is not a per-document stage")
        return ([] if o.dropped else [d]), o


_WORKER: Optional[_DocStageRunner] = None


def _init_worker(runner: _DocStageRunner) -> None:
    global _WORKER
    _WORKER = runner


def _run_in_worker(doc: Document):
    return _WORKER(doc)


def _call_in_worker(fn_and_arg):
    fn, arg = fn_and_arg
    return fn(arg)


# -- results ---------------------------------------------------------------------


@dataclass
class PipelineResult:
    documents: List[Document]
    report: FunnelReport
    dedup_pairs: List[dict] = field(default_factory=list)
    drops: List[dict] = field(default_factory=list)


class _StageAccumulator:
    def __init__(self, stages: Sequence[str]):
        self.stats: Dict[str, StageStats] = {s: StageStats(s) for s in stages}
        self.reasons: Dict[str, Counter] = {s: Counter() for s in stages}
        self.records: Dict[str, int] = {s: 0 for s in stages}

    def add(self, stage: str, outcome: FilterOutcome, w_in: int, w_out: int, n_out: int) -> None:
        st = self.stats[stage]
        st.docs_in += 1
        st.words_in += w_in
        st.words_out += w_out
        self.records[stage] += n_out
        if outcome.dropped:
            self.reasons[stage][outcome.reason.value] += 1
        else:
            st.docs_out += 1

    def finish(self) -> List[StageStats]:
        out = []
        for name, st in self.stats.items():
            st.drop_reasons = dict(sorted(self.reasons[name].items()))
            if self.records[name] != st.docs_out:
                st.records_out = self.records[name]
            out.append(st)
        return out


def _check_unique_ids(docs: Sequence[Document]) -> None:
    seen = set()
    for d in docs:
        if d.id in seen:
            raise ValueError(f"duplicate document id {d.id!r}")
        seen.add(d.id)


@contextmanager
def _executor(workers: int, runner: Optional[_DocStageRunner] = None):
    if workers <= 1:
        yield None
        return
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(runner,)) as pool:
        yield pool


class Pipeline:
    def __init__(
        self,
        plan: StagePlan = StagePlan(),
        config: PipelineConfig = PipelineConfig(),
        classifier: Optional[langid.LanguageClassifier] = None,
        rules: pii.PiiRuleSet = pii.DEFAULT_RULES,
    ):
        self.plan = plan
        self.config = validate_config(config)
        if classifier is None and "langid" in plan.stages:
            classifier = langid.bundled_classifier()
        self.classifier = classifier
        self.rules = rules

    def process(self, docs: Iterable[Document]) -> PipelineResult:
        docs = sorted(docs, key=lambda d: d.id)
        _check_unique_ids(docs)
        inputs = list(docs)
        acc = _StageAccumulator(self.plan.stages)
        drops: List[dict] = []
        pairs: List[dict] = []
        workers = max(1, self.config.worker_count)

        for segment in self.plan.segments():
            if segment == ("sentence-dedup",):
                res = dedup.sentence_dedup(docs, self.config.min_sentence_chars)
                docs = self._account_barrier("sentence-dedup", docs, res, acc, drops)
            elif segment == ("minhash-dedup",):
                with _executor(workers) as pool:
                    mapper = map if pool is None else _pool_mapper(pool, len(docs), workers)
                    res = dedup.lsh_dedup(docs, self.config, mapper=mapper)
                docs = self._account_barrier("minhash-dedup", docs, res, acc, drops)
                pairs = sorted(res.report, key=lambda r: r["dropped_id"])
            else:
                runner = _DocStageRunner(segment, self.config, self.classifier, self.rules)
                with _executor(workers, runner) as pool:
                    if pool is None:
                        results = map(runner, docs)
                    else:
                        results = pool.map(_run_in_worker, docs, chunksize=_chunksize(len(docs), workers))
                    out: List[Document] = []
                    for survivors, events in results:
                        out.extend(survivors)
                        for doc_id, stage, outcome, w_in, w_out, n_out in events:
                            acc.add(stage, outcome, w_in, w_out, n_out)
                            if outcome.dropped:
                                drops.append(_drop_event(stage, doc_id, outcome))
                docs = sorted(out, key=lambda d: d.id)

        for ev in drops:
            audit.info(json.dumps(ev, ensure_ascii=False, sort_keys=True))
        report = FunnelReport(stages=acc.finish(), sources=source_distribution(inputs, docs))
        return PipelineResult(docs, report, pairs, drops)

    @staticmethod
    def _account_barrier(stage, docs, res: dedup.DedupResult, acc: _StageAccumulator, drops: List[dict]):
        kept = {d.id: d for d in res.kept}
        for d in docs:
            outcome = res.outcomes.get(d.id, FilterOutcome.keep())
            after = kept.get(d.id)
            acc.add(stage, outcome, word_count(d.text), word_count(after.text) if after else 0, 1 if after else 0)
            if outcome.dropped:
                drops.append(_drop_event(stage, d.id, outcome))
        return sorted(res.kept, key=lambda d: d.id)


def _drop_event(stage: str, doc_id: str, outcome: FilterOutcome) -> dict:
    return {"event": "drop", "stage": stage, "id": doc_id, "reason": outcome.reason.value, "detail": outcome.detail}


def _chunksize(n: int, workers: int) -> int:
    return max(1, n // (workers * 8))


def _pool_mapper(pool: ProcessPoolExecutor, n: int, workers: int) -> Callable:
    def mapper(fn, items):
        return pool.map(_call_in_worker, ((fn, x) for x in items), chunksize=_chunksize(n, workers))

    return mapper


# -- file-level entry point --------------------------------------------------------


@contextmanager
def partial_outputs(paths: Sequence[Optional[Path]]) -> Iterator[Dict[Path, Path]]:
    """Yield ``final -> final.partial`` temp paths; rename them only on success."""
    mapping = {Path(p): Path(str(p) + ".partial") for p in paths if p is not None}
    yield mapping
    for final, tmp in mapping.items():
        if tmp.exists():
            os.replace(tmp, final)


def write_outputs(result: PipelineResult, output: Path, dedup_report: Optional[Path] = None, report: Optional[Path] = None) -> None:
    with partial_outputs([output, dedup_report, report]) as tmp:
        with open(tmp[Path(output)], "w", encoding="utf-8", newline="\n") as fh:
            for doc in result.documents:
                fh.write(dumps_document(doc) + "\n")
        if dedup_report is not None:
            with open(tmp[Path(dedup_report)], "w", encoding="utf-8", newline="\n") as fh:
                for row in result.dedup_pairs:
                    fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
        if report is not None:
            tmp[Path(report)].write_text(result.report.to_json(), encoding="utf-8")


def run(
    plan: StagePlan,
    config: PipelineConfig,
    inputs: Iterable[Document],
    output,
    dedup_report=None,
    report=None,
    classifier: Optional[langid.LanguageClassifier] = None,
    rules: pii.PiiRuleSet = pii.DEFAULT_RULES,
) -> FunnelReport:
    result = Pipeline(plan, config, classifier, rules).process(inputs)
    write_outputs(
        result,
        Path(output),
        Path(dedup_report) if dedup_report else None,
        Path(report) if report else None,
    )
    return result.report
