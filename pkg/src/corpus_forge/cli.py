"""Command-line entry point: ``corpus-forge <subcommand>``.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import bench, langid, pii, sft
from .config import FileSettings, load_settings, resolve_config
from .ingest import CorpusStream, read_jsonl, read_records, read_text_dir, write_records
from .pipeline import Pipeline, StagePlan, write_outputs
from .stats import FORMATS, FunnelReport, render_funnel, render_table, source_distribution

log = logging.getLogger("corpus_forge")


class JsonFormatter(logging.Formatter):
    """One JSON object per record; messages that already are JSON objects are inlined."""

    def format(self, record: logging.LogRecord) -> str:
        msg = record.getMessage()
        try:
            payload = json.loads(msg)
            if not isinstance(payload, dict):
                raise ValueError
        except ValueError:
            payload = {"message": msg}
        return json.dumps({"level": record.levelname, "logger": record.name, **payload}, ensure_ascii=False)


def _setup_logging(log_path: Optional[str], verbose: bool) -> None:
    root = logging.getLogger("corpus_forge")
    root.handlers.clear()
    root.propagate = False
    handler = logging.FileHandler(log_path, encoding="utf-8") if log_path else logging.StreamHandler(sys.stderr)
    handler.setFormatter(JsonFormatter())
    root.addHandler(handler)
    if log_path or verbose:
        root.setLevel(logging.INFO)
    else:
        root.setLevel(logging.WARNING)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--log", metavar="PATH", help="write structured JSON logs (every drop event) to PATH")
    p.add_argument("-v", "--verbose", action="store_true", help="structured logs on stderr")


def _load_inputs(args, strict: bool) -> List:
    docs = []
    streams: List[CorpusStream] = []
    for path in args.input or []:
        streams.append(read_jsonl(path, strict=strict))
    for spec in args.text_dir or []:
        path, _, source = spec.partition(":")
        streams.append(read_text_dir(path, source or "documents", strict=strict))
    errors = []
    for s in streams:
        docs.extend(s)
        errors.extend(s.errors)
    if errors:
        log.warning(json.dumps({"event": "ingest_errors", "count": len(errors)}))
        if getattr(args, "errors", None):
            write_records(errors, args.errors)
    return docs


def cmd_filter(args) -> int:
    settings = load_settings(args.config) if args.config else FileSettings()
    flags = {
        "seed": args.seed,
        "worker_count": args.workers,
        "langid_threshold": args.langid_threshold,
        "target_language": args.target_language,
        "minhash_permutations": args.permutations,
        "lsh_bands": args.bands,
        "lsh_rows": args.rows,
        "shingle_size": args.shingle_size,
        "chunk_max_words": args.chunk_max_words,
    }
    config = resolve_config(settings, flags)
    plan = StagePlan.parse(args.stages or settings.stages, args.allow_reorder or settings.allow_reorder)
    classifier = None
    if "langid" in plan.stages:
        classifier = langid.load_classifier(args.langid_model or settings.langid_model)
    rules = pii.PiiRuleSet.from_mapping(settings.pii) if settings.pii else pii.DEFAULT_RULES

    docs = _load_inputs(args, args.strict)
    result = Pipeline(plan, config, classifier, rules).process(docs)
    write_outputs(
        result,
        Path(args.output),
        Path(args.dedup_report) if args.dedup_report else None,
        Path(args.report) if args.report else None,
    )
    if args.report_format == "json":
        sys.stdout.write(result.report.to_json())
    else:
        sys.stdout.write(render_funnel(result.report))
        sys.stdout.write("\n" + render_table(result.report, args.report_format))
    return 0


def cmd_stats(args) -> int:
    if args.from_report:
        report = FunnelReport.from_json(Path(args.from_report).read_text(encoding="utf-8"))
    else:
        docs = _load_inputs(args, strict=False)
        report = FunnelReport(sources=source_distribution(docs, docs))
    text = render_table(report, args.report_format, basis=args.basis)
    if args.report:
        Path(args.report).write_text(report.to_json(), encoding="utf-8")
    sys.stdout.write(text)
    return 0


def cmd_assemble_sft(args) -> int:
    records = [sft.SftRecord.from_dict(d) for path in args.input for d in read_records(path)]
    ratio = sft.parse_ratio(args.ratio)
    mix = sft.sample_mix([records], ratio, seed=args.seed, target_count=args.target_count, mode=args.mode)
    prompt = Path(args.system_prompt).read_text(encoding="utf-8").strip() if args.system_prompt else sft.default_system_prompt()

    kept, truncated, dropped = [], 0, 0
    for rec in mix.records:
        rec = sft.with_system_prompt(rec, prompt)
        out, outcome = sft.apply_cutoff(rec, args.max_tokens)
        if out is None:
            dropped += 1
            log.info(json.dumps({"event": "drop", "stage": "sft-cutoff", "id": rec.id, "reason": outcome.reason}))
            continue
        truncated += outcome.action == "truncated"
        kept.append(out)
    write_records((r.to_dict() for r in kept), args.output)
    if args.chat_output:
        write_records(({"id": r.id, "text": sft.format_chat(r, prompt)} for r in kept), args.chat_output)

    profile = sft.length_profile(records, cutoff=args.max_tokens)
    summary = {
        "drawn": len(mix.records),
        "favored_draws": mix.favored_draws,
        "favored_fraction": mix.favored_draws / len(mix.records) if mix.records else 0.0,
        "recycled": mix.recycled,
        "kept": len(kept),
        "truncated": truncated,
        "dropped": dropped,
        "input_coverage_at_cutoff": profile.coverage_at_cutoff,
    }
    sys.stdout.write(json.dumps(summary, ensure_ascii=False, indent=2) + "\n")
    return 0


def cmd_template_mcq(args) -> int:
    translator = bench.load_translator(args.translator)
    if args.review_queue:
        Path(args.review_queue).write_text("", encoding="utf-8")
    review = bench.ReviewQueue(args.review_queue)
    out = []
    n = 0
    for d in read_records(args.input):
        n += 1
        item = bench.McqItem.from_dict(d)
        res = bench.translate_item(item, translator, review, args.placeholder, not args.keep_choices)
        if res is not None:
            out.append(res.to_dict())
    write_records(out, args.output)
    sys.stdout.write(json.dumps({"items": n, "translated": len(out), "review": len(review)}) + "\n")
    return 0


def cmd_train_langid(args) -> int:
    samples = []
    for spec in args.sample:
        lang, sep, path = spec.partition("=")
        if not sep:
            raise ValueError(f"--sample expects LANG=PATH, got {spec!r}")
        text = Path(path).read_text(encoding="utf-8")
        samples.extend((para, lang) for para in text.split("\n") if para.strip())
    clf = langid.train_ngram_profiles(samples, (args.n_min, args.n_max), args.top_k)
    clf.save(args.output)
    sys.stdout.write(json.dumps({"languages": clf.languages, "output": args.output}) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corpus-forge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter", help="run the filtering funnel over a corpus")
    p.add_argument("--config", help="TOML config file")
    p.add_argument("--input", action="append", help="JSONL corpus file (repeatable)")
    p.add_argument("--text-dir", action="append", metavar="DIR[:SOURCE]", help="directory of extracted document text")
    p.add_argument("--output", required=True, help="kept corpus (JSONL, sorted by id)")
    p.add_argument("--dedup-report", help="near-duplicate pairs (JSONL)")
    p.add_argument("--report", help="funnel report (JSON)")
    p.add_argument("--report-format", choices=FORMATS, default="markdown", help="stdout rendering")
    p.add_argument("--errors", help="ingest error sidecar (JSONL)")
    p.add_argument("--strict", action="store_true", help="abort on malformed input")
    p.add_argument("--stages", help="comma-separated stage list")
    p.add_argument("--allow-reorder", action="store_true", help="permit a non-default stage order")
    p.add_argument("--workers", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--langid-model", help="'bundled', 'fasttext:PATH' or a profile model file")
    p.add_argument("--langid-threshold", type=float)
    p.add_argument("--target-language")
    p.add_argument("--permutations", type=int)
    p.add_argument("--bands", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--shingle-size", type=int)
    p.add_argument("--chunk-max-words", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("stats", help="source/word distribution table")
    p.add_argument("--input", action="append", help="JSONL corpus file (repeatable)")
    p.add_argument("--text-dir", action="append", metavar="DIR[:SOURCE]")
    p.add_argument("--from-report", help="render an existing funnel report JSON")
    p.add_argument("--report", help="also write the report JSON here")
    p.add_argument("--report-format", choices=FORMATS, default="markdown")
    p.add_argument("--basis", choices=("in", "out"), default="out", help="pre- or post-filter word counts")
    _add_common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("assemble-sft", help="sample the instruction-tuning mix")
    p.add_argument("--input", action="append", required=True, help="SFT records JSONL (repeatable)")
    p.add_argument("--output", required=True)
    p.add_argument("--chat-output", help="also write formatted chat strings (JSONL)")
    p.add_argument("--ratio", default="2:1", help="favored:translated draw ratio")
    p.add_argument("--mode", choices=("records", "words"), default="records")
    p.add_argument("--max-tokens", type=int, default=sft.DEFAULT_MAX_TOKENS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target-count", type=int)
    p.add_argument("--system-prompt", help="text file; defaults to the bundled Macedonian prompt")
    _add_common(p)
    p.set_defaults(func=cmd_assemble_sft)

    p = sub.add_parser("template-mcq", help="placeholder-template translation of MCQ items")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--translator", default="identity", help="'identity' or 'command:<cmd>'")
    p.add_argument("--review-queue", help="JSONL for items that lost their placeholder")
    p.add_argument("--placeholder", default=bench.PLACEHOLDER)
    p.add_argument("--keep-choices", action="store_true", help="do not translate answer options")
    _add_common(p)
    p.set_defaults(func=cmd_template_mcq)

    p = sub.add_parser("train-langid", help="build a character n-gram profile model")
    p.add_argument("--sample", action="append", required=True, metavar="LANG=PATH")
    p.add_argument("--output", required=True)
    p.add_argument("--n-min", type=int, default=langid.DEFAULT_N_RANGE[0])
    p.add_argument("--n-max", type=int, default=langid.DEFAULT_N_RANGE[1])
    p.add_argument("--top-k", type=int, default=langid.DEFAULT_TOP_K)
    _add_common(p)
    p.set_defaults(func=cmd_train_langid)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.log, args.verbose)
    if args.command in ("filter", "stats") and not (args.input or args.text_dir or getattr(args, "from_report", None)):
        parser.error("no input given (use --input or --text-dir)")
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - reported as exit status 1
        log.error(json.dumps({"event": "failure", "error": f"{type(exc).__name__}: {exc}"}))
        print(f"corpus-forge: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
