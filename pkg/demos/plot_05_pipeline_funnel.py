"""
The full filtering funnel
=========================

Runs all seven stages over a synthetic 1 MB corpus and prints the per-stage
funnel and the source/word distribution before and after filtering.
The same run is available as ``corpus-forge filter``.
"""

import tempfile
from pathlib import Path

from corpus_forge import PipelineConfig
from corpus_forge.pipeline import Pipeline, StagePlan, write_outputs
from corpus_forge.stats import render_funnel, render_table
from corpus_forge.synthetic import generate_corpus

docs = generate_corpus(1_000_000, seed=11)
print(len(docs), "documents")

result = Pipeline(StagePlan(), PipelineConfig(seed=1234)).process(docs)
print(render_funnel(result.report))

print("pre-filter words")
print(render_table(result.report, basis="in"))
print("post-filter words")
print(render_table(result.report, basis="out"))

for row in result.dedup_pairs[:3]:
    print(row)

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp)
    write_outputs(result, out / "corpus.jsonl", out / "dedup.jsonl", out / "report.json")
    print(sorted(p.name for p in out.iterdir()))
