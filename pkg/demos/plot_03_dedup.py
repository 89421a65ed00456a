"""
Sentence dedup and MinHash near-duplicates
==========================================

Exact repeated sentences are removed corpus-wide, keeping the first
occurrence by document id. Near-duplicate documents are found with MinHash
signatures and 16 x 8 LSH banding.
"""

import numpy as np

from corpus_forge import Document, PipelineConfig
from corpus_forge.dedup import lsh_dedup, minhash_signature, sentence_dedup, shingles
from corpus_forge.synthetic import CorpusGenerator

gen = CorpusGenerator(seed=3)
boiler = "Сите права се задржани од страна на издавачот."
docs = [
    Document("a", "web", gen.paragraph() + " " + boiler),
    Document("b", "web", gen.paragraph() + " " + boiler),
    Document("c", "web", boiler),
]
res = sentence_dedup(docs)
for d in res.kept:
    print(d.id, "…", d.text[-60:])
print({k: v.reason.value for k, v in res.outcomes.items()})

# the signature estimate tracks the exact shingle Jaccard
cfg = PipelineConfig()
original = gen.long_document(400)
for fraction in (0.0, 0.02, 0.1, 0.3):
    copy = gen.near_copy(original, fraction) if fraction else original
    sa, sb = shingles(original, 5), shingles(copy, 5)
    exact = len(sa & sb) / len(sa | sb)
    est = minhash_signature(Document("x", "w", original), cfg).similarity(minhash_signature(Document("y", "w", copy), cfg))
    print(f"edit {fraction:4.0%}: exact {exact:.3f}  estimated {est:.3f}")

# the S-curve: chance that two documents share at least one band
b, r = cfg.lsh_bands, cfg.lsh_rows
for s in np.linspace(0.3, 1.0, 8):
    print(f"J={s:.1f}  P(candidate)={1 - (1 - s**r) ** b:.3f}")
print("band-implied threshold", round(cfg.lsh_threshold, 3))

result = lsh_dedup([Document("orig", "w", original), Document("zcopy", "w", gen.near_copy(original))], cfg)
print(result.report)
