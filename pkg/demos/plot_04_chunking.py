"""
Sentence-aligned chunking
=========================

Long document-derived texts are split into chunks of at most 4000 words
without cutting sentences.
"""

from corpus_forge import Document, PipelineConfig, SourceKind
from corpus_forge.chunker import chunk_document, chunk_to_documents
from corpus_forge.synthetic import CorpusGenerator

text = CorpusGenerator(seed=1).long_document(10_000)
doc = Document("thesis-17", "documents", text, source_kind=SourceKind.DOCUMENT)
chunks = chunk_document(doc, PipelineConfig())
print(len(text.split()), "words ->", [c.word_count for c in chunks])
print("concatenation restores the input:", "".join(c.text for c in chunks) == text)

# chunk records carry their parent id
docs, outcome = chunk_to_documents(doc, PipelineConfig())
print([(d.id, d.meta["chunk_index"]) for d in docs], outcome.detail)

# a sentence longer than the budget is kept whole and flagged
runaway = Document("scan", "documents", " ".join(["збор"] * 4500) + ".", source_kind=SourceKind.DOCUMENT)
print(chunk_document(runaway, PipelineConfig())[0].oversized)
