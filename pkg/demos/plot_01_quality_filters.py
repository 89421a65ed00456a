"""
Line and document quality filters
=================================

PII scrubbing, the C4 line rules and the Gopher bullet/ellipsis ratios on a
handful of hand-made documents.
"""

from corpus_forge import Document, PipelineConfig
from corpus_forge.pii import scrub
from corpus_forge.quality import DocRatios, c4_line_filter, gopher_doc_filter

cfg = PipelineConfig()

# e-mail addresses, IPs and phone numbers become bracketed tokens
doc = Document("web-1", "hplt2", "Пиши на ana@example.mk.\nIP: 192.168.1.1, тел: +389 70 123 456")
clean, outcome = scrub(doc)
print(clean.text)
print(outcome)

# lines with fewer than three words or without terminal punctuation go
text = "\n".join(
    [
        "Добро утро.",
        "Ова е целосна реченица.",
        "мени почетна контакт",
        "Тој рече „Дојди веднаш.“",
    ]
)
filtered, outcome = c4_line_filter(Document("web-2", "hplt2", text), cfg)
print(filtered.text)
print(outcome.reason.value, outcome.detail)

# Gopher thresholds are strict: 90 bullet lines out of 100 pass, 91 do not
for n in (90, 91):
    lines = [f"• Ставка број {i} од листата." for i in range(n)]
    lines += [f"Обичен ред број {i} е тука." for i in range(100 - n)]
    body = "\n".join(lines)
    print(n, DocRatios.of(body).bullet_line_ratio, gopher_doc_filter(Document("g", "web", body), cfg))
