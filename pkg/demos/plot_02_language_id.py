"""
Character n-gram language identification
========================================

The bundled profile classifier separates Macedonian from its closest
neighbours; the gate keeps documents predicted as ``mk`` with confidence
above 0.65.
"""

from corpus_forge import Document, PipelineConfig
from corpus_forge.langid import bundled_classifier, gate, train_ngram_profiles

clf = bundled_classifier()
samples = {
    "mk": "Владата денес ги објави новите мерки за поддршка на земјоделците.",
    "sr": "Влада је данас објавила нове мере за подршку пољопривредницима.",
    "bg": "Правителството обяви днес новите мерки за подкрепа на земеделците.",
    "ru": "Правительство сегодня объявило новые меры поддержки фермеров.",
}
for expected, text in samples.items():
    pred = clf.predict(text)
    print(f"{expected}: predicted {pred.language} ({pred.confidence:.2f})")

# the gate stores the prediction on the document
cfg = PipelineConfig()
doc, outcome = gate(Document("d", "web", samples["mk"]), clf, cfg)
print(doc.meta["language"], doc.lang_confidence, outcome.decision.value)
doc, outcome = gate(Document("d", "web", samples["sr"]), clf, cfg)
print(doc.meta["language"], outcome.decision.value, outcome.detail)

# short texts carry little evidence, so confidence falls
print(clf.predict("Добар ден."))

# custom profiles can be trained from any labelled text
tiny = train_ngram_profiles(
    [("Ова е македонски текст за обука.", "mk"), ("This is English training text.", "en")],
    n_range=(1, 3),
    top_k=300,
)
print(tiny.predict("Ова е реченица на македонски јазик и содржи доволно текст."))
