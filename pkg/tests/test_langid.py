import random
from collections import defaultdict

import pytest
from hypothesis import given, settings, strategies as st

from corpus_forge.langid import (
    CONFIDENCE_GAIN,
    DOC_TOP_K,
    LangPrediction,
    NgramProfileClassifier,
    bundled_classifier,
    bundled_samples,
    gate,
    load_classifier,
    train_ngram_profiles,
)
from corpus_forge.model import Decision, Document, PipelineConfig, Reason

from conftest import FixedClassifier

MK_FIXTURE = [
    ("Македонскиот јазик е јужнословенски јазик што се зборува во Северна Македонија.", "mk"),
    ("Скопје е главниот град и најголемиот град во државата.", "mk"),
    ("Охридското Езеро е едно од најстарите езера во Европа и е дел од светското наследство.", "mk"),
    ("Децата одат на училиште секое утро и учат многу нови работи.", "mk"),
]
EN_FIXTURE = [
    ("The English language is a West Germanic language spoken in many countries.", "en"),
    ("London is the capital and the largest city of the United Kingdom.", "en"),
    ("Children go to school every morning and learn many new things.", "en"),
    ("The lake is one of the oldest lakes in Europe and part of world heritage.", "en"),
]
SPEC_SENTENCE = "Ова е реченица на македонски јазик и содржи доволно текст."


# -- an independent out-of-place implementation --------------------------------


def oracle_grams(text, lo, hi):
    letters = "".join(ch if ch.isalpha() else " " for ch in text.lower())
    padded = " " + " ".join(letters.split()) + " "
    if padded == "  ":
        return {}
    counts = defaultdict(int)
    for n in range(lo, hi + 1):
        for i in range(len(padded) - n + 1):
            gram = padded[i : i + n]
            if gram != " ":
                counts[gram] += 1
    return counts


def oracle_ranks(counts, k):
    items = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return {g: i for i, (g, _) in enumerate(items[:k])}


def oracle_distance(text, profile, lo, hi, top_k):
    doc = oracle_ranks(oracle_grams(text, lo, hi), DOC_TOP_K)
    total = 0
    for gram, rank in doc.items():
        total += min(abs(rank - profile[gram]), top_k) if gram in profile else top_k
    return total / (top_k * len(doc))


def oracle_train(samples, lo, hi, top_k):
    per_lang = defaultdict(lambda: defaultdict(int))
    for text, lang in samples:
        for g, c in oracle_grams(text, lo, hi).items():
            per_lang[lang][g] += c
    return {lang: oracle_ranks(c, top_k) for lang, c in per_lang.items()}


def test_hand_computed_distances():
    # profiles: mk = {а:0, б:1}, en = {c:0, d:1}; top_k 2, unigrams only
    clf = train_ngram_profiles([("аб", "mk"), ("cd", "en")], n_range=(1, 1), top_k=2)
    assert clf.profiles == {"en": {"c": 0, "d": 1}, "mk": {"а": 0, "б": 1}}
    # "аб" ranks а:0 б:1 -> 0 displacement against mk, 2 penalties of 2 against en
    assert clf.distances("аб") == {"en": 1.0, "mk": 0.0}
    assert clf.predict("аб") == LangPrediction("mk", 1.0)
    # "ба б" ranks б:0 а:1 -> displacement 1+1 out of 4 against mk
    assert clf.distances("ба б")["mk"] == pytest.approx(0.5)


def test_spec_sentence_against_oracle():
    samples = MK_FIXTURE + EN_FIXTURE
    clf = train_ngram_profiles(samples, n_range=(1, 3), top_k=300)
    profiles = oracle_train(samples, 1, 3, 300)
    assert clf.profiles == profiles
    expected = {lang: oracle_distance(SPEC_SENTENCE, prof, 1, 3, 300) for lang, prof in profiles.items()}
    got = clf.distances(SPEC_SENTENCE)
    assert got == pytest.approx(expected)
    assert min(expected, key=expected.get) == "mk"
    pred = clf.predict(SPEC_SENTENCE)
    assert pred.language == "mk"
    d1, d2 = sorted(expected.values())
    assert pred.confidence == pytest.approx(min(1.0, CONFIDENCE_GAIN * (d2 - d1) / d2))


def test_one_language_rejected():
    with pytest.raises(ValueError):
        train_ngram_profiles(MK_FIXTURE)


def test_empty_text_zero_confidence():
    clf = train_ngram_profiles(MK_FIXTURE + EN_FIXTURE)
    assert clf.predict("").confidence == 0.0
    assert bundled_classifier().predict("  123 !!").confidence == 0.0


def test_training_order_irrelevant():
    samples = MK_FIXTURE + EN_FIXTURE
    shuffled = samples[:]
    random.Random(3).shuffle(shuffled)
    assert train_ngram_profiles(samples).profiles == train_ngram_profiles(shuffled).profiles


def test_model_round_trip(tmp_path):
    clf = train_ngram_profiles(MK_FIXTURE + EN_FIXTURE, n_range=(1, 3), top_k=500)
    path = tmp_path / "model.bin"
    clf.save(path)
    back = load_classifier(str(path))
    assert back.profiles == clf.profiles and back.n_range == clf.n_range and back.top_k == clf.top_k
    with pytest.raises(ValueError):
        NgramProfileClassifier.from_bytes(b"garbage")


@pytest.mark.parametrize(
    "text, lang",
    [
        ("Владата денес ги објави новите мерки за поддршка на земјоделците и малите претпријатија во државата.", "mk"),
        ("Влада Републике Србије данас је усвојила нови закон о образовању и запошљавању младих људи.", "sr"),
        ("Правителството обяви днес новите мерки за подкрепа на земеделските производители в страната.", "bg"),
        ("Правительство сегодня объявило о новых мерах поддержки малого бизнеса и сельского хозяйства.", "ru"),
        ("The government announced new measures today to support farmers and small businesses.", "en"),
    ],
)
def test_bundled_model_separates_neighbours(text, lang):
    assert bundled_classifier().predict(text).language == lang


def test_bundled_model_not_trivially_memorizing():
    # held-out paragraphs are still classified with their own label
    samples = bundled_samples()
    rng = random.Random(0)
    held = rng.sample(range(len(samples)), 10)
    train = [s for i, s in enumerate(samples) if i not in held]
    clf = train_ngram_profiles(train)
    assert all(clf.predict(samples[i][0]).language == samples[i][1] for i in held)


# -- gate ----------------------------------------------------------------------

CFG = PipelineConfig()


@pytest.mark.parametrize(
    "lang, conf, decision",
    [("mk", 0.66, Decision.KEEP), ("mk", 0.65, Decision.DROP), ("sr", 0.99, Decision.DROP)],
)
def test_gate_boundaries(fixed_classifier, lang, conf, decision):
    doc, outcome = gate(Document("d", "web", "текст"), fixed_classifier(lang, conf), CFG)
    assert outcome.decision is decision
    assert doc.lang_confidence == conf and doc.meta["language"] == lang
    if decision is Decision.DROP:
        assert outcome.reason is Reason.LANGID_BELOW_THRESHOLD


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_gate_monotone_in_confidence(a, b):
    lo, hi = sorted((a, b))
    d = Document("d", "web", "x")
    keep_lo = gate(d, FixedClassifier("mk", lo), CFG)[1].decision is Decision.KEEP
    keep_hi = gate(d, FixedClassifier("mk", hi), CFG)[1].decision is Decision.KEEP
    assert keep_hi or not keep_lo
