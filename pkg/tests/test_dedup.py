import random
import re

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corpus_forge.dedup import (
    LshIndex,
    estimate_similarity,
    lsh_dedup,
    minhash_signature,
    sentence_dedup,
    shingles,
)
from corpus_forge.model import Decision, Document, PipelineConfig, Reason
from corpus_forge.sentences import split_sentences
from corpus_forge.synthetic import CorpusGenerator

CFG = PipelineConfig()


def _doc(i, text):
    return Document(i, "web", text)


# -- brute-force oracles -------------------------------------------------------


def oracle_shingles(text, k=5):
    words = re.findall(r"\w+", text.casefold())
    if len(words) < k:
        return {tuple(words)}
    return {tuple(words[i : i + k]) for i in range(len(words) - k + 1)}


def jaccard(a, b):
    sa, sb = oracle_shingles(a), oracle_shingles(b)
    return len(sa & sb) / len(sa | sb)


def oracle_sentence_dedup(docs, min_chars=15):
    seen = set()
    out = {}
    for doc in sorted(docs, key=lambda d: d.id):
        kept = []
        for s in split_sentences(doc.text):
            norm = " ".join(s.casefold().split())
            if len(norm) >= min_chars:
                if norm in seen:
                    continue
                seen.add(norm)
            kept.append(s)
        out[doc.id] = kept
    return out


# -- sentence dedup ------------------------------------------------------------

BOILER = "Сите права се задржани од страна на издавачот."


def test_shared_boilerplate_removed_from_second_only():
    a = _doc("a", "Ова е првиот документ за времето. " + BOILER)
    b = _doc("b", "Вториот документ зборува за спорт. " + BOILER)
    res = sentence_dedup([b, a])
    assert [d.id for d in res.kept] == ["a", "b"]
    assert res.kept[0] == a
    assert res.kept[1].text == "Вториот документ зборува за спорт. "
    assert res.outcomes["b"].reason is Reason.SENTENCES_REMOVED


def test_ten_doc_fixture_matches_oracle():
    gen = CorpusGenerator(11)
    pool = [gen.sentence() for _ in range(12)] + ["Кратко.", "Да."]
    rng = random.Random(5)
    docs = []
    for i in range(10):
        sents = rng.choices(pool, k=rng.randint(1, 6))
        # vary case and spacing so normalization matters
        sents = [s.upper() if rng.random() < 0.1 else s for s in sents]
        sep = rng.choice([" ", "  ", "\n"])
        docs.append(_doc(f"d{i:02d}", sep.join(sents)))
    res = sentence_dedup(docs)
    expected = oracle_sentence_dedup(docs)
    got = {d.id: split_sentences(d.text) for d in res.kept}
    for doc_id, sents in expected.items():
        if sents:
            assert got[doc_id] == sents
        else:
            assert doc_id not in got
    assert {d.id for d, _ in res.dropped} == {i for i, s in expected.items() if not s}


def test_no_repeats_is_identity():
    gen = CorpusGenerator(2)
    docs = [_doc(f"d{i}", gen.paragraph()) for i in range(5)]
    res = sentence_dedup(docs)
    assert res.kept == docs and not res.outcomes


def test_single_sentence_duplicate_dropped():
    res = sentence_dedup([_doc("a", "Оваа реченица се повторува."), _doc("b", "оваа  реченица се повторува.")])
    assert [d.id for d in res.kept] == ["a"]
    (doc, outcome), = res.dropped
    assert doc.id == "b" and outcome.reason is Reason.DUPLICATE_SENTENCE


def test_short_sentences_exempt():
    res = sentence_dedup([_doc("a", "Да. Ова е подолга реченица."), _doc("b", "Да. Нешто сосема друго е ова.")])
    assert res.kept[1].text.startswith("Да.")


sentence_st = st.sampled_from(
    ["Прва долга реченица овде.", "Втора долга реченица овде!", "Трета реченица е исто долга?", "Не.", "Краток ред"]
)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(sentence_st, min_size=1, max_size=5), min_size=1, max_size=6))
def test_sentence_dedup_idempotent(doc_sents):
    docs = [_doc(f"d{i}", " ".join(s)) for i, s in enumerate(doc_sents)]
    once = sentence_dedup(docs).kept
    twice = sentence_dedup(once)
    assert twice.kept == once and not twice.outcomes


# -- MinHash -------------------------------------------------------------------


def _random_text(rng, vocab, n):
    return " ".join(rng.choice(vocab) for _ in range(n))


def test_identical_texts_identical_signatures():
    text = "Ова е еден текст кој се повторува без никаква промена."
    assert np.array_equal(minhash_signature(_doc("a", text), CFG).values, minhash_signature(_doc("b", text), CFG).values)


def test_short_text_single_shingle():
    assert shingles("Само три зборови", 5) == {"само три зборови"}
    sig = minhash_signature(_doc("a", "Само три зборови"), CFG)
    assert len(sig) == 128


def test_estimate_against_exact_jaccard():
    rng = random.Random(17)
    vocab = [f"w{i}" for i in range(60)]  # small vocabulary: shingle sets overlap
    for trial in range(20):
        a = _random_text(rng, vocab, 200)
        words = a.split()
        for i in rng.sample(range(200), rng.randint(0, 120)):
            words[i] = rng.choice(vocab)
        b = " ".join(words)
        j = jaccard(a, b)
        est = minhash_signature(_doc("a", a), CFG).similarity(minhash_signature(_doc("b", b), CFG))
        assert abs(est - j) <= 0.15, (trial, est, j)


def test_disjoint_vocabularies():
    rng = random.Random(3)
    a = _random_text(rng, [f"a{i}" for i in range(500)], 200)
    b = _random_text(rng, [f"b{i}" for i in range(500)], 200)
    assert jaccard(a, b) == 0
    assert minhash_signature(_doc("a", a), CFG).similarity(minhash_signature(_doc("b", b), CFG)) <= 0.05


def test_signature_length_mismatch():
    with pytest.raises(ValueError):
        estimate_similarity(np.zeros(3), np.zeros(4))


# -- LSH -----------------------------------------------------------------------


def test_two_percent_edit_copy_dropped():
    gen = CorpusGenerator(4)
    original = gen.long_document(600)
    copy = gen.near_copy(original, 0.02)
    assert jaccard(original, copy) >= 0.8
    res = lsh_dedup([_doc("z-copy", copy), _doc("a-orig", original)], CFG)
    assert [d.id for d in res.kept] == ["a-orig"]
    assert res.report[0]["dropped_id"] == "z-copy" and res.report[0]["kept_id"] == "a-orig"
    assert res.outcomes["z-copy"].reason is Reason.NEAR_DUPLICATE_DOC


def test_dissimilar_corpus_kept_over_trials():
    for trial in range(20):
        rng = random.Random(100 + trial)
        vocab = [f"v{i}" for i in range(3000)]
        docs = [_doc(f"d{i:02d}", _random_text(rng, vocab, rng.randint(50, 300))) for i in range(15)]
        for x in range(len(docs)):
            for y in range(x + 1, len(docs)):
                assert jaccard(docs[x].text, docs[y].text) <= 0.1
        res = lsh_dedup(docs, CFG.replace(seed=trial))
        assert len(res.kept) == len(docs), trial


def test_exact_duplicates_all_but_first():
    text = CorpusGenerator(9).paragraph(sentences=6)
    docs = [_doc(i, text) for i in ("c", "a", "d", "b")]
    res = lsh_dedup(docs, CFG)
    assert [d.id for d in res.kept] == ["a"]
    assert all(r["kept_id"] == "a" and r["estimated_similarity"] == 1.0 for r in res.report)


def test_lsh_dedup_idempotent():
    gen = CorpusGenerator(21)
    base = [gen.paragraph(sentences=5) for _ in range(6)]
    docs = [_doc(f"d{i}", t) for i, t in enumerate(base)] + [_doc(f"e{i}", gen.near_copy(t)) for i, t in enumerate(base[:3])]
    once = lsh_dedup(docs, CFG).kept
    twice = lsh_dedup(once, CFG)
    assert twice.kept == once and not twice.report


def test_index_band_lookup():
    index = LshIndex(16, 8)
    a = minhash_signature(_doc("a", "Еден текст за тестирање на индексот."), CFG)
    b = minhash_signature(_doc("b", "Сосема поинаков текст без заеднички зборови овде."), CFG)
    index.insert(a)
    index.insert(b)
    assert index.candidates(a) == set()
    assert index.collides(a, a) and not index.collides(a, b)
    with pytest.raises(ValueError):
        LshIndex(10, 10).insert(a)
