import pytest
from hypothesis import given, strategies as st

from corpus_forge.ingest import read_jsonl, write_jsonl
from corpus_forge.model import (
    ConfigError,
    Decision,
    Document,
    FilterOutcome,
    PipelineConfig,
    Reason,
    SourceKind,
    normalize_text,
    validate_config,
)


def test_defaults_accepted():
    cfg = validate_config(PipelineConfig())
    assert (cfg.langid_threshold, cfg.min_line_words, cfg.bullet_ratio_max, cfg.ellipsis_ratio_max, cfg.chunk_max_words) == (
        0.65,
        3,
        0.90,
        0.30,
        4000,
    )


def test_band_row_product_accepted():
    validate_config(PipelineConfig(lsh_bands=16, lsh_rows=8, minhash_permutations=128))


def test_band_row_mismatch_rejected():
    with pytest.raises(ConfigError):
        validate_config(PipelineConfig(lsh_bands=10, lsh_rows=10, minhash_permutations=128))


@pytest.mark.parametrize(
    "changes",
    [
        {"langid_threshold": 1.5},
        {"bullet_ratio_max": -0.1},
        {"ellipsis_ratio_max": 2.0},
        {"duplicate_line_fraction_max": 1.2},
        {"min_line_words": 0},
        {"worker_count": 0},
        {"shingle_size": 2.5},
    ],
)
def test_out_of_range_rejected(changes):
    with pytest.raises(ConfigError):
        validate_config(PipelineConfig().replace(**changes))


def test_band_implied_threshold():
    assert PipelineConfig().lsh_threshold == pytest.approx((1 / 16) ** (1 / 8))


def test_drop_requires_drop_reason():
    with pytest.raises(ValueError):
        FilterOutcome(Decision.DROP)
    with pytest.raises(ValueError):
        FilterOutcome(Decision.DROP, Reason.PII_SCRUBBED)
    with pytest.raises(ValueError):
        FilterOutcome(Decision.KEEP, Reason.BULLET_RATIO)
    assert FilterOutcome.drop(Reason.BULLET_RATIO).dropped


def test_document_invariants():
    with pytest.raises(ValueError):
        Document("", "web", "x")
    with pytest.raises(ValueError):
        Document("a", "web", "x", lang_confidence=1.2)
    assert Document("a", "web", "x", source_kind="wiki").source_kind is SourceKind.WIKI


def test_ingest_normalization_is_nfc():
    decomposed = "é \r\n й"
    assert normalize_text(decomposed) == "é \n й"
    assert Document.create("a", "web", decomposed).text == "é \n й"


documents = st.builds(
    Document,
    id=st.text(min_size=1, max_size=12),
    source=st.sampled_from(["hplt2", "wikipedia", "documents"]),
    text=st.text(max_size=200).map(normalize_text),
    source_kind=st.sampled_from(list(SourceKind)),
    lang_confidence=st.none() | st.floats(0, 1),
    meta=st.dictionaries(st.text(max_size=5), st.integers() | st.text(max_size=5), max_size=3),
)


@given(documents)
def test_dict_round_trip(doc):
    assert Document.from_dict(doc.to_dict()) == doc


@given(st.lists(documents, max_size=5, unique_by=lambda d: d.id))
def test_jsonl_round_trip(tmp_path_factory, docs):
    path = tmp_path_factory.mktemp("rt") / "c.jsonl"
    write_jsonl(docs, path)
    back = list(read_jsonl(path, strict=True))
    assert back == sorted(docs, key=lambda d: d.id)
