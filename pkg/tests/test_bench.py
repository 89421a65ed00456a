import json
import sys

import pytest

from corpus_forge.bench import (
    PLACEHOLDER,
    CommandTranslator,
    McqItem,
    ReviewQueue,
    TemplateError,
    TemplatedItem,
    expand_choices,
    identity_translator,
    load_translator,
    make_template,
    strip_placeholder,
    translate_item,
    translate_template,
)

STEM = "Ладнокрвните животни често се"
CHOICES = ["брзи", "големи", "без влакна", "бавни"]


def _item(stem=STEM, choices=CHOICES):
    return McqItem("arc-1", stem, choices, 3)


def test_make_template_appends():
    assert make_template(_item()).template == "Ладнокрвните животни често се ⟦X⟧"
    assert make_template(_item("")).template == "⟦X⟧"


def test_make_template_rejects_existing_placeholder():
    with pytest.raises(TemplateError):
        make_template(_item("Веќе има ⟦X⟧ тука"))


def test_slot_substitution():
    t = make_template(_item("Кое животно ___ е најбрзо?"), slot="___")
    assert t.template == "Кое животно ⟦X⟧ е најбрзо?"


def test_identity_translation_unchanged():
    t = make_template(_item())
    assert translate_template(t, identity_translator) == t


def test_deleting_translator_flags_loss():
    out = translate_template(make_template(_item()), lambda s: s.replace(PLACEHOLDER, ""))
    assert out.flag == "PlaceholderLost" and not out.ok


def test_duplicating_translator_flags_loss():
    out = translate_template(make_template(_item()), lambda s: s + " " + PLACEHOLDER)
    assert not out.ok


@pytest.mark.parametrize("mangled", ["⟦ X ⟧", "⟦X ⟧", "⟦\tX⟧"])
def test_whitespace_mangled_placeholder_recovered(mangled, caplog):
    caplog.set_level("INFO")
    out = translate_template(make_template(_item()), lambda s: s.replace(PLACEHOLDER, mangled))
    assert out.ok and out.flag == "PlaceholderRecovered"
    assert out.template == "Ладнокрвните животни често се ⟦X⟧"
    assert "recovered" in caplog.text


def test_strip_examples():
    assert strip_placeholder(TemplatedItem("Ладнокрвните животни често се ⟦X⟧")) == STEM
    assert strip_placeholder(make_template(_item())) == STEM


def string_surgery_oracle(template, placeholder=PLACEHOLDER):
    i = template.index(placeholder)
    left, right = template[:i], template[i + len(placeholder) :]
    if left[-1:] == " ":
        return left[:-1] + right
    if right[:1] == " ":
        return left + right[1:]
    return left + right


@pytest.mark.parametrize(
    "template",
    ["Кое животно ⟦X⟧ е најбрзо?", "⟦X⟧ е главен град.", "Главниот град е ⟦X⟧.", "Збор⟦X⟧збор"],
)
def test_strip_mid_sentence(template):
    assert strip_placeholder(TemplatedItem(template)) == string_surgery_oracle(template)
    assert strip_placeholder(TemplatedItem("Кое животно ⟦X⟧ е најбрзо?")) == "Кое животно е најбрзо?"


def test_strip_without_placeholder():
    with pytest.raises(TemplateError):
        strip_placeholder(TemplatedItem("нема"))


def test_expand_choices():
    cands = expand_choices(STEM, CHOICES)
    assert len(cands) == 4
    assert all(c.endswith(ch) for c, ch in zip(cands, CHOICES))
    assert cands[2] == "Ладнокрвните животни често се без влакна"
    assert expand_choices(STEM, []) == []


def test_translate_item_keeps_answer_index(tmp_path):
    review = ReviewQueue(tmp_path / "review.jsonl")
    out = translate_item(_item(), str.upper, review)
    assert out.stem == STEM.upper() and out.choices == tuple(c.upper() for c in CHOICES)
    assert out.answer_index == 3 and len(review) == 0


def test_review_queue_file(tmp_path):
    path = tmp_path / "review.jsonl"
    review = ReviewQueue(path)
    assert translate_item(_item(), lambda s: "изгубено", review) is None
    entry = json.loads(path.read_text(encoding="utf-8"))
    assert entry["id"] == "arc-1" and entry["flag"] == "PlaceholderLost"


def test_command_translator():
    tr = load_translator(f"command:{sys.executable} -c \"import sys; sys.stdout.write(sys.stdin.read().upper())\"")
    assert isinstance(tr, CommandTranslator)
    assert tr("абв ⟦x⟧") == "АБВ ⟦X⟧"
    with pytest.raises(ValueError):
        load_translator("deepl")


def test_placeholder_never_reaches_choices():
    review = ReviewQueue()
    assert translate_item(_item(), lambda s: s if PLACEHOLDER in s else s + " " + PLACEHOLDER, review) is None
    assert review.entries[0]["flag"] == "PlaceholderInChoice"
