"""
Template-based MCQ translation
=============================

The question stem is translated with a placeholder where the answer goes,
then each choice is appended to the stripped stem.
"""

from corpus_forge.bench import (
    McqItem,
    ReviewQueue,
    expand_choices,
    make_template,
    strip_placeholder,
    translate_item,
    translate_template,
)

item = McqItem("arc-easy-1", "Ладнокрвните животни често се", ["брзи", "големи", "без влакна", "бавни"], 3)
template = make_template(item)
print(template.template)

# a translator that mangles the placeholder's spacing is still recovered
mangled = translate_template(template, lambda s: s.replace("⟦X⟧", "⟦ X ⟧"))
print(mangled.flag, "->", mangled.template)

stem = strip_placeholder(mangled)
for candidate in expand_choices(stem, item.choices):
    print(" ", candidate)

# a translator that drops the placeholder sends the item to review
review = ReviewQueue()
print(translate_item(item, lambda s: s.replace("⟦X⟧", ""), review), len(review))
