"""
Instruction-tuning mix
======================

Samples a 2:1 favored/translated mix, profiles token lengths against the
4096 cutoff and renders one record in the chat format with the Macedonian
system prompt.
"""

import numpy as np

from corpus_forge.sft import SftRecord, Turn, apply_cutoff, format_chat, length_profile, sample_mix

rng = np.random.default_rng(0)


def record(i, favored):
    q = " ".join(["прашање"] * int(rng.integers(5, 60)))
    a = " ".join(["одговор"] * int(rng.lognormal(5.0, 1.0)))
    return SftRecord.build(f"{'mk' if favored else 'tr'}-{i}", "native" if favored else "translated", favored, [Turn("user", q), Turn("assistant", a)])


favored = [record(i, True) for i in range(3000)]
translated = [record(i, False) for i in range(6000)]

mix = sample_mix([favored, translated], ratio=(2, 1), seed=0, target_count=6000)
print("favored share", mix.favored_draws / len(mix.records), "recycled", mix.recycled)

profile = length_profile(favored + translated, cutoff=4096)
print(f"coverage at 4096 tokens: {profile.coverage_at_cutoff:.3f}")
print("cutoff for 95% coverage:", profile.quantile_cutoff(0.95))

outcomes = [apply_cutoff(r, 4096)[1].action for r in mix.records]
print({a: outcomes.count(a) for a in set(outcomes)})

short = SftRecord.build("demo", "native", True, [Turn("user", "Кој е главниот град на Македонија?"), Turn("assistant", "Скопје.")])
print(format_chat(short))
