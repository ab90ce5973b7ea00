"""Robustness probes: paraphrase invariance and hazard/location perturbation.

A robust system answers a paraphrased question the same way (higher cosine is
better) and changes its answer when the hazard or location actually changes
(lower cosine is better there).
"""

from hazeval import robustness as rb
from hazeval.dataset import generate_record, parse_answer
from hazeval.gateway import Provider, ProviderProfile
from hazeval.mock import DeterministicMockBackend

backend = DeterministicMockBackend(seed=9)
chat = Provider(ProviderProfile(name="chat", model_id="mock",
                                capabilities=frozenset({"chat"})), backend)
embed = Provider(ProviderProfile(name="embed", model_id="mock",
                                 capabilities=frozenset({"embed"})), backend)

record = generate_record(base_seed=31, index=0)
print("original:", record.question_text)

print("paraphrase:", rb.paraphrase_question(record.question_text, chat))
for kind in rb.PERTURBATION_KINDS:
    variant = rb.perturb_question(record, None, kind, rng_seed=2)
    print(f"{kind.value}: {variant.question_text}")

# Consistency is the embedding cosine of full answers (confidence excluded).
a = parse_answer("1. Elevate the switchgear.\n2. Harden the feeders.")
b = parse_answer("1. Elevate the switchgear.\n2. Harden the feeders and poles.")
print("\nconsistency(similar answers):", round(rb.consistency_score(a, b, embed), 4))

c = parse_answer("1. Entirely unrelated statement about orchards.")
print("consistency(different answers):", round(rb.consistency_score(a, c, embed), 4))

# run_robustness drives a full pipeline handle per variant; here a toy
# pipeline that echoes the question back as the answer.
def echo_pipeline(question_record):
    return parse_answer(f"1. {question_record.question_text}")

original_answer = echo_pipeline(record)
records = rb.run_robustness(record, original_answer, echo_pipeline, chat, embed, rng_seed=3)
print("\nper-variant consistency:")
for r in records:
    print(f"  {r.kind.value:18s} {r.consistency:.4f}")
print("summary:", rb.summarize_robustness(records))
