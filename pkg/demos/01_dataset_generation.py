"""Generate a synthetic QA dataset: profiles, questions, prompts, parsing.

Profiles come from controlled randomization: a hazard is sampled first, then
a location conditional on that hazard, then profession, concern kind and
timeline from their predefined sets. Question templates are filled from the
profile, and the answer prompt embeds the five retrieved abstracts.
"""

from hazeval import dataset as ds

# One profile per seed; the same seed always reproduces the same profile.
profile = ds.sample_profile(rng_seed=7)
print("profile:", profile.profession, "/", profile.sector.value)
print("hazard:", profile.hazard.value, "at", profile.location.render())
print("concern:", profile.concern_kind.value, "timeline:", profile.timeline_years, "years")

# A full record picks a template matching the profile's concern kind and an
# infrastructure from the profession's sector.
for i in range(5):
    record = ds.generate_record(base_seed=7, index=i)
    print(f"{record.id}: {record.question_text}")

# The grounded answer prompt takes exactly five abstracts.
record = ds.generate_record(base_seed=7, index=0)
docs = [f"Abstract {i}: findings about {record.profile.hazard.value}." for i in range(5)]
prompt = ds.build_answer_prompt(record, docs, record.profile)
print("\n--- answer prompt (first 400 chars) ---")
print(prompt[:400])

# Generated answers are point-wise with a trailing confidence line, which the
# parser strips into its own field.
raw_answer = """Here is a short overview.
1. Substations in the region flood during surge events.
2. Elevating switchgear reduced outages in past storms.
Confidence: 85% based on the abstracts."""
answer = ds.parse_answer(raw_answer)
print("\nintro:", answer.intro)
print("segments:", list(answer.segments))
print("confidence line:", answer.confidence_line)
