"""Answer relevance: masking, inverse questions, leave-one-out reranking.

Masked relevance regenerates candidate questions from a masked copy of the
answer (hazard, profession, concern and infrastructure surface forms become
placeholders) and averages their cosine with the original question. The
reranker attribution removes one segment at a time, measures the score drop,
and reorders segments by contribution.
"""

from hazeval import relevance as rv
from hazeval.dataset import parse_answer
from hazeval.gateway import Provider, ProviderProfile
from hazeval.mock import DeterministicMockBackend

backend = DeterministicMockBackend(seed=11)
chat = Provider(ProviderProfile(name="chat", model_id="mock",
                                capabilities=frozenset({"chat"})), backend)
embed = Provider(ProviderProfile(name="embed", model_id="mock",
                                 capabilities=frozenset({"embed"})), backend)
rerank = Provider(ProviderProfile(name="rerank", model_id="mock",
                                  capabilities=frozenset({"rerank"})), backend)

question = "What are the critical vulnerabilities of electrical grid to wildfire in San Diego, CA?"
answer = parse_answer(
    "Summary for the grid operator.\n"
    "1. wildfire heat sags conductors on the electrical grid.\n"
    "2. Vegetation management reduces ignition near lines.\n"
    "3. Recipes for sourdough bread improve crust flavor.\n"
    "Confidence: 75% grounded in the abstracts."
)

masked = rv.mask_answer(answer, chat)
print("masked answer:\n", masked.text, sep="")
print("replacements:", list(masked.replacements))

questions = rv.invert_questions(masked.text, 5, chat)
print("\nregenerated questions:")
for q in questions:
    print("  -", q)

score = rv.masked_relevance(question, answer, 5, chat, embed)
print("\nmasked relevance:", round(score, 4))

attributions = rv.loo_attribution(question, answer, rerank)
print("\nsegment attribution (delta = contribution to the full score):")
for a in attributions:
    print(f"  segment {a.segment_index}: delta={a.delta:+.1f}")
reranked = rv.rerank_answer(answer, attributions)
print("reordered segments:", reranked.order, "changed:", reranked.changed)
