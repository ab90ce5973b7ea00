"""Context utilization: leave-one-out confidence attribution over claims.

Answer confidence is the geometric mean of forced-completion token
probabilities, so it is length-invariant. Removing one context claim at a
time from the conditioning prompt yields that claim's contribution delta; CU
is the mean delta, CU_rel the mean relative delta. Negative deltas flag
distracting context.
"""

import math

from hazeval import context_use as cu
from hazeval.claims import AtomicClaim
from hazeval.gateway import Provider, ProviderProfile, TokenScore


class EffectScorer:
    """Toy scorer: claim markers in the prompt raise every token's logprob."""

    def __init__(self, base=-0.6, effects=None):
        self.base = base
        self.effects = effects or {}

    def raw_score(self, prompt, completion):
        lp = self.base + sum(v for k, v in self.effects.items() if k in prompt)
        return [TokenScore(tok, min(lp, 0.0)) for tok in completion.split()]


scorer = Provider(
    ProviderProfile(name="scorer", model_id="toy", capabilities=frozenset({"score"})),
    EffectScorer(effects={"reservoir": 0.30, "pipeline": 0.10, "orchards": -0.15}),
)

claims = [
    AtomicClaim("c0", "Drought lowers reservoir intake volumes.", "answer"),
    AtomicClaim("c1", "The pipeline network loses pressure in dry years.", "answer"),
    AtomicClaim("c2", "Almond orchards bloom in February.", "answer"),
]
answer_text = "Plan for lower reservoir intake volumes."
question = "How does drought affect the water supply?"

report = cu.cu_scores(answer_text, question, claims, scorer)
print("baseline confidence:", round(report.baseline_confidence, 4))
for c in report.per_claim:
    print(f"  {c.claim_id}: delta={c.delta:+.4f} relative={c.relative:+.4f}")
print("CU:", round(report.cu, 4), " CU_rel:", round(report.cu_rel, 4),
      f"({100 * report.cu_rel:.2f}%)")
print("(negative delta above marks the distracting claim)")

# Length invariance of the geometric mean: constant token probability p gives
# confidence p at any length.
for n in (1, 10, 100):
    scores = [TokenScore(f"t{i}", math.log(0.7)) for i in range(n)]
    print(f"confidence over {n:3d} tokens of p=0.7:",
          round(cu.confidence_from_scores(scores).value, 6))
