"""Specificity scoring: claims, details, judge panel, weighted aggregate.

Each answer is decomposed into atomic claims; hazard/location/timeline/
intensity mentions are extracted per claim; a panel of judges labels every
claim-dimension pair yes/no/N/A against the retrieved evidence; majority
voting and n/a-aware averaging feed the weighted final score.
"""

from hazeval import specificity as sp
from hazeval.dataset import parse_answer
from hazeval.gateway import Provider, ProviderProfile
from hazeval.mock import DeterministicMockBackend

provider = Provider(
    ProviderProfile(name="demo", model_id="mock-chat", capabilities=frozenset({"chat"})),
    DeterministicMockBackend(seed=5),
)

answer = parse_answer(
    "Findings for the grid operator.\n"
    "1. heat wave events overload substations in Cook, IL.\n"
    "2. Upgrades over the next 20 years reduce severe outage risk.\n"
    "Confidence: 80% from the abstracts."
)
evidence = [
    "Utility records for Cook, IL show heat wave stress on substations.",
    "Severe summer peaks shorten transformer life in the Midwest.",
]

# Three judge slots; here the same deterministic provider sampled three times.
report = sp.score_answer(answer, evidence, judges=[provider] * 3, answer_id="demo-q1")
print("claims:")
for claim, detail, vector in zip(report.claims, report.details, report.consensus):
    print(" ", claim.text)
    print("   details:", {k: v for k, v in detail.as_dict().items() if v})
    print("   consensus:", vector.values)
print("dimension averages:", report.averages)
print("final specificity score:", report.score)

# The aggregation formula itself, on hand-made averages: undefined dimensions
# drop out of both the numerator and denominator.
print("\naggregate({hazard: 1.0, location: 0.0}) =", sp.aggregate({"hazard": 1.0, "location": 0.0}))
print("aggregate({hazard: 0.5}) =", sp.aggregate({"hazard": 0.5}))
