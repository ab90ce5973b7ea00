"""Exact cosine retrieval over a small abstract corpus.

The index embeds every document once, normalizes the vectors, and answers
queries by exact nearest-neighbor search (ties broken by doc_id so results
are reproducible).
"""

from hazeval.corpus import build_index
from hazeval.gateway import Provider, ProviderProfile
from hazeval.mock import DeterministicMockBackend

embedder = Provider(
    ProviderProfile(name="demo-embed", model_id="mock-embed",
                    capabilities=frozenset({"embed"})),
    DeterministicMockBackend(seed=3),
)

corpus = [
    ("d1", "Wildfire smoke degrades transmission line capacity in dry seasons."),
    ("d2", "Hurricane storm surge floods substations near the coast."),
    ("d3", "Cold waves freeze water mains and burst service pipes."),
    ("d4", "Drought lowers reservoir intakes below pump thresholds."),
    ("d5", "Heat waves push peak cooling loads past feeder ratings."),
    ("d6", "Ice storms snap distribution poles under glaze loading."),
]

index = build_index(corpus, embedder.embed, embedder_id="mock-embed")
print("index size:", len(index), "dimension:", index.dimension)

for query in ("wildfire transmission risk", "flooded substations after a storm"):
    print(f"\nquery: {query}")
    for result in index.retrieve(query, k=3):
        print(f"  {result.doc_id}  score={result.score:.4f}  {index.doc(result.doc_id).body[:60]}")
