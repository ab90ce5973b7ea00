"""End-to-end run: dataset, retrieval, answers, all metrics, aggregate report.

Everything below runs offline against the deterministic mock backend. The same
config JSON drives the CLI:

    hazeval evaluate --config run.json
    hazeval report --rows out/report_rows.jsonl

Re-running with a warm cache directory replays every provider response, so
the report is reproduced byte for byte with zero provider calls.
"""

import json
import tempfile
from pathlib import Path

from hazeval.pipeline import RunConfig, run

work = Path(tempfile.mkdtemp(prefix="hazeval-demo-"))

corpus_path = work / "corpus.jsonl"
with corpus_path.open("w") as fh:
    topics = [
        ("wildfire", "San Diego, CA", "conductor sag on transmission spans"),
        ("hurricane", "Miami-Dade, FL", "storm surge at coastal substations"),
        ("drought", "Kern, CA", "reservoir intakes below pump thresholds"),
        ("heat wave", "Cook, IL", "peak cooling loads past feeder ratings"),
        ("ice storm", "Tulsa, OK", "glaze loading on distribution poles"),
        ("cold wave", "Hennepin, MN", "frozen water mains and burst pipes"),
        ("coastal flooding", "Bergen, NJ", "saltwater intrusion in switchgear"),
    ]
    for i in range(21):
        hazard, place, finding = topics[i % 7]
        fh.write(json.dumps({
            "doc_id": f"doc{i:03d}",
            "body": f"Abstract {i}. Over 20 years, {hazard} caused {finding} in {place}. "
                    f"Severe episodes doubled maintenance budgets.",
        }) + "\n")

config = RunConfig.from_dict({
    "seed": 11,
    "count": 4,
    "corpus_path": str(corpus_path),
    "output_dir": str(work / "out"),
    "cache_dir": str(work / "cache"),
    "parallelism": 4,
    "providers": {
        "mock": {"backend": "mock", "mock_seed": 2, "model_id": "mock-v1",
                 "capabilities": ["chat", "embed", "rerank", "score"]},
    },
    "roles": {"generator": "mock", "evaluator": "mock", "embed": "mock",
              "rerank": "mock", "score": "mock"},
})

result = run(config)
print("rows with errors:", result.error_count)
print("provider calls (cold):", result.provider_calls)

for row in result.rows:
    print(f"\n{row['id']}: {row['question'][:70]}")
    print("  specificity:", row["specificity"]["score"])
    print("  robustness: para", round(row["robustness"]["paraphrase"], 3),
          "pert", round(row["robustness"]["perturbation"], 3))
    print("  relevance:", round(row["relevance"]["masked_relevance"], 3),
          "changed:", row["relevance"]["changed"])
    print("  CU:", round(row["context_utilization"]["cu"], 5))
    print("  FRE:", round(row["readability"]["fre"], 1))

print("\naggregate metrics:")
for name, block in result.aggregate["metrics"].items():
    print(f"  {name:26s} mean={block['mean']:.4f} std={block['std']:.4f} (n={block['n']})")

# Warm rerun: identical report, zero provider calls.
rerun = run(RunConfig.from_dict({**config.__dict__, "output_dir": str(work / "out2")}))
print("\nprovider calls (warm):", rerun.provider_calls)
print("reports identical:",
      (work / "out" / "report_rows.jsonl").read_bytes()
      == (work / "out2" / "report_rows.jsonl").read_bytes())
