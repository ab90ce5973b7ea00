"""Annotation study: assignment, submission, agreement analytics.

Builds a small double-coverage study, exercises the HTTP API in-process, and
prints the agreement report. The same study file drives the live service:

    hazeval serve --study study.json --annotations log.jsonl --static frontend/dist
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from hazeval.annotation.assign import build_study
from hazeval.annotation.service import create_app

work = Path(tempfile.mkdtemp(prefix="hazeval-study-"))

questions = [
    {
        "question_id": f"q{i}",
        "payload": {
            "profile": {"profession": "Stormwater Engineer", "hazard": "coastal flooding"},
            "question": f"Demo question {i}?",
            "answer_intro": "Short intro.",
            "answer_segments": ["Point one.", "Point two."],
            "sources": [{"doc_id": f"s{j}", "body": f"Source {j}."} for j in range(5)],
        },
        "automated": {
            "specificity": {"hazard": "yes", "location": "no", "timeline": "na", "intensity": "na"},
            "relevance": 0.5 + 0.05 * i,
            "cu": 0.002 * (i + 1),
        },
    }
    for i in range(8)
]
annotators = [
    {"annotator_id": f"ann{i}", "display_name": f"Annotator {i}", "study_code": f"code-{i}"}
    for i in range(4)
]

study = build_study("demo-study", questions, annotators, redundancy=2, seed=1)
study_path = work / "study.json"
study_path.write_text(json.dumps(study, indent=2))
print("tasks per annotator:",
      {a["annotator_id"]: sum(1 for t in study["tasks"] if t["annotator_id"] == a["annotator_id"])
       for a in annotators})

client = TestClient(create_app(study_path, work / "log.jsonl", secret="demo"))

for i, annotator in enumerate(annotators):
    login = client.post("/api/login", json={"code": f"code-{i}"}).json()
    headers = {"Authorization": f"Bearer {login['token']}"}
    tasks = client.get("/api/tasks", params={"annotator": login["annotator_id"]},
                       headers=headers).json()["tasks"]
    for j, task in enumerate(tasks):
        body = {
            "specificity": {"hazard": "yes", "location": "yes" if j % 2 else "no",
                            "timeline": "na", "intensity": "na"},
            "relevance": 4 + (i + j) % 6,
            "context_used_docs": [True, True, False, True, False],
            "context_used_overall": 5 + j % 4,
            "confidence": 8,
            "comment": "demo submission",
        }
        response = client.post(f"/api/tasks/{task['task_id']}/annotation",
                               json=body, headers=headers)
        response.raise_for_status()

report = client.get("/api/agreement").json()
print("\nagreement report:")
print(json.dumps(report, indent=2)[:1200])
