"""JSON-over-HTTP annotation service.

Routes: POST /api/login, GET /api/tasks?annotator=..., GET /api/tasks/{id},
POST /api/tasks/{id}/annotation, GET /api/agreement, GET /api/export,
GET /api/study-config, GET /api/health. Login is by study code only;
identity travels as a signed opaque bearer token. Built UI assets, when
present, are served at /.
"""

from __future__ import annotations

import hashlib
import hmac
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal

from fastapi import Depends, FastAPI, Header, HTTPException
from pydantic import BaseModel, Field

from ..agreement import fleiss_kappa, percent_agreement, spearman
from .store import AnnotationStore

DIMENSIONS = ("hazard", "location", "timeline", "intensity")

SpecLabel = Literal["yes", "no", "na"]


class SpecificityLabels(BaseModel):
    hazard: SpecLabel
    location: SpecLabel
    timeline: SpecLabel
    intensity: SpecLabel


class HumanAnnotation(BaseModel):
    """The submitted form payload; `submitted_at` is always server-assigned."""

    specificity: SpecificityLabels
    relevance: int = Field(ge=1, le=10)
    context_used_docs: list[bool] = Field(min_length=5, max_length=5)
    context_used_overall: int = Field(ge=1, le=10)
    confidence: int = Field(ge=1, le=10)
    comment: str | None = None


STUDY_CONFIG = {
    "specificity_guidance": {
        "yes": "The detail is mentioned in the answer AND supported by the retrieved sources.",
        "no": "The detail is mentioned but the sources do not verify it (or contradict it).",
        "na": "The detail is not mentioned in the answer at all.",
    },
    "relevance_guidance": "How well does the answer address the question? 1 = unrelated, 10 = fully on point.",
    "context_guidance": "Mark each retrieved source actually used by the answer, then rate overall context use 1-10.",
    "confidence_guidance": "How confident are you in this evaluation? 1 = guessing, 10 = certain.",
    "dimensions": list(DIMENSIONS),
    "scale_min": 1,
    "scale_max": 10,
    "source_count": 5,
}


def sign_token(annotator_id: str, secret: str) -> str:
    digest = hmac.new(secret.encode(), annotator_id.encode(), hashlib.sha256).hexdigest()
    return f"{annotator_id}.{digest}"


def verify_token(token: str, secret: str) -> str:
    annotator_id, _, digest = token.rpartition(".")
    if not annotator_id or not hmac.compare_digest(
            digest, hmac.new(secret.encode(), annotator_id.encode(), hashlib.sha256).hexdigest()):
        raise HTTPException(status_code=401, detail="invalid token")
    return annotator_id


def _pairs(store: AnnotationStore) -> list[tuple[dict, dict]]:
    pairs = []
    for _, records in sorted(store.by_question().items()):
        if len(records) >= 2:
            pairs.append((records[0], records[1]))
    return pairs


def agreement_report(store: AnnotationStore) -> dict:
    """Inter-annotator and human-vs-automated agreement for the study."""
    pairs = _pairs(store)
    report: dict = {"n_double_annotated": len(pairs)}
    if not pairs:
        return report

    human: dict = {}
    for dim in DIMENSIONS:
        a = [p[0]["annotation"]["specificity"][dim] for p in pairs]
        b = [p[1]["annotation"]["specificity"][dim] for p in pairs]
        agree = sum(1 for x, y in zip(a, b) if x == y)
        matrix = []
        for x, y in zip(a, b):
            row = [0, 0, 0]
            for label in (x, y):
                row[("yes", "no", "na").index(label)] += 1
            matrix.append(row)
        kappa = fleiss_kappa(matrix) if len(matrix) >= 2 else None
        human[dim] = {
            "agree": agree,
            "disagree": len(pairs) - agree,
            "percent": 100.0 * percent_agreement(a, b),
            "fleiss_kappa": kappa,
        }
    report["human_human"] = human

    if len(pairs) >= 3:
        rel_a = [p[0]["annotation"]["relevance"] for p in pairs]
        rel_b = [p[1]["annotation"]["relevance"] for p in pairs]
        ctx_a = [p[0]["annotation"]["context_used_overall"] for p in pairs]
        ctx_b = [p[1]["annotation"]["context_used_overall"] for p in pairs]
        rho, p = spearman(rel_a, rel_b)
        report["relevance_spearman"] = {"rho": rho, "p_value": p}
        rho, p = spearman(ctx_a, ctx_b)
        report["context_spearman"] = {"rho": rho, "p_value": p}

    automated = {
        qid: q["automated"] for qid, q in store.questions.items() if q.get("automated")
    }
    if automated:
        rows = [r for r in store.export() if r["question_id"] in automated]
        if rows:
            auto_block: dict = {}
            for dim in DIMENSIONS:
                human_labels = [r["annotation"]["specificity"][dim] for r in rows]
                auto_labels = [automated[r["question_id"]]["specificity"][dim] for r in rows]
                agree = sum(1 for x, y in zip(human_labels, auto_labels) if x == y)
                auto_block[dim] = {
                    "agree": agree,
                    "disagree": len(rows) - agree,
                    "percent": 100.0 * percent_agreement(human_labels, auto_labels),
                }
            report["human_automated"] = auto_block
            if len(rows) >= 3:
                if all("relevance" in automated[r["question_id"]] for r in rows):
                    rho, p = spearman(
                        [r["annotation"]["relevance"] for r in rows],
                        [automated[r["question_id"]]["relevance"] for r in rows],
                    )
                    report["human_automated_relevance_spearman"] = {"rho": rho, "p_value": p}
                if all("cu" in automated[r["question_id"]] for r in rows):
                    rho, p = spearman(
                        [r["annotation"]["context_used_overall"] for r in rows],
                        [automated[r["question_id"]]["cu"] for r in rows],
                    )
                    report["human_automated_cu_spearman"] = {"rho": rho, "p_value": p}
    return report


def create_app(
    study_path: Path,
    log_path: Path,
    secret: str = "",
    static_dir: Path | None = None,
) -> FastAPI:
    store = AnnotationStore(study_path, log_path)
    secret = secret or f"study-{store.study['study_id']}"
    app = FastAPI(title="hazeval annotation service")

    def identity(authorization: str = Header(default="")) -> str:
        if not authorization.startswith("Bearer "):
            raise HTTPException(status_code=401, detail="missing bearer token")
        return verify_token(authorization.removeprefix("Bearer "), secret)

    @app.get("/api/health")
    def health():
        return {"status": "ok", "study_id": store.study["study_id"]}

    @app.get("/api/study-config")
    def study_config():
        return STUDY_CONFIG

    @app.post("/api/login")
    def login(body: dict):
        code = str(body.get("code", ""))
        annotator = store.annotator_by_code(code)
        if annotator is None:
            raise HTTPException(status_code=401, detail="unknown study code")
        return {
            "token": sign_token(annotator["annotator_id"], secret),
            "annotator_id": annotator["annotator_id"],
            "display_name": annotator.get("display_name", annotator["annotator_id"]),
        }

    @app.get("/api/tasks")
    def tasks(annotator: str, caller: str = Depends(identity)):
        if caller != annotator:
            raise HTTPException(status_code=403, detail="token does not match annotator")
        return {"annotator_id": annotator, "tasks": store.tasks_for(annotator)}

    @app.get("/api/tasks/{task_id}")
    def task_detail(task_id: str, caller: str = Depends(identity)):
        task = store.tasks.get(task_id)
        if task is None:
            raise HTTPException(status_code=404, detail=f"unknown task {task_id!r}")
        if task["annotator_id"] != caller:
            raise HTTPException(status_code=403, detail="task belongs to another annotator")
        question = store.questions[task["question_id"]]
        return {
            "task_id": task_id,
            "question_id": task["question_id"],
            "status": store.status(task_id),
            "payload": question["payload"],
            "existing_annotation": store.annotation(task_id),
        }

    @app.post("/api/tasks/{task_id}/annotation")
    def submit(task_id: str, annotation: HumanAnnotation, caller: str = Depends(identity)):
        task = store.tasks.get(task_id)
        if task is None:
            raise HTTPException(status_code=404, detail=f"unknown task {task_id!r}")
        if task["annotator_id"] != caller:
            raise HTTPException(status_code=403, detail="task belongs to another annotator")
        submitted_at = datetime.now(timezone.utc).isoformat()
        record = store.append(task_id, annotation.model_dump(), submitted_at)
        return {"task_id": task_id, "status": "done", "seq": record["seq"]}

    @app.get("/api/agreement")
    def agreement():
        return agreement_report(store)

    @app.get("/api/export")
    def export(format: str = "json"):
        records = store.export()
        if format == "jsonl":
            from fastapi.responses import PlainTextResponse

            body = "\n".join(json.dumps(r, ensure_ascii=False) for r in records)
            return PlainTextResponse(body + ("\n" if body else ""),
                                     media_type="application/x-ndjson")
        return {"records": records}

    if static_dir is not None and Path(static_dir).exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def annotation_schema() -> dict:
    """JSON schema of the submit body; the UI contract test validates against it."""
    return HumanAnnotation.model_json_schema()


if __name__ == "__main__":
    print(json.dumps(annotation_schema(), indent=2))
