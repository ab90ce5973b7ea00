"""Durable annotation storage: append-only JSONL log plus a rebuilt view.

Every acknowledged submission is one fsynced log line; the in-memory view is
reconstructed by replaying the log, so a crash between append and view update
loses nothing. Resubmission appends a new line (the full audit trail stays)
and the view keeps the latest record per task.
"""

from __future__ import annotations

import json
import os
from pathlib import Path


class AnnotationStore:
    def __init__(self, study_path: Path, log_path: Path):
        self.study = json.loads(Path(study_path).read_text(encoding="utf-8"))
        self.log_path = Path(log_path)
        self.tasks = {t["task_id"]: t for t in self.study["tasks"]}
        self.questions = {q["question_id"]: q for q in self.study["questions"]}
        self.annotators = {a["annotator_id"]: a for a in self.study["annotators"]}
        self._view: dict[str, dict] = {}
        self._seq = 0
        self._replay()

    def _replay(self) -> None:
        if not self.log_path.exists():
            return
        with self.log_path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                self._view[record["task_id"]] = record
                self._seq = max(self._seq, record.get("seq", 0))

    def append(self, task_id: str, annotation: dict, submitted_at: str) -> dict:
        if task_id not in self.tasks:
            raise KeyError(f"unknown task {task_id!r}")
        self._seq += 1
        record = {
            "seq": self._seq,
            "task_id": task_id,
            "annotator_id": self.tasks[task_id]["annotator_id"],
            "question_id": self.tasks[task_id]["question_id"],
            "annotation": annotation,
            "submitted_at": submitted_at,
        }
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        with self.log_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self._view[task_id] = record
        return record

    def status(self, task_id: str) -> str:
        return "done" if task_id in self._view else "pending"

    def annotation(self, task_id: str) -> dict | None:
        record = self._view.get(task_id)
        return record["annotation"] if record else None

    def tasks_for(self, annotator_id: str) -> list[dict]:
        return [
            {"task_id": t["task_id"], "question_id": t["question_id"], "status": self.status(t["task_id"])}
            for t in self.study["tasks"]
            if t["annotator_id"] == annotator_id
        ]

    def export(self) -> list[dict]:
        """Latest record per task, log order: the study's annotation export."""
        return [self._view[t["task_id"]] for t in self.study["tasks"] if t["task_id"] in self._view]

    def by_question(self) -> dict[str, list[dict]]:
        """Done annotations grouped per question, sorted by annotator for determinism."""
        grouped: dict[str, list[dict]] = {}
        for record in self.export():
            grouped.setdefault(record["question_id"], []).append(record)
        for records in grouped.values():
            records.sort(key=lambda r: r["annotator_id"])
        return grouped

    def annotator_by_code(self, code: str) -> dict | None:
        for annotator in self.study["annotators"]:
            if annotator.get("study_code") == code:
                return annotator
        return None
