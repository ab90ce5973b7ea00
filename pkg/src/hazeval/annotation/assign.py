"""Double-coverage task assignment for annotation studies.

Round-robin over a seed-shuffled annotator ring: every question is covered by
exactly `redundancy` distinct annotators, per-annotator loads differ by at
most one, and the same seed always produces the same assignment.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..errors import ConfigurationError


@dataclass(frozen=True)
class AnnotationTask:
    task_id: str
    question_id: str
    annotator_id: str


def assign_tasks(
    question_ids: list[str],
    annotator_ids: list[str],
    redundancy: int = 2,
    seed: int = 0,
) -> list[AnnotationTask]:
    if not question_ids or not annotator_ids:
        raise ConfigurationError("need at least one question and one annotator")
    if redundancy < 1:
        raise ConfigurationError("redundancy must be >= 1")
    if redundancy > len(annotator_ids):
        raise ConfigurationError(
            f"redundancy {redundancy} exceeds annotator count {len(annotator_ids)}")
    if len(set(question_ids)) != len(question_ids):
        raise ConfigurationError("question ids must be unique")
    if len(set(annotator_ids)) != len(annotator_ids):
        raise ConfigurationError("annotator ids must be unique")

    rng = random.Random(f"assign:{seed}")
    questions = list(question_ids)
    annotators = list(annotator_ids)
    rng.shuffle(questions)
    rng.shuffle(annotators)

    tasks: list[AnnotationTask] = []
    pointer = 0
    ring = len(annotators)
    for question_id in questions:
        for j in range(redundancy):
            tasks.append(AnnotationTask(
                task_id=f"t{len(tasks):04d}",
                question_id=question_id,
                annotator_id=annotators[(pointer + j) % ring],
            ))
        pointer = (pointer + redundancy) % ring
    return tasks


def build_study(
    study_id: str,
    questions: list[dict],
    annotators: list[dict],
    redundancy: int = 2,
    seed: int = 0,
) -> dict:
    """Assemble the study document the annotation service serves.

    `questions` entries need question_id and payload (profile, question,
    answer intro and segments, the five retrieved sources) and may carry an
    `automated` block with the machine scores for human-vs-automated analysis.
    `annotators` entries need annotator_id, display_name and study_code.
    """
    tasks = assign_tasks(
        [q["question_id"] for q in questions],
        [a["annotator_id"] for a in annotators],
        redundancy=redundancy,
        seed=seed,
    )
    return {
        "study_id": study_id,
        "redundancy": redundancy,
        "seed": seed,
        "annotators": annotators,
        "questions": questions,
        "tasks": [
            {"task_id": t.task_id, "question_id": t.question_id, "annotator_id": t.annotator_id}
            for t in tasks
        ],
    }
