"""Answer-consistency probes: paraphrase and hazard/location perturbation.

Paraphrased questions should produce semantically consistent answers (higher
cosine is better); perturbed questions change the facts, so a well-behaved
system produces different answers (lower cosine is better). Consistency is
the cosine of whole-answer embeddings with the confidence line excluded.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .dataset import (
    HazardKind,
    HazardLocationTable,
    QuestionRecord,
    QuestionTemplate,
    StructuredAnswer,
    UserProfile,
    instantiate_question,
    load_hazard_table,
    load_templates,
)
from .gateway import ChatRequest, Provider


class VariantKind(str, Enum):
    PARAPHRASE = "paraphrase"
    PERTURB_HAZARD = "perturb_hazard"
    PERTURB_LOCATION = "perturb_location"
    PERTURB_BOTH = "perturb_both"


PERTURBATION_KINDS = (
    VariantKind.PERTURB_HAZARD, VariantKind.PERTURB_LOCATION, VariantKind.PERTURB_BOTH,
)

PARAPHRASE_PROMPT = """\
Rephrase the question below while preserving its semantic meaning.
Return only the rephrased question, nothing else.

Question: {question}"""


@dataclass(frozen=True)
class RobustnessRecord:
    question_id: str
    kind: VariantKind
    variant_question: str
    variant_answer: StructuredAnswer
    consistency: float


def _canon(text: str) -> str:
    return " ".join(text.lower().split())


def paraphrase_question(q: str, chat: Provider) -> str:
    """Rephrase q; must differ case/whitespace-insensitively (one retry)."""
    if not q.strip():
        raise ValueError("question is empty")
    request = ChatRequest.user(PARAPHRASE_PROMPT.format(question=q))
    for attempt in range(2):
        reply = chat.chat(request).strip()
        if reply and _canon(reply) != _canon(q):
            return reply
        request = ChatRequest.user(
            PARAPHRASE_PROMPT.format(question=q)
            + "\n\nYour previous attempt was identical to the original. Produce a different wording."
        )
    raise ValueError("paraphrase provider returned the identical question twice")


def perturb_question(
    record: QuestionRecord,
    table: HazardLocationTable | None,
    kind: VariantKind,
    rng_seed: int,
    templates: list[QuestionTemplate] | None = None,
) -> QuestionRecord:
    """Alter hazard and/or location, then re-instantiate the template.

    The perturbed (hazard, location) pair always stays consistent with the
    table: a hazard-only perturbation keeps the original location when the new
    hazard covers it and otherwise resamples from the new hazard's list.
    """
    if kind == VariantKind.PARAPHRASE:
        raise ValueError("paraphrase is not a perturbation kind")
    table = table or load_hazard_table()
    templates = templates or load_templates()
    rng = random.Random(f"perturb:{rng_seed}:{record.id}:{kind.value}")
    profile = record.profile

    hazard = profile.hazard
    location = profile.location
    if kind in (VariantKind.PERTURB_HAZARD, VariantKind.PERTURB_BOTH):
        hazard = rng.choice([h for h in HazardKind if h != profile.hazard])
    if kind == VariantKind.PERTURB_HAZARD:
        if location not in table.locations(hazard):
            location = rng.choice(table.locations(hazard))
    if kind in (VariantKind.PERTURB_LOCATION, VariantKind.PERTURB_BOTH):
        candidates = [loc for loc in table.locations(hazard) if loc != profile.location]
        if not candidates:
            raise ValueError(f"no alternative location for hazard {hazard.value!r}")
        location = rng.choice(candidates)

    new_profile = UserProfile(
        profession=profile.profession,
        sector=profile.sector,
        concern_kind=profile.concern_kind,
        hazard=hazard,
        location=location,
        timeline_years=profile.timeline_years,
    )
    template = next((t for t in templates if t.id == record.template_id), None)
    if template is None:
        raise ValueError(f"template {record.template_id!r} not found")
    return instantiate_question(
        new_profile, template, record.infrastructure,
        record_id=f"{record.id}-{kind.value}",
    )


def consistency_score(a: StructuredAnswer, b: StructuredAnswer, embed: Provider) -> float:
    """Cosine similarity of whole-answer embeddings (confidence excluded)."""
    text_a = a.full_text()
    text_b = b.full_text()
    if not text_a.strip() or not text_b.strip():
        raise ValueError("cannot score an empty answer")
    va, vb = embed.embed([text_a, text_b])
    return float(va @ vb)


def run_robustness(
    record: QuestionRecord,
    original_answer: StructuredAnswer,
    answer_fn: Callable[[QuestionRecord], StructuredAnswer],
    chat: Provider,
    embed: Provider,
    kinds: tuple[VariantKind, ...] = tuple(VariantKind),
    table: HazardLocationTable | None = None,
    templates: list[QuestionTemplate] | None = None,
    rng_seed: int = 0,
) -> list[RobustnessRecord]:
    """Produce one variant per requested kind and score answer consistency.

    Each variant goes through the full pipeline handle (fresh retrieval and
    generation); the original answer is immutable input.
    """
    out: list[RobustnessRecord] = []
    for kind in kinds:
        if kind == VariantKind.PARAPHRASE:
            variant_text = paraphrase_question(record.question_text, chat)
            variant = QuestionRecord(
                id=f"{record.id}-paraphrase",
                profile=record.profile,
                template_id=record.template_id,
                infrastructure=record.infrastructure,
                question_text=variant_text,
            )
        else:
            variant = perturb_question(record, table, kind, rng_seed, templates=templates)
        answer = answer_fn(variant)
        out.append(RobustnessRecord(
            question_id=record.id,
            kind=kind,
            variant_question=variant.question_text,
            variant_answer=answer,
            consistency=consistency_score(original_answer, answer, embed),
        ))
    return out


def summarize_robustness(records: list[RobustnessRecord]) -> dict[str, float | None]:
    """Two-column summary: paraphrase mean (higher better), perturbation mean (lower better)."""
    para = [r.consistency for r in records if r.kind == VariantKind.PARAPHRASE]
    pert = [r.consistency for r in records if r.kind != VariantKind.PARAPHRASE]
    return {
        "paraphrase": sum(para) / len(para) if para else None,
        "perturbation": sum(pert) / len(pert) if pert else None,
    }
