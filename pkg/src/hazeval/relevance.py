"""Answer relevance: masked inverse-question similarity and segment attribution.

The masked relevance score regenerates candidate questions from a masked copy
of the answer (domain surface forms replaced by placeholders) and averages
their embedding cosine with the original question. Leave-one-out reranker
attribution measures each segment's marginal contribution

    delta_i = R(q, a) - R(q, a_minus_i)

and reorders segments by descending delta, intro first. A negative delta
means the segment was detrimental to overall relevance.
"""

from __future__ import annotations

import difflib
import json
import re
from dataclasses import dataclass

from .dataset import StructuredAnswer
from .errors import SchemaError
from .gateway import ChatRequest, JUDGE_TEMPERATURE, Provider

ALLOWED_PLACEHOLDERS = ("[HAZARD]", "[PROFESSION]", "[CONCERN]", "[INFRASTRUCTURE]")

_ANY_PLACEHOLDER = re.compile(r"\[[A-Z]+\]")

MASK_PROMPT = """\
You are a semantic masker. Given the following answer, replace:

- hazard types with [HAZARD]
- profession-related terms with [PROFESSION]
- concern with [CONCERN] (e.g., critical vulnerabilities, maintenance strategies, modernization measures, projected impact, design standards, cascading impacts etc.)
- infrastructure with [INFRASTRUCTURE] (e.g., "highway network", "bridge system", "public transit system", "railway infrastructure", "airport facilities", "port facilities", "freight terminals", "traffic control systems", "water treatment plant", "wastewater system", "dam infrastructure", "stormwater system", "coastal protection", "water distribution network", "electrical grid", "power distribution network", "EV charging network", "renewable energy infrastructure", "energy storage facilities", "power transmission lines", "substations", "public buildings", "critical facilities", "commercial structures", etc.)

Keep the structure natural and readable.

Answer: {answer}"""

INVERT_PROMPT = """\
You are an inverse question generator. Generate {n} candidate questions for which the answer below would be an appropriate answer.
Return ONLY a JSON array of exactly {n} question strings.

Answer:
{answer}"""

REPAIR_SUFFIX = (
    "\n\nYour previous reply was not valid for the required format. "
    "Reply again following the instructions exactly."
)


@dataclass(frozen=True)
class MaskedAnswer:
    text: str
    replacements: tuple[tuple[str, str], ...]  # (surface form, placeholder)


@dataclass(frozen=True)
class SegmentAttribution:
    segment_index: int
    delta: float
    full_score: float


@dataclass(frozen=True)
class RerankedAnswer:
    order: tuple[int, ...]
    changed: bool
    full_score: float


def _derive_replacements(original: str, masked: str) -> list[tuple[str, str]]:
    """Word-level diff: spans replaced by a single placeholder token."""
    orig_words = original.split()
    masked_words = masked.split()
    replacements = []
    matcher = difflib.SequenceMatcher(a=orig_words, b=masked_words, autojunk=False)
    for op, i1, i2, j1, j2 in matcher.get_opcodes():
        if op != "replace":
            continue
        new_span = " ".join(masked_words[j1:j2])
        placeholder = next((p for p in ALLOWED_PLACEHOLDERS if p in new_span), None)
        if placeholder is not None:
            surface = " ".join(orig_words[i1:i2]).strip(".,;:")
            if surface:
                replacements.append((surface, placeholder))
    return replacements


def mask_answer(answer: StructuredAnswer, chat: Provider) -> MaskedAnswer:
    """Mask domain surface forms; placeholders outside the allowed set are rejected."""
    text = answer.full_text()
    if not text.strip():
        raise ValueError("answer is empty")
    prompt = MASK_PROMPT.format(answer=text)

    def validate(reply: str) -> str:
        found = _ANY_PLACEHOLDER.findall(reply)
        bad = [p for p in found if p not in ALLOWED_PLACEHOLDERS]
        if bad:
            raise ValueError(f"masker used invalid placeholders {sorted(set(bad))}")
        return reply.strip()

    request = ChatRequest.user(prompt, temperature=JUDGE_TEMPERATURE)
    try:
        masked = validate(chat.chat(request))
    except ValueError:
        retry = ChatRequest.user(prompt + REPAIR_SUFFIX, temperature=JUDGE_TEMPERATURE)
        try:
            masked = validate(chat.chat(retry))
        except ValueError as exc:
            raise SchemaError(f"masker failed after retry: {exc}") from exc

    replacements = _derive_replacements(text, masked)
    # A surface the model masked once must not survive elsewhere in the text.
    for surface, placeholder in replacements:
        masked = re.sub(re.escape(surface), placeholder, masked, flags=re.IGNORECASE)
    return MaskedAnswer(text=masked, replacements=tuple(replacements))


def invert_questions(answer_text: str, n: int, chat: Provider) -> list[str]:
    """Exactly n candidate questions from a strict JSON-array reply."""
    if n < 1:
        raise ValueError("n must be >= 1")
    prompt = INVERT_PROMPT.format(n=n, answer=answer_text)

    def validate(reply: str) -> list[str]:
        data = json.loads(reply)
        if not isinstance(data, list) or len(data) != n:
            raise ValueError(f"expected a JSON array of exactly {n} strings")
        questions = [str(q).strip() for q in data]
        if any(not q for q in questions):
            raise ValueError("empty question in reply")
        return questions

    request = ChatRequest.user(prompt, temperature=JUDGE_TEMPERATURE)
    try:
        return validate(chat.chat(request))
    except (ValueError, json.JSONDecodeError):
        pass
    retry = ChatRequest.user(prompt + REPAIR_SUFFIX, temperature=JUDGE_TEMPERATURE)
    try:
        return validate(chat.chat(retry))
    except (ValueError, json.JSONDecodeError) as exc:
        raise SchemaError(f"inverse question generation failed after retry: {exc}") from exc


def masked_relevance(question: str, answer: StructuredAnswer, n: int,
                     chat: Provider, embed: Provider, masked: bool = True) -> float:
    """Mean cosine between the question and n regenerated candidate questions.

    With masked=False the candidates come from the raw answer instead
    (the unmasked comparison variant).
    """
    if not question.strip():
        raise ValueError("question is empty")
    source = mask_answer(answer, chat).text if masked else answer.full_text()
    candidates = invert_questions(source, n, chat)
    vectors = embed.embed([question] + candidates)
    qv = vectors[0]
    sims = [float(qv @ cv) for cv in vectors[1:]]
    return sum(sims) / len(sims)


def loo_attribution(question: str, answer: StructuredAnswer, rerank: Provider) -> list[SegmentAttribution]:
    """Marginal reranker contribution of each segment; m+1 rerank calls total.

    Removing the only segment of an intro-less answer leaves nothing to score;
    that empty rendering is scored 0.0 without a provider call.
    """
    m = len(answer.segments)
    if m < 1:
        raise ValueError("answer has no segments")
    full = rerank.rerank(question, answer.rendered())
    out = []
    for i in range(m):
        reduced = answer.rendered(skip=i)
        score = rerank.rerank(question, reduced) if reduced.strip() else 0.0
        out.append(SegmentAttribution(segment_index=i, delta=full - score, full_score=full))
    return out


def rerank_answer(answer: StructuredAnswer, attributions: list[SegmentAttribution]) -> RerankedAnswer:
    """Sort segments by descending delta (stable on ties); intro stays first."""
    m = len(answer.segments)
    indices = sorted(a.segment_index for a in attributions)
    if indices != list(range(m)):
        raise ValueError("attributions do not cover the answer segments exactly")
    by_index = {a.segment_index: a.delta for a in attributions}
    order = tuple(sorted(range(m), key=lambda i: (-by_index[i], i)))
    return RerankedAnswer(
        order=order,
        changed=order != tuple(range(m)),
        full_score=attributions[0].full_score if attributions else 0.0,
    )
