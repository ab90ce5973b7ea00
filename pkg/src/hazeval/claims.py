"""Claim extraction: answer decomposition, detail extraction, context claims.

All three operations are LLM-orchestrated with a strict-JSON reply contract:
an invalid reply earns exactly one repair retry before a SchemaError.
Context claims are deduplicated by embedding cosine (first seen wins).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .corpus import DocumentRecord
from .dataset import StructuredAnswer
from .errors import SchemaError
from .gateway import ChatRequest, JUDGE_TEMPERATURE, Provider

DEDUP_COSINE_THRESHOLD = 0.95

DECOMPOSE_PROMPT = """\
You are an information extraction assistant. Break the answer below into atomic claims.
Each claim must be a single, self-contained factual statement taken from the answer.
Return ONLY a JSON array of claim strings, in the order they appear.

Answer:
{answer}"""

DETAILS_PROMPT = """\
Extract the specific details mentioned in the claim below.
For each of hazard, location, timeline and intensity, copy the exact mention from the claim, or use null when the claim does not mention that detail.
Return ONLY a JSON object with keys "hazard", "location", "timeline", "intensity".

Claim:
{claim}"""

CONTEXT_CLAIMS_PROMPT = """\
List the unique, non-redundant factual propositions stated in the document below.
Each proposition must be a single, self-contained statement.
Return ONLY a JSON array of proposition strings.

Document:
{document}"""

REPAIR_SUFFIX = (
    "\n\nYour previous reply was not valid for the required format. "
    "Reply again with ONLY the required JSON and nothing else."
)


@dataclass(frozen=True)
class AtomicClaim:
    claim_id: str
    text: str
    origin: str  # "answer" | "context"
    source_doc_id: str | None = None

    def __post_init__(self):
        if not self.text:
            raise ValueError("claim text is empty")
        if self.origin not in ("answer", "context"):
            raise ValueError(f"unknown claim origin {self.origin!r}")
        if self.origin == "context" and not self.source_doc_id:
            raise ValueError("context claims require a source_doc_id")


@dataclass(frozen=True)
class SpecificDetails:
    hazard: str | None = None
    location: str | None = None
    timeline: str | None = None
    intensity: str | None = None

    def as_dict(self) -> dict[str, str | None]:
        return {
            "hazard": self.hazard,
            "location": self.location,
            "timeline": self.timeline,
            "intensity": self.intensity,
        }


def _chat_json(provider: Provider, prompt: str, validator):
    """One call plus one repair retry; validator raises ValueError to reject."""
    request = ChatRequest.user(prompt, temperature=JUDGE_TEMPERATURE)
    reply = provider.chat(request)
    try:
        return validator(reply)
    except (ValueError, json.JSONDecodeError):
        pass
    retry = ChatRequest.user(prompt + REPAIR_SUFFIX, temperature=JUDGE_TEMPERATURE)
    reply = provider.chat(retry)
    try:
        return validator(reply)
    except (ValueError, json.JSONDecodeError) as exc:
        raise SchemaError(f"model reply failed the JSON contract after retry: {exc}") from exc


def _string_array(reply: str) -> list[str]:
    data = json.loads(reply)
    if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
        raise ValueError("expected a JSON array of strings")
    items = [x.strip() for x in data if x.strip()]
    if not items:
        raise ValueError("expected a non-empty array")
    return items


def decompose_answer(answer: StructuredAnswer, chat: Provider, answer_id: str = "a") -> list[AtomicClaim]:
    """Split an answer into atomic claims (origin=answer, order preserved)."""
    if answer.is_empty():
        raise ValueError("answer has no intro and no segments")
    prompt = DECOMPOSE_PROMPT.format(answer=answer.full_text())
    texts = _chat_json(chat, prompt, _string_array)
    return [
        AtomicClaim(claim_id=f"{answer_id}-c{i}", text=t, origin="answer")
        for i, t in enumerate(texts)
    ]


def extract_details(claim: AtomicClaim, chat: Provider) -> SpecificDetails:
    if not claim.text.strip():
        raise ValueError("claim is empty")
    prompt = DETAILS_PROMPT.format(claim=claim.text)

    def validate(reply: str) -> SpecificDetails:
        data = json.loads(reply)
        if not isinstance(data, dict):
            raise ValueError("expected a JSON object")
        out = {}
        for key in ("hazard", "location", "timeline", "intensity"):
            value = data.get(key)
            if value is not None and not isinstance(value, str):
                raise ValueError(f"detail {key!r} must be a string or null")
            out[key] = value.strip() if isinstance(value, str) and value.strip() else None
        return SpecificDetails(**out)

    return _chat_json(chat, prompt, validate)


def dedup_claims(claims: list[AtomicClaim], embed: Provider,
                 threshold: float = DEDUP_COSINE_THRESHOLD) -> list[AtomicClaim]:
    """Drop any claim whose cosine with an earlier kept claim >= threshold."""
    if not claims:
        return []
    vectors = embed.embed([c.text for c in claims])
    kept: list[AtomicClaim] = []
    kept_vectors: list[np.ndarray] = []
    for claim, vec in zip(claims, vectors):
        if any(float(vec @ kv) >= threshold for kv in kept_vectors):
            continue
        kept.append(claim)
        kept_vectors.append(vec)
    return kept


def extract_context_claims(docs: list[DocumentRecord], chat: Provider, embed: Provider,
                           threshold: float = DEDUP_COSINE_THRESHOLD) -> list[AtomicClaim]:
    """Unique claims from the retrieved context, with document provenance."""
    if not docs:
        raise ValueError("need at least one document")
    claims: list[AtomicClaim] = []
    for doc in docs:
        prompt = CONTEXT_CLAIMS_PROMPT.format(document=doc.body)
        texts = _chat_json(chat, prompt, _string_array)
        for i, text in enumerate(texts):
            claims.append(AtomicClaim(
                claim_id=f"{doc.doc_id}-c{i}", text=text, origin="context",
                source_doc_id=doc.doc_id,
            ))
    return dedup_claims(claims, embed, threshold=threshold)


def save_claim_cache(path, claims: list[AtomicClaim]) -> None:
    """Per-answer JSONL cache so downstream metrics reuse decompositions."""
    with open(path, "w", encoding="utf-8") as fh:
        for c in claims:
            fh.write(json.dumps({
                "claim_id": c.claim_id, "text": c.text,
                "origin": c.origin, "source_doc_id": c.source_doc_id,
            }) + "\n")


def load_claim_cache(path) -> list[AtomicClaim]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                row = json.loads(line)
                out.append(AtomicClaim(**row))
    return out
