"""Claim-level specificity scoring with a panel of judge agents.

Each judge labels every claim along four dimensions (hazard, location,
timeline, intensity) as yes / no / N/A. Labels map to 1 / 0 / n/a, a
majority vote merges the panel, per-dimension means skip n/a entries, and
the final score is the weighted mean over the dimensions that are defined:

    score = sum(alpha_j * mean_j) / sum(alpha_j)   over defined dimensions

A dimension that is n/a on every claim is excluded from both sums rather
than scored as zero, so rarely mentioned dimensions (intensity, typically)
do not drag the score down.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .claims import AtomicClaim, SpecificDetails, decompose_answer, extract_details
from .dataset import StructuredAnswer
from .errors import SchemaError
from .gateway import ChatRequest, JUDGE_TEMPERATURE, Provider

DIMENSIONS = ("hazard", "location", "timeline", "intensity")

DEFAULT_WEIGHTS = {"hazard": 0.6, "location": 0.2, "timeline": 0.1, "intensity": 0.1}


class JudgeLabel(str, Enum):
    YES = "yes"
    NO = "no"
    NA = "na"

    @classmethod
    def parse(cls, raw: str) -> "JudgeLabel":
        low = raw.strip().lower()
        if low == "yes":
            return cls.YES
        if low == "no":
            return cls.NO
        if low in ("n/a", "na"):
            return cls.NA
        raise ValueError(f"label must be yes, no or N/A, got {raw!r}")

    def serialized(self) -> str:
        return "N/A" if self is JudgeLabel.NA else self.value


@dataclass(frozen=True)
class ClaimJudgment:
    claim_id: str
    judge_id: str
    labels: dict[str, JudgeLabel]
    reasoning: dict[str, str]

    def __post_init__(self):
        missing = [d for d in DIMENSIONS if d not in self.labels]
        if missing:
            raise ValueError(f"judgment missing dimensions {missing}")


@dataclass(frozen=True)
class ConsensusVector:
    claim_id: str
    values: dict[str, object]  # 1 | 0 | "na" per dimension


@dataclass(frozen=True)
class SpecificityWeights:
    alpha: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))

    def __post_init__(self):
        for dim in DIMENSIONS:
            if self.alpha.get(dim, 0) <= 0:
                raise ValueError(f"weight for {dim!r} must be positive")


JUDGE_PROMPT = """\
You are a strict evaluator of specificity and factuality.

Given for each claim:
- A factual claim
- A list of evidence passages from a trusted source
- A set of specific details extracted from the claim (hazard type, location, timeline, intensity)
Your task is to evaluate the claim using ONLY the provided evidence.

LABEL DEFINITIONS

For each specific detail (hazard, location, timeline, intensity), use EXACTLY one of the following labels:
- "yes": The detail is explicitly mentioned in the claim AND it matches the same specific detail discussed in the knowledge source.
- "no": The detail is explicitly mentioned in the claim BUT the knowledge source does NOT provide sufficient information to verify it. (This includes cases where the evidence contradicts the claim or does not confirm it.)
- "N/A": The detail is NOT mentioned in the claim at all.
For location matching, agreement at the STATE level is sufficient; an exact county or city match is not required.
Do NOT infer or assume any facts beyond the evidence.
Lack of verification MUST be labeled as "no" (not "N/A").

EVALUATION STEPS

Your task is to:
1. Determine whether the claim is factually true, false, or partially correct, using ONLY the evidence.
2. For each of the 4 specific details (hazard, location, timeline, intensity):
 - Assign "yes", "no", or "N/A" based on the rules above.
 - Provide a brief factual explanation for your decision.
3. Justify your overall factuality decision concisely and objectively.
4. If the claim is "true", cite the exact evidence passage(s) that support it.
5. If the claim is "false" or "partially correct", explain precisely which details are unsupported or incorrect.

OUTPUT FORMAT

Return your answer as a SINGLE JSON object in the following format (with no markdown, no extra text, and no explanations outside the JSON):
{{
"claim": "<Claim>",
"hazard": "yes" | "no" | "N/A",
"hazard_reasoning": "<Explain whether hazard mentioned in the claim is explicitly supported>",
"location": "yes" | "no" | "N/A",
"location_reasoning": "<Explain whether location mentioned in the claim is supported>",
"timeline": "yes" | "no" | "N/A",
"timeline_reasoning": "<Explain whether timeline like date and range of years mentioned in the claim is supported>",
"intensity": "yes" | "no" | "N/A",
"intensity_reasoning": "<Explain whether intensity mentioned in the claim is supported>"
}}

INPUTS

Claim: {claim}
Specific Details to Check: {specific_info}
Evidence Passages: {knowledge}"""

REPAIR_SUFFIX = (
    "\n\nYour previous reply did not match the required JSON schema. "
    "Reply again with ONLY the required JSON object."
)


def render_evidence(evidence: list[str]) -> str:
    return "\n".join(f"{i + 1}. {passage}" for i, passage in enumerate(evidence))


def judge_claim(claim: AtomicClaim, details: SpecificDetails, evidence: list[str],
                judge: Provider, judge_id: str | None = None) -> ClaimJudgment:
    """One judge call; reply must match the fixed JSON schema (one repair retry)."""
    if not evidence:
        raise ValueError("evidence list is empty")
    prompt = JUDGE_PROMPT.format(
        claim=claim.text,
        specific_info=json.dumps(details.as_dict()),
        knowledge=render_evidence(evidence),
    )

    def parse(reply: str) -> ClaimJudgment:
        data = json.loads(reply)
        if not isinstance(data, dict):
            raise ValueError("expected a JSON object")
        labels = {}
        reasoning = {}
        for dim in DIMENSIONS:
            if dim not in data:
                raise ValueError(f"missing dimension {dim!r}")
            labels[dim] = JudgeLabel.parse(str(data[dim]))
            reasoning[dim] = str(data.get(f"{dim}_reasoning", ""))
        return ClaimJudgment(
            claim_id=claim.claim_id,
            judge_id=judge_id or judge.name,
            labels=labels,
            reasoning=reasoning,
        )

    request = ChatRequest.user(prompt, temperature=JUDGE_TEMPERATURE)
    try:
        return parse(judge.chat(request))
    except (ValueError, json.JSONDecodeError):
        pass
    retry = ChatRequest.user(prompt + REPAIR_SUFFIX, temperature=JUDGE_TEMPERATURE)
    try:
        return parse(judge.chat(retry))
    except (ValueError, json.JSONDecodeError) as exc:
        raise SchemaError(f"judge reply failed the schema after retry: {exc}") from exc


# Tie-break precedence when no label has a strict majority: most conservative first.
TIE_PRECEDENCE = (JudgeLabel.NO, JudgeLabel.NA, JudgeLabel.YES)


def majority_vote(judgments: list[ClaimJudgment]) -> ConsensusVector:
    """Per-dimension majority across judges; ties resolve no > na > yes."""
    if not judgments:
        raise ValueError("need at least one judgment")
    claim_ids = {j.claim_id for j in judgments}
    if len(claim_ids) != 1:
        raise ValueError(f"judgments span multiple claims: {sorted(claim_ids)}")

    values: dict[str, object] = {}
    for dim in DIMENSIONS:
        counts = {label: 0 for label in JudgeLabel}
        for j in judgments:
            counts[j.labels[dim]] += 1
        best = max(counts.values())
        winners = [label for label in JudgeLabel if counts[label] == best]
        if len(winners) == 1:
            winner = winners[0]
        else:
            winner = next(label for label in TIE_PRECEDENCE if label in winners)
        values[dim] = {JudgeLabel.YES: 1, JudgeLabel.NO: 0, JudgeLabel.NA: "na"}[winner]
    return ConsensusVector(claim_id=judgments[0].claim_id, values=values)


def dimension_average(consensus: list[ConsensusVector]) -> dict[str, float | None]:
    """Mean of numeric entries per dimension, n/a entries ignored.

    A dimension that is n/a on every claim stays undefined (None), never 0.
    """
    if not consensus:
        raise ValueError("need at least one consensus vector")
    out: dict[str, float | None] = {}
    for dim in DIMENSIONS:
        numeric = [v.values[dim] for v in consensus if v.values[dim] != "na"]
        out[dim] = sum(numeric) / len(numeric) if numeric else None
    return out


def aggregate(averages: dict[str, float | None],
              weights: SpecificityWeights | None = None) -> float | None:
    """Weighted mean over defined dimensions; None if every dimension is n/a."""
    weights = weights or SpecificityWeights()
    num = 0.0
    den = 0.0
    for dim in DIMENSIONS:
        avg = averages.get(dim)
        if avg is None:
            continue
        num += weights.alpha[dim] * avg
        den += weights.alpha[dim]
    if den == 0.0:
        return None
    return num / den


@dataclass(frozen=True)
class SpecificityReport:
    answer_id: str
    claims: list[AtomicClaim]
    details: list[SpecificDetails]
    judgments: list[list[ClaimJudgment]]  # one inner list per claim
    consensus: list[ConsensusVector]
    averages: dict[str, float | None]
    score: float | None

    def to_json(self) -> dict:
        return {
            "answer_id": self.answer_id,
            "score": self.score,
            "averages": {d: self.averages[d] for d in DIMENSIONS},
            "claims": [
                {
                    "claim_id": c.claim_id,
                    "text": c.text,
                    "details": d.as_dict(),
                    "consensus": {k: v.values[k] for k in DIMENSIONS},
                    "judgments": [
                        {
                            "judge_id": j.judge_id,
                            "labels": {k: j.labels[k].serialized() for k in DIMENSIONS},
                            "reasoning": {k: j.reasoning[k] for k in DIMENSIONS},
                        }
                        for j in js
                    ],
                }
                for c, d, v, js in zip(self.claims, self.details, self.consensus, self.judgments)
            ],
        }


def score_answer(answer: StructuredAnswer, evidence: list[str], judges: list[Provider],
                 weights: SpecificityWeights | None = None, chat: Provider | None = None,
                 answer_id: str = "a",
                 claims_override: list[AtomicClaim] | None = None) -> SpecificityReport:
    """Full pipeline: decompose, extract details, judge with the panel, aggregate.

    `chat` drives decomposition and detail extraction (defaults to the first
    judge). Heterogeneous panels are fine; the default elsewhere is one
    provider sampled k=3 times at temperature 0.
    """
    if not judges:
        raise ValueError("need at least one judge provider")
    chat = chat or judges[0]

    claims = claims_override if claims_override is not None else decompose_answer(
        answer, chat, answer_id=answer_id)
    if not claims:
        raise ValueError("decomposition produced no claims")

    details = [extract_details(c, chat) for c in claims]
    judgments: list[list[ClaimJudgment]] = []
    consensus: list[ConsensusVector] = []
    for claim, detail in zip(claims, details):
        panel = [
            judge_claim(claim, detail, evidence, judge, judge_id=f"{judge.name}#{slot}")
            for slot, judge in enumerate(judges)
        ]
        judgments.append(panel)
        consensus.append(majority_vote(panel))

    averages = dimension_average(consensus)
    return SpecificityReport(
        answer_id=answer_id,
        claims=claims,
        details=details,
        judgments=judgments,
        consensus=consensus,
        averages=averages,
        score=aggregate(averages, weights),
    )
