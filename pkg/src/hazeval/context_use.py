"""Leave-one-out context utilization from forced-completion confidence.

Answer confidence is the geometric mean of token probabilities,

    f(a | X) = exp( (1/T) * sum_t log p(y_t | X, y_<t) )

which is length-invariant for constant per-token probability. Each context
claim's contribution is the confidence drop when it is removed from the
conditioning prompt:

    delta_i = f(a | q, C) - f(a | q, C minus c_i)
    rel_i   = delta_i / f(a | q, C)

CU is the mean delta and CU_rel the mean relative delta across claims. A
negative delta flags a distracting or detrimental claim. An entropy-based
confidence proxy (exp of negative mean per-token entropy) is provided for
the sensitivity diagnostics only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .agreement import spearman
from .claims import AtomicClaim
from .gateway import Provider, TokenScore

METHODS = ("geometric_mean", "entropy_proxy")

CONDITIONING_TEMPLATE = "Question: {question}\nContext claims:\n{claims}\nAnswer:"


@dataclass(frozen=True)
class ConfidenceReport:
    value: float
    token_count: int
    method: str


@dataclass(frozen=True)
class ClaimContribution:
    claim_id: str
    delta: float
    relative: float | None


@dataclass(frozen=True)
class CuReport:
    cu: float
    cu_rel: float | None
    per_claim: list[ClaimContribution]
    baseline_confidence: float

    def delta_stats(self) -> dict[str, float]:
        deltas = [c.delta for c in self.per_claim]
        return {"min": min(deltas), "max": max(deltas), "mean": sum(deltas) / len(deltas)}

    def to_json(self) -> dict:
        stats = self.delta_stats()
        return {
            "cu": self.cu,
            "cu_rel": self.cu_rel,
            "cu_rel_percent": None if self.cu_rel is None else 100.0 * self.cu_rel,
            "baseline_confidence": self.baseline_confidence,
            "delta_min": stats["min"],
            "delta_max": stats["max"],
            "delta_mean": stats["mean"],
            "per_claim": [
                {"claim_id": c.claim_id, "delta": c.delta, "relative": c.relative}
                for c in self.per_claim
            ],
        }


def _token_entropy(score: TokenScore) -> float:
    """Entropy over the chosen token, its alternatives and a residual bucket."""
    probs = [math.exp(score.logprob)]
    for alt_text, alt_lp in score.top_alternatives or ():
        if alt_text == score.token_text:
            continue  # providers often echo the chosen token among the top-k
        probs.append(math.exp(alt_lp))
    residual = max(0.0, 1.0 - sum(probs))
    if residual > 0:
        probs.append(residual)
    return -sum(p * math.log(p) for p in probs if p > 0)


def confidence_from_scores(scores: list[TokenScore], method: str = "geometric_mean") -> ConfidenceReport:
    if not scores:
        raise ValueError("no token scores")
    if method == "geometric_mean":
        mean_lp = sum(s.logprob for s in scores) / len(scores)
        value = math.exp(mean_lp)
    elif method == "entropy_proxy":
        mean_h = sum(_token_entropy(s) for s in scores) / len(scores)
        value = math.exp(-mean_h)
    else:
        raise ValueError(f"unknown confidence method {method!r}")
    return ConfidenceReport(value=value, token_count=len(scores), method=method)


def confidence(answer: str, conditioning: str, scorer: Provider,
               method: str = "geometric_mean") -> ConfidenceReport:
    """Forced-completion confidence of `answer` given the conditioning prompt."""
    if not answer.strip():
        raise ValueError("answer is empty")
    scores = scorer.score_completion(conditioning, answer)
    return confidence_from_scores(scores, method=method)


def conditioning_prompt(question: str, claims: list[AtomicClaim], skip: int | None = None) -> str:
    """Fixed prompt layout; the left-out claim is relisted without a gap."""
    lines = [f"- {c.text}" for i, c in enumerate(claims) if i != skip]
    return CONDITIONING_TEMPLATE.format(question=question, claims="\n".join(lines))


def _contribution(baseline: float, loo_value: float, claim_id: str) -> ClaimContribution:
    delta = baseline - loo_value
    assert -1.0 < delta < 1.0, f"delta out of (-1, 1): {delta}"
    relative = None
    if baseline > 0.0:
        relative = delta / baseline
        assert relative <= 1.0, f"relative delta above 1: {relative}"
    return ClaimContribution(claim_id=claim_id, delta=delta, relative=relative)


def claim_contribution(answer: str, question: str, claims: list[AtomicClaim], i: int,
                       scorer: Provider, method: str = "geometric_mean") -> ClaimContribution:
    if not claims:
        raise ValueError("claim set is empty")
    if not (0 <= i < len(claims)):
        raise ValueError(f"claim index {i} out of range")
    baseline = confidence(answer, conditioning_prompt(question, claims), scorer, method).value
    loo = confidence(answer, conditioning_prompt(question, claims, skip=i), scorer, method).value
    return _contribution(baseline, loo, claims[i].claim_id)


def cu_scores(answer: str, question: str, claims: list[AtomicClaim], scorer: Provider,
              method: str = "geometric_mean") -> CuReport:
    """Baseline once plus one leave-one-out confidence per claim (|C|+1 calls)."""
    if not claims:
        raise ValueError("claim set is empty; context utilization is undefined")
    baseline = confidence(answer, conditioning_prompt(question, claims), scorer, method).value
    per_claim = []
    for i, claim in enumerate(claims):
        loo = confidence(answer, conditioning_prompt(question, claims, skip=i), scorer, method).value
        per_claim.append(_contribution(baseline, loo, claim.claim_id))

    cu = sum(c.delta for c in per_claim) / len(per_claim)
    relatives = [c.relative for c in per_claim]
    cu_rel = None
    if all(r is not None for r in relatives):
        cu_rel = sum(relatives) / len(relatives)
    return CuReport(cu=cu, cu_rel=cu_rel, per_claim=per_claim, baseline_confidence=baseline)


def sensitivity_correlation(f_claims: list[float], f_docs: list[float]) -> tuple[float | None, float | None]:
    """Spearman correlation between claim- and document-conditioned confidence."""
    return spearman(f_claims, f_docs)
