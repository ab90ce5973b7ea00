"""Deterministic in-process backend for offline runs and tests.

Every reply is a pure function of (seed, request): hashing goes through
sha256, never the process-randomized builtin hash, so two runs of the same
pipeline are bit-identical. The chat side recognizes each pipeline prompt
family by its fixed marker line and produces structurally valid output for
it (numbered answers, strict-JSON claim lists, rule-based judge labels,
lexicon masking, and so on).
"""

from __future__ import annotations

import hashlib
import json
import re

import numpy as np

from . import dataset
from .dataset import ConcernKind, HazardKind
from .gateway import ChatRequest, TokenScore


def stable_hash(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


_TOKEN = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


_LOCATION_IN_TEXT = re.compile(r"\b(?:in|for|across|of) ([A-Z][\w.'ñ-]*(?: [A-Z][\w.'ñ-]*)*, [A-Z]{2})\b")
_TIMELINE_IN_TEXT = re.compile(r"\b(?:next |over )?(\d+(?:-\d+)? ?years?)\b", re.IGNORECASE)
_INTENSITY_WORDS = ("extreme", "severe", "major", "intense", "category", "magnitude", "record")


def find_hazard(text: str) -> str | None:
    low = text.lower()
    for hazard in HazardKind:
        if hazard.value in low:
            start = low.index(hazard.value)
            return text[start:start + len(hazard.value)]
    return None


def find_location(text: str) -> str | None:
    m = _LOCATION_IN_TEXT.search(text)
    return m.group(1) if m else None


def find_timeline(text: str) -> str | None:
    m = _TIMELINE_IN_TEXT.search(text)
    return m.group(1) if m else None


def find_intensity(text: str) -> str | None:
    low = text.lower()
    for word in _INTENSITY_WORDS:
        if word in low:
            start = low.index(word)
            return text[start:start + len(word)]
    return None


def extract_details_rules(claim: str) -> dict:
    """Regex-gazetteer detail extraction; mentions are verbatim substrings."""
    return {
        "hazard": find_hazard(claim),
        "location": find_location(claim),
        "timeline": find_timeline(claim),
        "intensity": find_intensity(claim),
    }


def _masking_rules() -> list[tuple[str, str]]:
    rules: list[tuple[str, str]] = []
    for hazard in HazardKind:
        rules.append((hazard.value, "[HAZARD]"))
    for names in dataset.load_infrastructures().values():
        for name in names:
            rules.append((name, "[INFRASTRUCTURE]"))
    for sector_professions in dataset.load_roster().by_sector.values():
        for name in sector_professions:
            rules.append((name, "[PROFESSION]"))
    for kind in ConcernKind:
        for phrase in dataset.load_concern_phrases()[kind]:
            rules.append((phrase, "[CONCERN]"))
    rules.sort(key=lambda r: -len(r[0]))
    return rules


def apply_masking_rules(text: str) -> str:
    masked = text
    for surface, placeholder in _masking_rules():
        masked = re.sub(re.escape(surface), placeholder, masked, flags=re.IGNORECASE)
    return masked


def _numbered_or_sentences(text: str) -> list[str]:
    numbered = []
    for line in text.splitlines():
        m = re.match(r"^\s*\d+[.)]\s*(.*)$", line)
        if m and m.group(1).strip():
            numbered.append(m.group(1).strip())
    if numbered:
        return numbered
    parts = [p.strip() for p in re.split(r"(?<=[.!?])\s+", text) if p.strip()]
    return parts or [text.strip()]


def _after_marker(prompt: str, marker: str) -> str:
    idx = prompt.rfind(marker)
    if idx < 0:
        return prompt
    return prompt[idx + len(marker):].strip()


def _between(prompt: str, start: str, end: str) -> str:
    block = _after_marker(prompt, start)
    idx = block.find(end)
    return block[:idx].strip() if idx >= 0 else block.strip()


class DeterministicMockBackend:
    """Offline stand-in for every capability; reproducible bit-for-bit."""

    def __init__(self, seed: int = 0, dim: int = 64, reply_table: dict[str, str] | None = None):
        self.seed = seed
        self.dim = dim
        self.reply_table = reply_table or {}

    # -- chat ---------------------------------------------------------------

    def raw_chat(self, request: ChatRequest) -> str:
        prompt = request.text()
        if "Here are the 5 research abstracts" in prompt:
            return self._generate_answer(prompt)
        if "strict evaluator of specificity and factuality" in prompt:
            return self._judge(prompt)
        if "You are a semantic masker" in prompt:
            return apply_masking_rules(_after_marker(prompt, "Answer:"))
        if "Break the answer below into atomic claims" in prompt:
            return json.dumps(_numbered_or_sentences(_after_marker(prompt, "Answer:")))
        if "unique, non-redundant factual propositions" in prompt:
            sentences = _numbered_or_sentences(_after_marker(prompt, "Document:"))
            return json.dumps(sentences[:5])
        if "Extract the specific details mentioned in the claim" in prompt:
            return json.dumps(extract_details_rules(_after_marker(prompt, "Claim:")))
        if "inverse question generator" in prompt:
            return self._invert_questions(prompt)
        if "Rephrase the question below" in prompt:
            return self._paraphrase(_after_marker(prompt, "Question:"))
        if prompt in self.reply_table:
            return self.reply_table[prompt]
        return f"mock-reply-{stable_hash(f'{self.seed}:{prompt}') % 100000}"

    def _generate_answer(self, prompt: str) -> str:
        context = _between(prompt, "Context:", "\nQuestion:")
        question = _between(prompt, "Question:", "\n\nBased on the above abstracts")
        abstracts_block = _between(prompt, "Here are the 5 research abstracts:", "\nContext:")
        abstracts = _numbered_or_sentences(abstracts_block)[:5]

        hazard = find_hazard(question) or find_hazard(context) or "the hazard"
        location = find_location(question) or find_location(context) or "the region"
        timeline = find_timeline(context) or "10 years"
        profession = _between(context, "Profession:", "(").strip() or "practitioner"
        infra_match = re.search(r"of ([a-z][\w ]+?) (?:to|in|facing|resilience|exposed)", question)
        infrastructure = infra_match.group(1) if infra_match else "the assets"

        def lead(text: str, n: int = 8) -> str:
            parts = text.split()
            return " ".join(parts[:n])

        pct = 70 + stable_hash(f"{self.seed}:conf:{question}") % 25
        lines = [
            f"Assessment prepared for a {profession} working on {infrastructure}.",
            f"1. The literature indicates {hazard} stresses {infrastructure} in {location}. "
            f"{lead(abstracts[0] if abstracts else question)}.",
            f"2. {lead(abstracts[1] if len(abstracts) > 1 else question)}. "
            f"Plan reviews over the next {timeline} should track this exposure.",
            f"3. A {profession} should monitor {infrastructure} performance during {hazard} "
            f"events in {location}.",
            f"Confidence: {pct}% based on the retrieved abstracts.",
        ]
        return "\n".join(lines)

    def _judge(self, prompt: str) -> str:
        claim = _between(prompt, "Claim:", "\nSpecific Details to Check:")
        details_raw = _between(prompt, "Specific Details to Check:", "\nEvidence Passages:")
        evidence = _after_marker(prompt, "Evidence Passages:").lower()
        try:
            details = json.loads(details_raw)
        except json.JSONDecodeError:
            details = extract_details_rules(claim)

        out: dict[str, str] = {"claim": claim}
        for dim in ("hazard", "location", "timeline", "intensity"):
            mention = details.get(dim)
            if not mention:
                out[dim] = "N/A"
                out[f"{dim}_reasoning"] = f"The {dim} detail is not mentioned in the claim."
            elif mention.lower() in evidence:
                out[dim] = "yes"
                out[f"{dim}_reasoning"] = f"The {dim} mention {mention!r} appears in the evidence."
            else:
                out[dim] = "no"
                out[f"{dim}_reasoning"] = f"The {dim} mention {mention!r} is not verifiable from the evidence."
        return json.dumps(out)

    def _invert_questions(self, prompt: str) -> str:
        m = re.search(r"Generate (\d+) candidate questions", prompt)
        n = int(m.group(1)) if m else 5
        answer = _after_marker(prompt, "Answer:")
        content = [t for t in tokenize(answer) if len(t) > 3]
        seen: list[str] = []
        for t in content:
            if t not in seen:
                seen.append(t)
        questions = []
        for i in range(n):
            a = seen[(2 * i) % len(seen)] if seen else "this"
            b = seen[(2 * i + 1) % len(seen)] if seen else "topic"
            questions.append(f"What should be known about {a} and {b} (angle {i + 1})?")
        return json.dumps(questions)

    def _paraphrase(self, question: str) -> str:
        words = question.strip().rstrip("?").split()
        if len(words) < 2:
            return question.strip()
        rotated = words[1:] + [words[0]]
        return " ".join(rotated) + "?"

    # -- embed / rerank / score ---------------------------------------------

    def raw_embed(self, texts) -> list[list[float]]:
        out = []
        for text in texts:
            v = np.zeros(self.dim, dtype=float)
            for token in tokenize(text):
                v[stable_hash(f"{self.seed}:emb:{token}") % self.dim] += 1.0
            if not v.any():
                v[stable_hash(f"{self.seed}:emb:") % self.dim] = 1.0
            out.append(v.tolist())
        return out

    def raw_rerank(self, query: str, passage: str) -> float:
        return float(len(set(tokenize(query)) & set(tokenize(passage))))

    def raw_score(self, prompt: str, completion: str) -> list[TokenScore]:
        prompt_tokens = set(tokenize(prompt))
        scores = []
        for raw_token in completion.split():
            token = "".join(tokenize(raw_token)) or raw_token.lower()
            jitter = (stable_hash(f"{self.seed}:scr:{token}") % 1000) / 50000.0
            lp = -0.02 - jitter - (0.0 if token in prompt_tokens else 0.9)
            p = float(np.exp(lp))
            alt1 = float(np.log((1.0 - p) * 0.6 + 1e-12))
            alt2 = float(np.log((1.0 - p) * 0.3 + 1e-12))
            scores.append(TokenScore(raw_token, lp, ((f"alt:{token}", alt1), (f"alt2:{token}", alt2))))
        return scores


class ScriptedChatBackend:
    """Chat backend that pops canned replies in order; other capabilities absent."""

    def __init__(self, replies: list[str]):
        self.replies = list(replies)
        self.prompts: list[str] = []

    def raw_chat(self, request: ChatRequest) -> str:
        self.prompts.append(request.text())
        if not self.replies:
            raise AssertionError("scripted chat backend ran out of replies")
        return self.replies.pop(0)
