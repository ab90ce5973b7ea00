"""Pure-function readability scoring: FRE, FKGL and band classification.

Both scores are linear in the average sentence length (ASL, words per
sentence) and the average syllables per word (ASW):

    FRE  = 206.835 - 1.015 * ASL - 84.6 * ASW
    FKGL = 0.39 * ASL + 11.8 * ASW - 15.59

Sentence segmentation protects decimal numbers and numbered-list markers
("1.", "2)") so that point-wise answers keep their real sentence lengths, and
the syllable counter is the standard vowel-group heuristic (documented as
approximate).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_LIST_MARKER = re.compile(r"(?m)^\s*\d+[.)]\s+")
_DECIMAL = re.compile(r"(?<=\d)\.(?=\d)")
_SENTENCE_END = re.compile(r"[.!?]+(?=\s|$)")
_WORD = re.compile(r"[A-Za-z][A-Za-z'\-]*")
_VOWEL_GROUP = re.compile(r"[aeiouy]+")

FRE_BANDS = (
    (60.0, "Plain English (8th-9th grade or easier)"),
    (50.0, "Fairly difficult (10th-12th grade)"),
    (30.0, "Difficult to read (college level)"),
    (float("-inf"), "Very difficult (college graduate or higher)"),
)

FKGL_BAND_LABELS = (
    "Elementary school level",
    "Middle school level",
    "High school level",
    "College undergraduate level",
    "Graduate/professional level",
)


@dataclass(frozen=True)
class ReadabilityReport:
    fre: float
    fkgl: float
    asl: float
    asw: float
    fre_band: str
    fkgl_band: str


def split_sentences(text: str) -> list[str]:
    """Split on ./!/? followed by whitespace or end of text.

    Decimal points and leading list markers are neutralized first so neither
    terminates a sentence.
    """
    cleaned = _LIST_MARKER.sub("", text)
    cleaned = _DECIMAL.sub("<dp>", cleaned)
    parts = _SENTENCE_END.split(cleaned)
    sentences = []
    for part in parts:
        part = part.replace("<dp>", ".").strip()
        if _WORD.search(part):
            sentences.append(part)
    return sentences


def words(text: str) -> list[str]:
    return _WORD.findall(text)


def count_syllables(word: str) -> int:
    """Vowel-group count, minus a silent trailing 'e' (kept for -le endings)."""
    w = word.lower().strip("'-")
    groups = _VOWEL_GROUP.findall(w)
    n = len(groups)
    if n > 1 and w.endswith("e") and not w.endswith("le"):
        n -= 1
    return max(n, 1)


def fre_score(asl: float, asw: float) -> float:
    return 206.835 - 1.015 * asl - 84.6 * asw


def fkgl_score(asl: float, asw: float) -> float:
    return 0.39 * asl + 11.8 * asw - 15.59


def fre_band(fre: float) -> str:
    for lower, label in FRE_BANDS:
        if fre >= lower:
            return label
    raise AssertionError("unreachable: FRE bands cover all reals")


def fkgl_band(fkgl: float) -> str:
    if fkgl < 6.0:
        return FKGL_BAND_LABELS[0]
    if fkgl < 9.0:
        return FKGL_BAND_LABELS[1]
    if fkgl < 13.0:
        return FKGL_BAND_LABELS[2]
    if fkgl <= 16.0:
        return FKGL_BAND_LABELS[3]
    return FKGL_BAND_LABELS[4]


def readability(text: str) -> ReadabilityReport:
    sentences = split_sentences(text)
    all_words = words(text)
    if not all_words:
        raise ValueError("text contains no words")
    n_sentences = max(len(sentences), 1)
    asl = len(all_words) / n_sentences
    asw = sum(count_syllables(w) for w in all_words) / len(all_words)
    fre = fre_score(asl, asw)
    fkgl = fkgl_score(asl, asw)
    return ReadabilityReport(
        fre=fre, fkgl=fkgl, asl=asl, asw=asw,
        fre_band=fre_band(fre), fkgl_band=fkgl_band(fkgl),
    )


def summarize_readability(reports: list[ReadabilityReport]) -> dict:
    """Aggregate block: average scores plus per-band counts."""
    if not reports:
        return {"count": 0}
    fre_counts: dict[str, int] = {label: 0 for _, label in FRE_BANDS}
    fkgl_counts: dict[str, int] = {label: 0 for label in FKGL_BAND_LABELS}
    for r in reports:
        fre_counts[r.fre_band] += 1
        fkgl_counts[r.fkgl_band] += 1
    return {
        "count": len(reports),
        "average_fre": sum(r.fre for r in reports) / len(reports),
        "average_fkgl": sum(r.fkgl for r in reports) / len(reports),
        "fre_bands": fre_counts,
        "fkgl_bands": fkgl_counts,
    }
