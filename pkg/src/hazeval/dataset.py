"""Synthetic QA dataset generation for hazard and infrastructure decision support.

Profiles are sampled under controlled randomization (hazard first, then a
location conditional on the hazard, then the remaining attributes), question
templates are instantiated from profile attributes, and the grounded
answer-generation prompt is assembled from the retrieved abstracts.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .errors import ConfigurationError

TIMELINE_YEARS = (5, 10, 20, 30, 50)

PLACEHOLDERS = (
    "[INFRASTRUCTURE]", "[HAZARD]", "[LOCATION]", "[CONCERN]", "[PROFESSION]", "[TIMELINE]",
)

_NUMBERED_LINE = re.compile(r"^\s*(\d+)[.)]\s*(.*)$")
_RESIDUAL_PLACEHOLDER = re.compile(r"\[[A-Z]+\]")


class HazardKind(str, Enum):
    COLD_WAVE = "cold wave"
    HEAT_WAVE = "heat wave"
    COASTAL_FLOODING = "coastal flooding"
    ICE_STORM = "ice storm"
    HURRICANE = "hurricane"
    DROUGHT = "drought"
    WILDFIRE = "wildfire"


class Sector(str, Enum):
    TRANSPORTATION = "transportation"
    WATER = "water"
    ENERGY = "energy"
    BUILDINGS = "buildings"
    COMMUNICATIONS = "communications"


class ConcernKind(str, Enum):
    FACT = "fact"
    RECOMMENDATION = "recommendation"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class Location:
    county: str
    state: str

    def __post_init__(self):
        if len(self.state) != 2 or not self.state.isupper():
            raise ValueError(f"state must be a two-letter uppercase code, got {self.state!r}")

    def render(self) -> str:
        return f"{self.county}, {self.state}"


@dataclass(frozen=True)
class UserProfile:
    profession: str
    sector: Sector
    concern_kind: ConcernKind
    hazard: HazardKind
    location: Location
    timeline_years: int

    def __post_init__(self):
        if self.timeline_years <= 0:
            raise ValueError("timeline_years must be positive")


@dataclass(frozen=True)
class QuestionTemplate:
    id: str
    concern_kind: ConcernKind
    body: str

    def __post_init__(self):
        tokens = re.findall(r"\[[A-Z]+\]", self.body)
        unknown = [t for t in tokens if t not in PLACEHOLDERS]
        if unknown:
            raise ValueError(f"template {self.id} uses unknown placeholders {unknown}")


@dataclass(frozen=True)
class QuestionRecord:
    id: str
    profile: UserProfile
    template_id: str
    infrastructure: str
    question_text: str


@dataclass(frozen=True)
class StructuredAnswer:
    """A generated answer split into an intro and ordered numbered segments.

    The trailing self-reported confidence line is prompt scaffolding and is
    kept out of the segments; every metric excludes it.
    """

    intro: str
    segments: tuple[str, ...]
    confidence_line: str | None = None
    retrieved_doc_ids: tuple[str, ...] = ()

    def full_text(self) -> str:
        """Intro plus segments, confidence line excluded."""
        parts = [self.intro] if self.intro else []
        parts.extend(self.segments)
        return "\n".join(parts)

    def rendered(self, skip: int | None = None) -> str:
        """Render intro plus renumbered segments, optionally leaving one out."""
        parts = [self.intro] if self.intro else []
        n = 0
        for i, seg in enumerate(self.segments):
            if i == skip:
                continue
            n += 1
            parts.append(f"{n}. {seg}")
        return "\n".join(parts)

    def is_empty(self) -> bool:
        return not self.intro and not self.segments


@dataclass(frozen=True)
class HazardLocationTable:
    entries: dict[HazardKind, tuple[Location, ...]]
    version: int = 1

    def __post_init__(self):
        for hazard in HazardKind:
            if not self.entries.get(hazard):
                raise ConfigurationError(f"hazard {hazard.value!r} has no locations")

    def locations(self, hazard: HazardKind) -> tuple[Location, ...]:
        return self.entries[hazard]


@dataclass(frozen=True)
class ProfessionRoster:
    by_sector: dict[Sector, tuple[str, ...]]
    version: int = 1

    def __post_init__(self):
        if not any(self.by_sector.values()):
            raise ConfigurationError("profession roster is empty")

    def flat(self) -> list[tuple[str, Sector]]:
        out = []
        for sector in Sector:
            for profession in self.by_sector.get(sector, ()):
                out.append((profession, sector))
        return out


def _load_packaged(name: str) -> dict:
    with resources.files("hazeval.data").joinpath(name).open("r", encoding="utf-8") as fh:
        return json.load(fh)


def load_hazard_table() -> HazardLocationTable:
    raw = _load_packaged("hazard_locations.json")
    entries = {
        HazardKind(hazard): tuple(Location(county, state) for county, state in locs)
        for hazard, locs in raw["entries"].items()
    }
    return HazardLocationTable(entries=entries, version=raw["version"])


def load_roster() -> ProfessionRoster:
    raw = _load_packaged("professions.json")
    by_sector = {Sector(s): tuple(names) for s, names in raw["sectors"].items()}
    return ProfessionRoster(by_sector=by_sector, version=raw["version"])


def load_templates() -> list[QuestionTemplate]:
    raw = _load_packaged("templates.json")
    templates = [
        QuestionTemplate(id=t["id"], concern_kind=ConcernKind(t["concern_kind"]), body=t["body"])
        for t in raw["templates"]
    ]
    for t in templates:
        # Pool templates must be parameterized; ad-hoc templates may be literal.
        if not re.search(r"\[[A-Z]+\]", t.body):
            raise ConfigurationError(f"pool template {t.id} contains no placeholder")
    return templates


def load_infrastructures() -> dict[Sector, tuple[str, ...]]:
    raw = _load_packaged("infrastructures.json")
    return {Sector(s): tuple(names) for s, names in raw["sectors"].items()}


def load_concern_phrases() -> dict[ConcernKind, tuple[str, ...]]:
    raw = _load_packaged("infrastructures.json")
    return {ConcernKind(k): tuple(v) for k, v in raw["concern_phrases"].items()}


def sample_profile(
    rng_seed: int,
    table: HazardLocationTable | None = None,
    roster: ProfessionRoster | None = None,
) -> UserProfile:
    """Sample a profile: hazard first, then a location conditional on it.

    Profession, concern kind and timeline are drawn uniformly from their
    predefined sets. The same seed always yields the same profile.
    """
    table = table or load_hazard_table()
    roster = roster or load_roster()
    flat = roster.flat()
    if not flat:
        raise ConfigurationError("profession roster is empty")

    rng = random.Random(rng_seed)
    hazard = rng.choice(list(HazardKind))
    location = rng.choice(table.locations(hazard))
    profession, sector = rng.choice(flat)
    concern = rng.choice(list(ConcernKind))
    timeline = rng.choice(TIMELINE_YEARS)
    return UserProfile(
        profession=profession,
        sector=sector,
        concern_kind=concern,
        hazard=hazard,
        location=location,
        timeline_years=timeline,
    )


def instantiate_question(
    profile: UserProfile,
    template: QuestionTemplate,
    infrastructure: str,
    record_id: str = "q0",
    concern: str | None = None,
) -> QuestionRecord:
    """Fill every template placeholder from the profile.

    [LOCATION] renders as "County, ST" and [TIMELINE] as "<n> years"; when the
    template already spells "years" right after the slot, the integer alone is
    substituted so the word is not doubled.
    """
    if template.concern_kind != profile.concern_kind:
        raise ValueError(
            f"template {template.id} is for {template.concern_kind.value!r} questions, "
            f"profile concern is {profile.concern_kind.value!r}"
        )
    if concern is None:
        concern = load_concern_phrases()[profile.concern_kind][0]

    text = template.body
    text = text.replace("[TIMELINE] years", f"{profile.timeline_years} years")
    text = text.replace("[TIMELINE]", f"{profile.timeline_years} years")
    text = text.replace("[INFRASTRUCTURE]", infrastructure)
    text = text.replace("[HAZARD]", profile.hazard.value)
    text = text.replace("[LOCATION]", profile.location.render())
    text = text.replace("[CONCERN]", concern)
    text = text.replace("[PROFESSION]", profile.profession)

    residual = _RESIDUAL_PLACEHOLDER.findall(text)
    if residual:
        raise ValueError(f"unreplaced placeholders {residual} in template {template.id}")
    return QuestionRecord(
        id=record_id,
        profile=profile,
        template_id=template.id,
        infrastructure=infrastructure,
        question_text=text,
    )


def generate_record(
    base_seed: int,
    index: int,
    table: HazardLocationTable | None = None,
    roster: ProfessionRoster | None = None,
    templates: list[QuestionTemplate] | None = None,
    infrastructures: dict[Sector, tuple[str, ...]] | None = None,
) -> QuestionRecord:
    """Generate record `index` of the seed stream rooted at `base_seed`.

    Each record derives from an independent seed (base_seed + index), so
    generation is order-free and safe to parallelize.
    """
    seed = base_seed + index
    profile = sample_profile(seed, table=table, roster=roster)
    templates = templates or load_templates()
    infrastructures = infrastructures or load_infrastructures()
    pool = [t for t in templates if t.concern_kind == profile.concern_kind]
    if not pool:
        raise ConfigurationError(f"no templates for concern kind {profile.concern_kind.value!r}")

    rng = random.Random(f"slots:{seed}")
    template = rng.choice(pool)
    infrastructure = rng.choice(infrastructures[profile.sector])
    concern = rng.choice(load_concern_phrases()[profile.concern_kind])
    return instantiate_question(
        profile, template, infrastructure, record_id=f"q{index:04d}", concern=concern
    )


def generate_records(count: int, base_seed: int, **kwargs) -> list[QuestionRecord]:
    return [generate_record(base_seed, i, **kwargs) for i in range(count)]


ANSWER_PROMPT_TEMPLATE = """\
You are tasked with writing a recommendation/fact-based answer that answers the user's question based on a provided list of research abstracts and contextual information. Your response must:

1. Directly address the user's concern, ensuring the answer is supported by the provided literature.
2. Incorporate the user's profile like timeline, professional background, Location, and concerns into the recommendations.
3. Clearly connect insights from the abstracts to the user's specific context and goals.
4. Make sure to output in points (1,2,3..) without inserting any **.
5. End your response with a confidence score (in percentage) and a short explanation for that score.

Here are the 5 research abstracts:
1. {lit1}
2. {lit2}
3. {lit3}
4. {lit4}
5. {lit5}

Context: {context}
Question: {question}

Based on the above abstracts, write the answer in points. Make sure to take into account all the information in the context like profession, timeline, etc. Do not include subpoints."""


def render_profile_context(profile: UserProfile) -> str:
    return (
        f"Profession: {profile.profession} ({profile.sector.value} sector). "
        f"Concern: {profile.concern_kind.value}. "
        f"Hazard: {profile.hazard.value}. "
        f"Location: {profile.location.render()}. "
        f"Timeline: {profile.timeline_years} years."
    )


def build_answer_prompt(question: QuestionRecord, docs: list[str], profile: UserProfile) -> str:
    """Assemble the answer-generation prompt over exactly five abstracts."""
    if len(docs) != 5:
        raise ValueError(f"expected exactly 5 documents, got {len(docs)}")
    if not question.question_text.strip():
        raise ValueError("question text is empty")
    return ANSWER_PROMPT_TEMPLATE.format(
        lit1=docs[0], lit2=docs[1], lit3=docs[2], lit4=docs[3], lit5=docs[4],
        context=render_profile_context(profile),
        question=question.question_text,
    )


def parse_answer(raw: str, retrieved_doc_ids: tuple[str, ...] = ()) -> StructuredAnswer:
    """Split a raw answer into intro, numbered segments and the confidence tail.

    Total over non-empty input: text with no numbered points becomes the intro,
    and segments stay in answer order. A line starting with "confidence"
    (case-insensitive) ends content collection; it and everything after it are
    stored separately.
    """
    if not raw.strip():
        raise ValueError("raw answer is empty")

    intro_lines: list[str] = []
    segments: list[str] = []
    confidence_lines: list[str] = []
    in_confidence = False

    for line in raw.splitlines():
        if in_confidence:
            confidence_lines.append(line)
            continue
        if line.strip().lower().startswith("confidence"):
            in_confidence = True
            confidence_lines.append(line)
            continue
        m = _NUMBERED_LINE.match(line)
        if m:
            segments.append(m.group(2).strip())
        elif segments:
            if line.strip():
                segments[-1] = f"{segments[-1]} {line.strip()}".strip()
        else:
            intro_lines.append(line)

    intro = "\n".join(intro_lines).strip()
    confidence = "\n".join(confidence_lines).strip() or None
    return StructuredAnswer(
        intro=intro,
        segments=tuple(s for s in segments if s),
        confidence_line=confidence,
        retrieved_doc_ids=retrieved_doc_ids,
    )


DATASET_FIELDS = (
    "id", "profession", "sector", "concern_kind", "hazard", "county", "state",
    "timeline_years", "infrastructure", "template_id", "question",
    "answer_intro", "answer_segments", "retrieved_doc_ids", "generator_model",
)


def dataset_row(record: QuestionRecord, answer: StructuredAnswer, generator_model: str) -> dict:
    """One dataset JSONL row; field names and order are part of the file format."""
    p = record.profile
    return {
        "id": record.id,
        "profession": p.profession,
        "sector": p.sector.value,
        "concern_kind": p.concern_kind.value,
        "hazard": p.hazard.value,
        "county": p.location.county,
        "state": p.location.state,
        "timeline_years": p.timeline_years,
        "infrastructure": record.infrastructure,
        "template_id": record.template_id,
        "question": record.question_text,
        "answer_intro": answer.intro,
        "answer_segments": list(answer.segments),
        "retrieved_doc_ids": list(answer.retrieved_doc_ids),
        "generator_model": generator_model,
    }


def row_to_record_answer(row: dict) -> tuple[QuestionRecord, StructuredAnswer]:
    profile = UserProfile(
        profession=row["profession"],
        sector=Sector(row["sector"]),
        concern_kind=ConcernKind(row["concern_kind"]),
        hazard=HazardKind(row["hazard"]),
        location=Location(row["county"], row["state"]),
        timeline_years=row["timeline_years"],
    )
    record = QuestionRecord(
        id=row["id"],
        profile=profile,
        template_id=row["template_id"],
        infrastructure=row["infrastructure"],
        question_text=row["question"],
    )
    answer = StructuredAnswer(
        intro=row["answer_intro"],
        segments=tuple(row["answer_segments"]),
        retrieved_doc_ids=tuple(row["retrieved_doc_ids"]),
    )
    return record, answer
