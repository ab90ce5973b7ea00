from __future__ import annotations

import math
import re

import pytest

from hazeval import robustness as rb
from hazeval.dataset import (
    ConcernKind,
    HazardKind,
    HazardLocationTable,
    Location,
    QuestionRecord,
    QuestionTemplate,
    Sector,
    StructuredAnswer,
    UserProfile,
    generate_record,
    load_hazard_table,
    parse_answer,
)
from hazeval.mock import DeterministicMockBackend, ScriptedChatBackend

from conftest import OrthogonalEmbedBackend, TermFrequencyBackend, make_provider


@pytest.fixture
def mock_chat():
    return make_provider(DeterministicMockBackend(seed=4), capabilities=("chat",))


@pytest.fixture
def mock_embed():
    return make_provider(DeterministicMockBackend(seed=4), capabilities=("embed",))


def _bag(text: str) -> dict:
    tokens = re.findall(r"[a-z0-9]+", text.lower())
    return {t: tokens.count(t) for t in tokens}


def test_paraphrase_rotation_changes_surface_not_bag(mock_chat):
    q = "What strategies protect the grid from wildfire in Kern, CA?"
    out = rb.paraphrase_question(q, mock_chat)
    assert " ".join(out.lower().split()) != " ".join(q.lower().split())
    assert _bag(out) == _bag(q)


def test_paraphrase_empty_question_rejected(mock_chat):
    with pytest.raises(ValueError):
        rb.paraphrase_question("  ", mock_chat)


def test_paraphrase_identical_twice_is_error():
    backend = ScriptedChatBackend(["Same question?", "Same question?"])
    chat = make_provider(backend, capabilities=("chat",))
    with pytest.raises(ValueError, match="identical"):
        rb.paraphrase_question("Same question?", chat)
    assert len(backend.prompts) == 2


def test_perturb_hazard_mentions_new_hazard_not_old():
    record = generate_record(100, 0)
    for seed in range(20):
        variant = rb.perturb_question(record, None, rb.VariantKind.PERTURB_HAZARD, seed)
        assert variant.profile.hazard != record.profile.hazard
        assert record.profile.hazard.value not in variant.question_text
        assert variant.profile.hazard.value in variant.question_text


def test_perturb_both_changes_both_fields():
    record = generate_record(101, 0)
    for seed in range(20):
        variant = rb.perturb_question(record, None, rb.VariantKind.PERTURB_BOTH, seed)
        assert variant.profile.hazard != record.profile.hazard
        assert variant.profile.location != record.profile.location


def test_perturbations_stay_consistent_with_table():
    table = load_hazard_table()
    kinds = (rb.VariantKind.PERTURB_HAZARD, rb.VariantKind.PERTURB_LOCATION,
             rb.VariantKind.PERTURB_BOTH)
    checked = 0
    for i in range(20):
        record = generate_record(7000, i)
        for seed in range(17):
            for kind in kinds:
                variant = rb.perturb_question(record, table, kind, seed)
                assert variant.profile.location in table.locations(variant.profile.hazard)
                checked += 1
    assert checked >= 1000


def test_perturb_requires_template_regeneration_not_string_patch():
    # The variant is re-instantiated: its text matches the template with the
    # new fields, not a word-substituted original.
    record = generate_record(102, 0)
    variant = rb.perturb_question(record, None, rb.VariantKind.PERTURB_BOTH, 5)
    assert variant.profile.location.render() in variant.question_text
    assert variant.template_id == record.template_id
    assert variant.infrastructure == record.infrastructure


def test_perturb_location_degenerate_single_entry_table():
    loc = Location("Miami-Dade", "FL")
    table = HazardLocationTable(entries={h: (loc,) for h in HazardKind})
    profile = UserProfile(
        profession="Bridge Inspector", sector=Sector.TRANSPORTATION,
        concern_kind=ConcernKind.FACT, hazard=HazardKind.HURRICANE,
        location=loc, timeline_years=10)
    template = QuestionTemplate(id="fact-1", concern_kind=ConcernKind.FACT,
                                body="Vulnerabilities of [INFRASTRUCTURE] to [HAZARD] in [LOCATION]?")
    record = QuestionRecord(id="q", profile=profile, template_id="fact-1",
                            infrastructure="bridge system",
                            question_text="Vulnerabilities of bridge system to hurricane in Miami-Dade, FL?")
    with pytest.raises(ValueError, match="no alternative location"):
        rb.perturb_question(record, table, rb.VariantKind.PERTURB_LOCATION, 0,
                            templates=[template])


def test_perturb_rejects_paraphrase_kind():
    record = generate_record(1, 0)
    with pytest.raises(ValueError):
        rb.perturb_question(record, None, rb.VariantKind.PARAPHRASE, 0)


def test_consistency_identical_answers_is_one(mock_embed):
    answer = parse_answer("1. Same content here.")
    assert rb.consistency_score(answer, answer, mock_embed) == pytest.approx(1.0, abs=1e-6)


def test_consistency_orthogonal_embeddings_is_zero():
    embed = make_provider(OrthogonalEmbedBackend(), capabilities=("embed",))
    a = parse_answer("1. First body.")
    b = parse_answer("1. Second body.")
    assert rb.consistency_score(a, b, embed) == pytest.approx(0.0, abs=1e-9)


def test_consistency_matches_term_frequency_cosine_oracle():
    vocab = ["flood", "levee", "pump", "road"]
    embed = make_provider(TermFrequencyBackend(vocab), capabilities=("embed",))
    a = parse_answer("1. flood flood levee")
    b = parse_answer("1. flood levee pump")
    # Hand cosine: a=(2,1,0,0,+0 oov), b=(1,1,1,0,0).
    expected = (2 * 1 + 1 * 1) / (math.sqrt(5) * math.sqrt(3))
    assert rb.consistency_score(a, b, embed) == pytest.approx(expected, abs=1e-12)


def test_consistency_empty_answer_rejected(mock_embed):
    a = parse_answer("1. ok")
    empty = StructuredAnswer(intro="", segments=())
    with pytest.raises(ValueError):
        rb.consistency_score(a, empty, mock_embed)


def test_consistency_excludes_confidence_line(mock_embed):
    a = parse_answer("1. Same point.\nConfidence: 90% sure.")
    b = parse_answer("1. Same point.\nConfidence: 10% guessing.")
    assert rb.consistency_score(a, b, mock_embed) == pytest.approx(1.0, abs=1e-9)


def test_run_robustness_echo_pipeline_fixture():
    # Echo pipeline: the answer is the question text itself. The scripted
    # paraphraser rewords the question, so paraphrase consistency < 1; the
    # perturbed variants change hazard/location tokens, so those drop too.
    record = generate_record(300, 0)
    backend = ScriptedChatBackend([
        "Reworded entirely different phrasing about protection measures?"])
    chat = make_provider(backend, capabilities=("chat",))
    embed = make_provider(DeterministicMockBackend(seed=4), capabilities=("embed",))

    def echo_pipeline(r: QuestionRecord) -> StructuredAnswer:
        return StructuredAnswer(intro=r.question_text, segments=())

    original = echo_pipeline(record)
    records = rb.run_robustness(record, original, echo_pipeline, chat, embed, rng_seed=1)
    by_kind = {r.kind: r for r in records}
    assert by_kind[rb.VariantKind.PARAPHRASE].consistency < 1.0
    for kind in rb.PERTURBATION_KINDS:
        assert by_kind[kind].consistency < 1.0


def test_run_robustness_empty_kinds_returns_empty(mock_chat, mock_embed):
    record = generate_record(301, 0)
    original = StructuredAnswer(intro="x", segments=())
    out = rb.run_robustness(record, original, lambda r: original, mock_chat, mock_embed,
                            kinds=())
    assert out == []


def test_run_robustness_degenerate_constant_pipeline_scores_one(mock_chat, mock_embed):
    # A system that ignores its input scores 1.0 everywhere, flagging itself.
    record = generate_record(302, 0)
    constant = parse_answer("1. The same answer regardless of the question.")
    records = rb.run_robustness(record, constant, lambda r: constant, mock_chat, mock_embed,
                                rng_seed=2)
    assert all(r.consistency == pytest.approx(1.0, abs=1e-9) for r in records)
    summary = rb.summarize_robustness(records)
    assert summary["paraphrase"] == pytest.approx(1.0, abs=1e-9)
    assert summary["perturbation"] == pytest.approx(1.0, abs=1e-9)


def test_summarize_robustness_splits_columns():
    answer = StructuredAnswer(intro="a", segments=())
    records = [
        rb.RobustnessRecord("q", rb.VariantKind.PARAPHRASE, "p?", answer, 0.9),
        rb.RobustnessRecord("q", rb.VariantKind.PERTURB_HAZARD, "h?", answer, 0.5),
        rb.RobustnessRecord("q", rb.VariantKind.PERTURB_LOCATION, "l?", answer, 0.7),
    ]
    summary = rb.summarize_robustness(records)
    assert summary["paraphrase"] == pytest.approx(0.9)
    assert summary["perturbation"] == pytest.approx(0.6)
