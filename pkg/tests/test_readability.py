from __future__ import annotations

import pytest

from hazeval import readability as rd

# Words with hand-derived syllable counts under the vowel-group heuristic.
ONE_SYL = ["cat", "dog", "sun", "road", "storm", "flood", "heat", "wind", "rain", "stone"]
TWO_SYL = ["window", "water", "danger", "city", "metal", "river", "happy", "table", "number", "signal"]
THREE_SYL = ["hospital", "banana", "umbrella", "elephant"]


def test_syllable_counter_hand_cases():
    for w in ONE_SYL:
        assert rd.count_syllables(w) == 1, w
    for w in TWO_SYL:
        assert rd.count_syllables(w) == 2, w
    for w in THREE_SYL:
        assert rd.count_syllables(w) == 3, w


def test_syllable_counter_floors_at_one():
    assert rd.count_syllables("hmm") == 1
    assert rd.count_syllables("b") == 1


def test_syllable_counter_silent_e_and_le_endings():
    assert rd.count_syllables("stone") == 1   # silent trailing e
    assert rd.count_syllables("table") == 2   # -le keeps its syllable
    assert rd.count_syllables("one") == 1


def test_sentence_split_protects_decimals():
    sentences = rd.split_sentences("The flow was 3.5 meters per second. It rose later.")
    assert len(sentences) == 2
    assert "3.5" in sentences[0]


def test_sentence_split_ignores_list_markers():
    text = "1. The dam held firm. 2. The road stayed dry."
    assert len(rd.split_sentences(text)) == 2
    multiline = "1. First point stands alone\n2. Second point stands alone"
    assert len(rd.split_sentences(multiline)) == 1  # no terminal punctuation: one sentence


def test_readability_formula_asl10_asw15():
    # Ten words per sentence, half one-syllable and half two-syllable words.
    sentence = "cat window dog water sun danger road city storm metal."
    text = " ".join([sentence] * 4)
    report = rd.readability(text)
    assert report.asl == pytest.approx(10.0)
    assert report.asw == pytest.approx(1.5)
    assert report.fre == pytest.approx(206.835 - 1.015 * 10 - 84.6 * 1.5, abs=1e-6)
    assert report.fre == pytest.approx(69.785, abs=1e-6)
    assert report.fkgl == pytest.approx(0.39 * 10 + 11.8 * 1.5 - 15.59, abs=1e-6)
    assert report.fkgl == pytest.approx(6.01, abs=1e-6)


def test_readability_single_monosyllable_word():
    report = rd.readability("Cat.")
    assert report.asl == 1.0 and report.asw == 1.0
    assert report.fre == pytest.approx(121.22, abs=1e-6)


def test_fre_decreases_in_asl_and_asw():
    assert rd.fre_score(10, 1.5) > rd.fre_score(11, 1.5)
    assert rd.fre_score(10, 1.5) > rd.fre_score(10, 1.6)


def test_fkgl_increases_in_asl_and_asw():
    assert rd.fkgl_score(10, 1.5) < rd.fkgl_score(11, 1.5)
    assert rd.fkgl_score(10, 1.5) < rd.fkgl_score(10, 1.6)


def test_band_classification_total_over_reals():
    for value in (-50.0, 0.0, 29.999, 30.0, 49.9, 50.0, 59.9, 60.0, 75.0, 121.22, 300.0):
        assert rd.fre_band(value) in {label for _, label in rd.FRE_BANDS}
    for value in (-3.0, 0.0, 5.9, 6.0, 8.9, 9.0, 12.9, 13.0, 16.0, 16.01, 25.0):
        assert rd.fkgl_band(value) in set(rd.FKGL_BAND_LABELS)


def test_band_edges():
    assert rd.fre_band(60.0).startswith("Plain English")
    assert rd.fre_band(55.0).startswith("Fairly difficult")
    assert rd.fre_band(40.0).startswith("Difficult to read")
    assert rd.fre_band(10.0).startswith("Very difficult")
    assert rd.fkgl_band(5.0).startswith("Elementary")
    assert rd.fkgl_band(7.5).startswith("Middle school")
    assert rd.fkgl_band(10.0).startswith("High school")
    assert rd.fkgl_band(14.0).startswith("College undergraduate")
    assert rd.fkgl_band(17.5).startswith("Graduate")


def test_empty_text_rejected():
    with pytest.raises(ValueError):
        rd.readability("...")


def test_syllable_counter_deterministic():
    for w in ONE_SYL + TWO_SYL + THREE_SYL:
        assert rd.count_syllables(w) == rd.count_syllables(w)


def test_summary_emits_band_counts():
    reports = [rd.readability("Cat."), rd.readability(
        "Organizational rehabilitation methodologies necessitate communication protocols. " * 3)]
    summary = rd.summarize_readability(reports)
    assert summary["count"] == 2
    assert sum(summary["fre_bands"].values()) == 2
    assert sum(summary["fkgl_bands"].values()) == 2
    assert summary["average_fre"] == pytest.approx(
        (reports[0].fre + reports[1].fre) / 2)
