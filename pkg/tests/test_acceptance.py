"""Acceptance suite: one test per criterion, each printing a pass line.

Every expected value is produced by an independent in-test oracle (brute
force, enumeration, direct formula evaluation or hand arithmetic) and the
runtime budget of each criterion is asserted. Golden files under
tests/data/golden/ can be regenerated by running with
HAZEVAL_UPDATE_GOLDEN=1 after an intentional behavior change.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import random
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from hazeval import agreement as ag
from hazeval import context_use as cu
from hazeval import readability as rd
from hazeval import relevance as rv
from hazeval import specificity as sp
from hazeval.claims import AtomicClaim
from hazeval.corpus import build_index
from hazeval.dataset import (
    PLACEHOLDERS,
    StructuredAnswer,
    dataset_row,
    generate_records,
    load_hazard_table,
)
from hazeval.gateway import TokenScore
from hazeval.mock import DeterministicMockBackend
from hazeval.pipeline import RunConfig, run

from conftest import DATA_DIR, ClaimEffectScoreBackend, make_provider

GOLDEN_DIR = DATA_DIR / "golden"


class _Budget:
    def __init__(self, name: str, seconds: float):
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc_type is None:
            assert elapsed < self.seconds, f"{self.name} took {elapsed:.2f}s (budget {self.seconds}s)"
            print(f"[PASS] {self.name} ({elapsed:.2f}s < {self.seconds}s)")
        elif exc_type.__name__ != "Skipped":
            print(f"[FAIL] {self.name}")
        return False


def test_eq1_aggregate_matches_brute_force_oracle():
    with _Budget("Eq-1 oracle equivalence (1,000 random label matrices)", 5.0):
        rng = random.Random(1001)
        for case in range(1000):
            n_claims = rng.randint(1, 15)
            matrix = [
                {d: rng.choice([1, 0, "na", "na"]) for d in sp.DIMENSIONS}
                for _ in range(n_claims)
            ]
            if case % 7 == 0:  # force an all-na dimension
                for row in matrix:
                    row["intensity"] = "na"
            if case % 2:
                weights = sp.SpecificityWeights()
            else:
                weights = sp.SpecificityWeights(alpha={
                    d: rng.uniform(0.05, 2.0) for d in sp.DIMENSIONS})

            vectors = [sp.ConsensusVector(claim_id=f"c{i}", values=row)
                       for i, row in enumerate(matrix)]
            actual = sp.aggregate(sp.dimension_average(vectors), weights)

            # Independent float oracle, same dimension order: exact equality.
            num = 0.0
            den = 0.0
            f_num = Fraction(0)
            f_den = Fraction(0)
            for d in sp.DIMENSIONS:
                numeric = [row[d] for row in matrix if row[d] != "na"]
                if not numeric:
                    continue
                avg = sum(numeric) / len(numeric)
                num += weights.alpha[d] * avg
                den += weights.alpha[d]
                f_num += Fraction(weights.alpha[d]) * Fraction(sum(numeric), len(numeric))
                f_den += Fraction(weights.alpha[d])
            if den == 0.0:
                assert actual is None
            else:
                assert actual == num / den
                assert abs(actual - float(f_num / f_den)) < 1e-12


def test_majority_vote_matches_count_then_precedence_oracle():
    with _Budget("Majority-vote oracle (all 27 triples per dimension)", 1.0):
        def oracle(labels):
            counts = {lab: labels.count(lab) for lab in ("yes", "no", "na")}
            best = max(counts.values())
            winner = next(lab for lab in ("no", "na", "yes") if counts[lab] == best)
            tied = [lab for lab in ("yes", "no", "na") if counts[lab] == best]
            if len(tied) == 1:
                winner = tied[0]
            return {"yes": 1, "no": 0, "na": "na"}[winner]

        for dim in sp.DIMENSIONS:
            for triple in itertools.product(("yes", "no", "na"), repeat=3):
                judgments = []
                for lab in triple:
                    labels = {d: sp.JudgeLabel.NA for d in sp.DIMENSIONS}
                    labels[dim] = sp.JudgeLabel.parse(lab)
                    judgments.append(sp.ClaimJudgment(
                        claim_id="c", judge_id="j", labels=labels,
                        reasoning={d: "" for d in sp.DIMENSIONS}))
                assert sp.majority_vote(judgments).values[dim] == oracle(triple), (dim, triple)


# Word banks with hand-verified syllable counts under the package heuristic.
_ONE = ["cat", "dog", "sun", "road", "storm", "flood", "heat", "wind", "rain", "stone"]
_TWO = ["window", "water", "danger", "city", "metal", "river", "happy", "table", "number", "signal"]
_THREE = ["hospital", "banana", "umbrella", "elephant", "horizon"]


def _controlled_text(words_per_sentence: int, n_three: int, n_two: int, sentences: int):
    assert n_three + n_two <= words_per_sentence
    n_one = words_per_sentence - n_three - n_two
    body = _THREE[:n_three] + _TWO[:n_two] + _ONE[:n_one]
    assert len(body) == words_per_sentence
    sentence = " ".join(body) + "."
    syllables = 3 * n_three + 2 * n_two + n_one
    return " ".join([sentence] * sentences), syllables / words_per_sentence


def test_readability_formulas_on_controlled_texts():
    with _Budget("Readability formulas (20 ASL/ASW-controlled texts)", 1.0):
        fixtures = [
            (1, 0, 0, 1), (1, 1, 0, 1), (4, 0, 2, 2), (5, 1, 1, 2), (6, 2, 2, 1),
            (8, 0, 4, 3), (10, 0, 5, 4), (10, 2, 3, 2), (12, 3, 4, 2), (10, 0, 0, 3),
            (14, 4, 5, 1), (15, 5, 5, 2), (16, 2, 8, 2), (18, 3, 9, 1), (20, 5, 10, 2),
            (7, 1, 3, 3), (9, 2, 4, 2), (11, 1, 6, 2), (13, 2, 7, 1), (10, 5, 5, 1),
        ]
        assert len(fixtures) == 20
        for words_per_sentence, n_three, n_two, sentences in fixtures:
            text, asw = _controlled_text(words_per_sentence, n_three, n_two, sentences)
            report = rd.readability(text)
            assert report.asl == pytest.approx(words_per_sentence, abs=1e-12)
            assert report.asw == pytest.approx(asw, abs=1e-12)
            expected_fre = 206.835 - 1.015 * words_per_sentence - 84.6 * asw
            expected_fkgl = 0.39 * words_per_sentence + 11.8 * asw - 15.59
            assert report.fre == pytest.approx(expected_fre, abs=1e-6)
            assert report.fkgl == pytest.approx(expected_fkgl, abs=1e-6)

        # The worked examples, straight from the formulas.
        assert rd.fre_score(10, 1.5) == pytest.approx(69.785, abs=1e-6)
        assert rd.fkgl_score(10, 1.5) == pytest.approx(6.01, abs=1e-6)

        # Band classification is total over the reals with the fixed label set.
        fre_labels = {label for _, label in rd.FRE_BANDS}
        assert "Fairly difficult (10th-12th grade)" in fre_labels
        assert "Difficult to read (college level)" in fre_labels
        assert "Very difficult (college graduate or higher)" in fre_labels
        for value in np.linspace(-100, 250, 701):
            assert rd.fre_band(float(value)) in fre_labels
        for value in np.linspace(-5, 30, 351):
            assert rd.fkgl_band(float(value)) in set(rd.FKGL_BAND_LABELS)


def test_confidence_properties():
    with _Budget("Confidence properties (length invariance, monotonicity, bounds)", 5.0):
        class FixedProbsBackend:
            def __init__(self, probs):
                self.probs = probs

            def raw_score(self, prompt, completion):
                return [TokenScore(f"t{i}", math.log(p) if p < 1 else 0.0)
                        for i, p in enumerate(self.probs)]

        for p in (0.25, 0.6180339887, 0.95):
            for n in range(1, 101):
                scorer = make_provider(FixedProbsBackend([p] * n), capabilities=("score",))
                value = cu.confidence("w " * n, "ctx", scorer).value
                assert abs(value - p) < 1e-9, (p, n)

        rng = random.Random(77)
        for _ in range(200):
            probs = [rng.uniform(0.05, 0.95) for _ in range(rng.randint(2, 12))]
            base = cu.confidence_from_scores(
                [TokenScore(f"t{i}", math.log(x)) for i, x in enumerate(probs)]).value
            i = rng.randrange(len(probs))
            bumped = list(probs)
            bumped[i] = min(0.999, bumped[i] + 0.05)
            higher = cu.confidence_from_scores(
                [TokenScore(f"t{i}", math.log(x)) for i, x in enumerate(bumped)]).value
            assert higher > base

        claims = [AtomicClaim(f"c{i}", f"[claim-{i}] body", "answer") for i in range(3)]
        for case in range(1000):
            case_rng = random.Random(9000 + case)
            effects = {f"[claim-{i}]": case_rng.uniform(-0.5, 0.5) for i in range(3)}
            backend = ClaimEffectScoreBackend(base=case_rng.uniform(-2.5, -0.01), effects=effects)
            report = cu.cu_scores("tok tok", "Q?", claims, make_provider(backend, capabilities=("score",)))
            for c in report.per_claim:
                assert -1.0 < c.delta < 1.0
                assert c.relative is not None and c.relative <= 1.0


def test_cu_leave_one_out_matches_hand_arithmetic():
    with _Budget("CU leave-one-out oracle (50 fixtures, 1e-12)", 5.0):
        saw_negative = False
        for case in range(50):
            rng = random.Random(3000 + case)
            n = rng.randint(1, 6)
            base = rng.uniform(-1.5, -0.1)
            effects = {f"[claim-{i}]": rng.uniform(-0.3, 0.3) for i in range(n)}
            if case % 5 == 0:  # guarantee a distracting claim
                effects["[claim-0]"] = -abs(effects["[claim-0]"]) - 0.05
            claims = [AtomicClaim(f"c{i}", f"[claim-{i}] text", "answer") for i in range(n)]
            scorer = make_provider(
                ClaimEffectScoreBackend(base=base, effects=effects), capabilities=("score",))
            report = cu.cu_scores("a b c", "Q?", claims, scorer)

            # Hand arithmetic: constant per-token logprob makes the geometric
            # mean exp(logprob); effects add when the claim is in the prompt.
            lp_full = min(base + sum(effects.values()), 0.0)
            f_full = math.exp(lp_full)
            assert abs(report.baseline_confidence - f_full) < 1e-12
            expected_deltas = []
            expected_rel = []
            for i in range(n):
                lp_without = min(base + sum(v for k, v in effects.items()
                                            if k != f"[claim-{i}]"), 0.0)
                delta = f_full - math.exp(lp_without)
                expected_deltas.append(delta)
                expected_rel.append(delta / f_full)
            for c, ed, er in zip(report.per_claim, expected_deltas, expected_rel):
                assert abs(c.delta - ed) < 1e-12
                assert abs(c.relative - er) < 1e-12
                if ed < 0:
                    saw_negative = True
            assert abs(report.cu - sum(expected_deltas) / n) < 1e-12
            assert abs(report.cu_rel - sum(expected_rel) / n) < 1e-12
        assert saw_negative, "fixtures must include a distracting (negative-delta) claim"


class _CountingRerank:
    """Counting mock: +1 per rendered line containing the keyword, -2 per
    line containing the penalty marker."""

    def __init__(self):
        self.keyword = "grid"
        self.marker = "OFFTOPIC"

    def raw_rerank(self, query, passage):
        score = 0.0
        for line in passage.splitlines():
            if self.keyword in line:
                score += 1.0
            if self.marker in line:
                score -= 2.0
        return score


def test_rerank_attribution_matches_argsort_oracle():
    with _Budget("Rerank attribution oracle (200 random answers)", 5.0):
        provider = make_provider(_CountingRerank(), capabilities=("rerank",))
        saw_changed = saw_unchanged = saw_negative = False
        for case in range(200):
            rng = random.Random(5000 + case)
            m = rng.randint(1, 7)
            segments = []
            for i in range(m):
                kind = rng.choice(["grid", "grid", "plain", "OFFTOPIC"])
                segments.append(f"{kind} segment {i}")
            answer = StructuredAnswer(intro="intro grid line", segments=tuple(segments))

            attributions = rv.loo_attribution("grid question", answer, provider)

            # Oracle: apply the counting rule directly to renderings.
            def mock_score(rendered: str) -> float:
                total = 0.0
                for line in rendered.splitlines():
                    total += 1.0 if "grid" in line else 0.0
                    total -= 2.0 if "OFFTOPIC" in line else 0.0
                return total

            full = mock_score(answer.rendered())
            expected = [full - mock_score(answer.rendered(skip=i)) for i in range(m)]
            assert [a.delta for a in attributions] == expected
            assert all(a.full_score == full for a in attributions)

            reranked = rv.rerank_answer(answer, attributions)
            oracle_order = tuple(sorted(range(m), key=lambda i: (-expected[i], i)))
            assert reranked.order == oracle_order
            assert reranked.changed == (oracle_order != tuple(range(m)))
            saw_changed |= reranked.changed
            saw_unchanged |= not reranked.changed

            for a in attributions:
                if a.delta < 0:
                    saw_negative = True
                    remaining = StructuredAnswer(
                        intro=answer.intro,
                        segments=tuple(s for i, s in enumerate(answer.segments)
                                       if i != a.segment_index))
                    assert mock_score(remaining.rendered()) > full
        assert saw_changed and saw_unchanged and saw_negative


def test_retrieval_matches_brute_force_on_random_corpora():
    with _Budget("Retrieval oracle (100 random corpora up to 200 docs)", 5.0):
        vocabulary = ["flood", "storm", "heat", "bridge", "water", "power", "cold",
                      "road", "wire", "dam", "pump", "levee", "pier", "adobe", "pine"]
        embed_provider = make_provider(DeterministicMockBackend(seed=11), capabilities=("embed",))
        for case in range(100):
            rng = random.Random(6000 + case)
            n_docs = rng.randint(6, 200)
            docs = [(f"d{i:03d}", " ".join(rng.choice(vocabulary) for _ in range(6)))
                    for i in range(n_docs)]
            index = build_index(docs, embed_provider.embed)
            query = " ".join(rng.choice(vocabulary) for _ in range(4))
            results = index.retrieve(query, k=5)

            # Brute force over every stored document vector, ties by doc_id.
            [qv] = embed_provider.embed([query])
            scored = sorted(
                (-float(index.doc(doc_id).embedding @ qv), doc_id) for doc_id, _ in docs
            )[:5]
            assert [r.doc_id for r in results] == [doc_id for _, doc_id in scored], case
            assert [r.score for r in results] == [-neg for neg, _ in scored]


def test_dataset_determinism_and_table_consistency():
    with _Budget("Dataset determinism + consistency (1,000 records)", 10.0):
        table = load_hazard_table()
        runs = []
        for _ in range(2):
            records = generate_records(1000, base_seed=20260101)
            payload = "\n".join(
                json.dumps(dataset_row(r, StructuredAnswer(intro="", segments=("x",)), "m"),
                           ensure_ascii=False)
                for r in records
            ).encode("utf-8")
            runs.append((records, payload))
        assert runs[0][1] == runs[1][1], "two generations under one seed must be byte-identical"
        for record in runs[0][0]:
            assert not any(tok in record.question_text for tok in PLACEHOLDERS)
            assert "[" not in record.question_text
            assert record.profile.location in table.locations(record.profile.hazard)


def test_agreement_statistics_criteria():
    with _Budget("Agreement statistics (percent, kappa, Spearman oracles)", 5.0):
        a = ["yes"] * 50
        b = ["yes"] * 46 + ["no"] * 4
        assert ag.percent_agreement(a, b) == pytest.approx(0.92)

        unanimous = [[3, 0], [0, 3], [3, 0], [0, 3], [0, 3]]
        assert ag.fleiss_kappa(unanimous) == pytest.approx(1.0)

        rng = random.Random(444)
        for _ in range(100):
            n_items = rng.randint(2, 25)
            n_cats = rng.randint(2, 5)
            n_raters = rng.randint(2, 6)
            matrix = []
            for _ in range(n_items):
                row = [0] * n_cats
                for _ in range(n_raters):
                    row[rng.randrange(n_cats)] += 1
                matrix.append(row)
            # Textbook formula oracle.
            p_i = [(sum(c * c for c in row) - n_raters) / (n_raters * (n_raters - 1))
                   for row in matrix]
            p_bar = sum(p_i) / n_items
            p_j = [sum(row[j] for row in matrix) / (n_items * n_raters)
                   for j in range(n_cats)]
            pe = sum(x * x for x in p_j)
            expected = None if pe >= 1.0 - 1e-15 else (p_bar - pe) / (1 - pe)
            actual = ag.fleiss_kappa(matrix)
            if expected is None:
                assert actual is None
            else:
                assert abs(actual - expected) < 1e-9

        rng_np = np.random.default_rng(445)
        for _ in range(50):
            n = int(rng_np.integers(3, 80))
            x = rng_np.integers(0, 6, size=n).astype(float)
            y = rng_np.normal(size=n)
            rho, _ = ag.spearman(x.tolist(), y.tolist())
            if rho is None:
                assert len(set(x.tolist())) == 1
                continue

            def avg_ranks(v):
                order = np.argsort(v, kind="stable")
                ranks = np.empty(len(v))
                i = 0
                while i < len(v):
                    j = i
                    while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
                        j += 1
                    ranks[order[i:j + 1]] = (i + j) / 2 + 1
                    i = j + 1
                return ranks

            expected = np.corrcoef(avg_ranks(x), avg_ranks(y))[0, 1]
            assert abs(rho - expected) < 1e-9


def _golden_config(out_dir: Path, cache_dir: Path) -> RunConfig:
    return RunConfig.from_dict({
        "seed": 20260501,
        "count": 10,
        "corpus_path": str(DATA_DIR / "corpus.jsonl"),
        "output_dir": str(out_dir),
        "cache_dir": str(cache_dir),
        "parallelism": 4,
        "providers": {
            "mock": {"backend": "mock", "mock_seed": 13, "model_id": "mock-v1",
                     "capabilities": ["chat", "embed", "rerank", "score"]},
        },
        "roles": {"generator": "mock", "evaluator": "mock", "embed": "mock",
                  "rerank": "mock", "score": "mock"},
    })


GOLDEN_FILES = ("dataset.jsonl", "report_rows.jsonl", "report_aggregate.json")


def test_end_to_end_golden_run(tmp_path):
    with _Budget("End-to-end golden run (10 questions, all metrics, mock providers)", 60.0):
        out_dir = tmp_path / "out"
        cache_dir = tmp_path / "cache"
        result = run(_golden_config(out_dir, cache_dir))
        assert result.error_count == 0
        assert result.provider_calls["mock"] > 0

        if os.environ.get("HAZEVAL_UPDATE_GOLDEN"):
            GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
            for name in GOLDEN_FILES:
                (GOLDEN_DIR / name).write_bytes((out_dir / name).read_bytes())
            pytest.skip("golden files updated")

        for name in GOLDEN_FILES:
            assert (out_dir / name).read_bytes() == (GOLDEN_DIR / name).read_bytes(), (
                f"{name} deviates from the committed golden report")

        warm = run(_golden_config(tmp_path / "out2", cache_dir))
        assert warm.provider_calls["mock"] == 0, "warm-cache rerun must make zero provider calls"
        for name in GOLDEN_FILES:
            assert (tmp_path / "out2" / name).read_bytes() == (GOLDEN_DIR / name).read_bytes()


def test_secondary_annotation_round_trip(tmp_path):
    with _Budget("Annotation round-trip (50 questions, 10 annotators, redundancy 2)", 60.0):
        from fastapi.testclient import TestClient

        from hazeval.annotation.assign import build_study
        from hazeval.annotation.service import annotation_schema, create_app

        questions = [
            {
                "question_id": f"q{i:03d}",
                "payload": {
                    "profile": {"profession": "Hydraulic Engineer", "hazard": "drought"},
                    "question": f"Scripted question {i}?",
                    "answer_intro": "Intro.",
                    "answer_segments": ["Point 1.", "Point 2."],
                    "sources": [{"doc_id": f"s{j}", "body": f"Source {j}"} for j in range(5)],
                },
            }
            for i in range(50)
        ]
        annotators = [
            {"annotator_id": f"ann{i:02d}", "display_name": f"A{i}", "study_code": f"code-{i}"}
            for i in range(10)
        ]
        study = build_study("acceptance", questions, annotators, redundancy=2, seed=9)
        study_path = tmp_path / "study.json"
        study_path.write_text(json.dumps(study))
        app = create_app(study_path, tmp_path / "log.jsonl", secret="acc")
        client = TestClient(app)

        # Every annotator receives exactly ten tasks.
        tokens = {}
        for i, annotator in enumerate(annotators):
            login = client.post("/api/login", json={"code": f"code-{i}"}).json()
            tokens[annotator["annotator_id"]] = {"Authorization": f"Bearer {login['token']}"}
            tasks = client.get("/api/tasks", params={"annotator": annotator["annotator_id"]},
                               headers=tokens[annotator["annotator_id"]]).json()["tasks"]
            assert len(tasks) == 10

        # Scripted labels: hazard disagrees on exactly 5 of 50 questions;
        # location always agrees; relevance differs by annotator slot.
        by_question: dict[str, list[dict]] = {}
        for task in study["tasks"]:
            by_question.setdefault(task["question_id"], []).append(task)
        disagree_set = {f"q{i:03d}" for i in range(5)}
        for question_id, pair in sorted(by_question.items()):
            pair = sorted(pair, key=lambda t: t["annotator_id"])
            for slot, task in enumerate(pair):
                hazard = "yes"
                if slot == 1 and question_id in disagree_set:
                    hazard = "no"
                body = {
                    "specificity": {"hazard": hazard, "location": "yes",
                                    "timeline": "na", "intensity": "na"},
                    "relevance": 5 + slot,
                    "context_used_docs": [True, False, True, False, True],
                    "context_used_overall": 6,
                    "confidence": 9,
                    "comment": None,
                }
                response = client.post(
                    f"/api/tasks/{task['task_id']}/annotation", json=body,
                    headers=tokens[task["annotator_id"]])
                assert response.status_code == 200

        export = client.get("/api/export").json()["records"]
        assert len(export) == 100

        report = client.get("/api/agreement").json()
        assert report["n_double_annotated"] == 50
        # Hand-computed: hazard agrees on 45/50 -> 90%; location 50/50.
        assert report["human_human"]["hazard"]["agree"] == 45
        assert report["human_human"]["hazard"]["percent"] == pytest.approx(90.0)
        assert report["human_human"]["location"]["percent"] == pytest.approx(100.0)

        # Hand-computed Fleiss kappa for the hazard matrix:
        # 45 rows (2,0,0), 5 rows (1,1,0) over categories (yes,no,na).
        p_i = [1.0] * 45 + [0.0] * 5
        p_bar = sum(p_i) / 50
        p_yes = (45 * 2 + 5) / 100
        p_no = 5 / 100
        pe = p_yes ** 2 + p_no ** 2
        expected_kappa = (p_bar - pe) / (1 - pe)
        assert report["human_human"]["hazard"]["fleiss_kappa"] == pytest.approx(
            expected_kappa, abs=1e-9)

        # The committed UI schema fixture matches the live validator schema.
        fixture = json.loads(
            (Path(__file__).parent.parent / "frontend" / "src" / "annotation.schema.json")
            .read_text())
        assert fixture == annotation_schema()
