"""End-to-end orchestration: generate, retrieve, answer, evaluate, aggregate.

A run is driven by a single JSON config. Every model call goes through the
gateway cache, so re-running an identical config replays cached responses and
reproduces the report byte for byte; per-question metric failures become
row-level error entries rather than run aborts.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import claims as claims_mod
from . import context_use, relevance, robustness, specificity
from .corpus import Index, build_index, read_corpus_jsonl
from .dataset import (
    QuestionRecord,
    StructuredAnswer,
    build_answer_prompt,
    dataset_row,
    generate_records,
    parse_answer,
)
from .errors import ConfigurationError
from .gateway import (
    ChatRequest,
    HttpBackend,
    Provider,
    ProviderProfile,
    ResponseCache,
    RetryPolicy,
    parallel_map,
)
from .mock import DeterministicMockBackend
from .readability import ReadabilityReport, readability, summarize_readability
from .robustness import VariantKind

METRIC_NAMES = ("specificity", "robustness", "relevance", "cu", "readability")

ROLES = ("generator", "evaluator", "embed", "rerank", "score")

# Capabilities each metric needs, by role.
_METRIC_REQUIREMENTS = {
    "specificity": (("evaluator", "chat"),),
    "robustness": (("generator", "chat"), ("evaluator", "chat"), ("embed", "embed")),
    "relevance": (("evaluator", "chat"), ("embed", "embed"), ("rerank", "rerank")),
    "cu": (("evaluator", "chat"), ("embed", "embed"), ("score", "score")),
    "readability": (),
}


@dataclass
class RunConfig:
    seed: int
    count: int
    corpus_path: str
    output_dir: str
    providers: dict[str, dict]
    roles: dict[str, str]
    cache_dir: str | None = None
    parallelism: int = 8
    retrieval_k: int = 5
    k_judges: int = 3
    n_inverse_questions: int = 5
    metrics: dict[str, bool] = field(default_factory=lambda: {m: True for m in METRIC_NAMES})
    robustness_kinds: list[str] = field(default_factory=lambda: [k.value for k in VariantKind])
    masked_relevance: bool = True
    csv_export: bool = False

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        try:
            config = cls(**data)
        except TypeError as exc:
            raise ConfigurationError(str(exc)) from exc
        config.validate()
        return config

    def validate(self) -> None:
        if self.count < 1:
            raise ConfigurationError("count must be >= 1")
        if self.retrieval_k != 5:
            raise ConfigurationError("retrieval_k must be 5: the answer prompt has five abstract slots")
        if self.k_judges < 1:
            raise ConfigurationError("k_judges must be >= 1")
        for metric in self.metrics:
            if metric not in METRIC_NAMES:
                raise ConfigurationError(f"unknown metric toggle {metric!r}")
        for kind in self.robustness_kinds:
            VariantKind(kind)
        for role in ("generator", "embed"):
            if role not in self.roles:
                raise ConfigurationError(f"role {role!r} is required")
        for role, provider in self.roles.items():
            if role not in ROLES:
                raise ConfigurationError(f"unknown role {role!r}")
            if provider not in self.providers:
                raise ConfigurationError(f"role {role!r} points at unknown provider {provider!r}")
        self._check_capability("generator", "chat")
        self._check_capability("embed", "embed")
        for metric, enabled in self.metrics.items():
            if not enabled:
                continue
            for role, capability in _METRIC_REQUIREMENTS[metric]:
                if role not in self.roles:
                    raise ConfigurationError(f"metric {metric!r} needs role {role!r}")
                self._check_capability(role, capability)

    def _check_capability(self, role: str, capability: str) -> None:
        provider = self.providers[self.roles[role]]
        if capability not in provider.get("capabilities", []):
            raise ConfigurationError(
                f"provider {self.roles[role]!r} (role {role!r}) lacks capability {capability!r}"
            )

    def enabled(self, metric: str) -> bool:
        return bool(self.metrics.get(metric, False))


def build_providers(config: RunConfig) -> dict[str, Provider]:
    cache = ResponseCache(config.cache_dir) if config.cache_dir else None
    providers: dict[str, Provider] = {}
    for name, spec in config.providers.items():
        profile = ProviderProfile(
            name=name,
            model_id=spec.get("model_id", name),
            capabilities=frozenset(spec.get("capabilities", [])),
            endpoint_url=spec.get("endpoint_url", ""),
            auth_env=spec.get("auth_env"),
            retry=RetryPolicy(
                max_attempts=spec.get("max_attempts", 3),
                backoff_seconds=spec.get("backoff_seconds", 0.5),
            ),
        )
        backend_kind = spec.get("backend", "http")
        if backend_kind == "mock":
            backend = DeterministicMockBackend(seed=spec.get("mock_seed", 0))
        elif backend_kind == "http":
            backend = HttpBackend(profile)
        else:
            raise ConfigurationError(f"unknown backend {backend_kind!r} for provider {name!r}")
        providers[name] = Provider(profile, backend, cache)
    return providers


@dataclass
class RunResult:
    dataset_path: Path
    rows_path: Path
    aggregate_path: Path
    aggregate: dict
    rows: list[dict]
    provider_calls: dict[str, int]
    error_count: int


class AnswerPipeline:
    """Retrieval plus grounded generation for one question record."""

    def __init__(self, index: Index, generator: Provider, k: int = 5):
        self.index = index
        self.generator = generator
        self.k = k

    def answer(self, record: QuestionRecord) -> StructuredAnswer:
        results = self.index.retrieve(record.question_text, k=self.k)
        docs = [self.index.doc(r.doc_id).body for r in results]
        prompt = build_answer_prompt(record, docs, record.profile)
        raw = self.generator.chat(ChatRequest.user(prompt))
        return parse_answer(raw, retrieved_doc_ids=tuple(r.doc_id for r in results))


def _evaluate_question(
    record: QuestionRecord,
    answer: StructuredAnswer,
    config: RunConfig,
    providers: dict[str, Provider],
    index: Index,
    pipeline: AnswerPipeline,
    claims_dir: Path | None = None,
) -> dict:
    evaluator = providers.get(config.roles.get("evaluator", ""), None)
    embed = providers[config.roles["embed"]]
    row: dict = {"id": record.id, "question": record.question_text}
    errors: dict[str, str] = {}

    evidence_docs = [index.doc(doc_id) for doc_id in answer.retrieved_doc_ids]
    evidence_texts = [d.body for d in evidence_docs]

    if config.enabled("specificity"):
        try:
            judges = [evaluator] * config.k_judges
            report = specificity.score_answer(
                answer, evidence_texts, judges, answer_id=record.id)
            if claims_dir is not None:
                claims_dir.mkdir(parents=True, exist_ok=True)
                claims_mod.save_claim_cache(claims_dir / f"{record.id}.jsonl", report.claims)
            row["specificity"] = {
                "score": report.score,
                "averages": {d: report.averages[d] for d in specificity.DIMENSIONS},
                "claim_count": len(report.claims),
                "artifact": report.to_json(),
            }
        except Exception as exc:
            errors["specificity"] = str(exc)

    if config.enabled("robustness"):
        try:
            records = robustness.run_robustness(
                record, answer, pipeline.answer, evaluator, embed,
                kinds=tuple(VariantKind(k) for k in config.robustness_kinds),
                rng_seed=config.seed,
            )
            summary = robustness.summarize_robustness(records)
            row["robustness"] = {
                "paraphrase": summary["paraphrase"],
                "perturbation": summary["perturbation"],
                "variants": [
                    {"kind": r.kind.value, "question": r.variant_question,
                     "consistency": r.consistency}
                    for r in records
                ],
            }
        except Exception as exc:
            errors["robustness"] = str(exc)

    if config.enabled("relevance"):
        try:
            rerank_provider = providers[config.roles["rerank"]]
            score = relevance.masked_relevance(
                record.question_text, answer, config.n_inverse_questions,
                evaluator, embed, masked=config.masked_relevance,
            )
            attributions = relevance.loo_attribution(record.question_text, answer, rerank_provider)
            reranked = relevance.rerank_answer(answer, attributions)
            row["relevance"] = {
                "masked_relevance": score,
                "full_score": reranked.full_score,
                "deltas": [a.delta for a in attributions],
                "order": list(reranked.order),
                "changed": reranked.changed,
            }
        except Exception as exc:
            errors["relevance"] = str(exc)

    if config.enabled("cu"):
        try:
            scorer = providers[config.roles["score"]]
            context_claims = claims_mod.extract_context_claims(evidence_docs, evaluator, embed)
            cu_report = context_use.cu_scores(
                answer.full_text(), record.question_text, context_claims, scorer)
            row["context_utilization"] = cu_report.to_json()
            row["context_utilization"]["claim_count"] = len(context_claims)
        except Exception as exc:
            errors["cu"] = str(exc)

    if config.enabled("readability"):
        try:
            report = readability(answer.full_text())
            row["readability"] = {
                "fre": report.fre, "fkgl": report.fkgl,
                "asl": report.asl, "asw": report.asw,
                "fre_band": report.fre_band, "fkgl_band": report.fkgl_band,
            }
        except Exception as exc:
            errors["readability"] = str(exc)

    row["errors"] = errors
    return row


def _mean_std(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((x - mean) ** 2 for x in values) / (n - 1)
    return mean, math.sqrt(var)


def _metric_block(values: list, nulls: int, errors: int) -> dict | None:
    numeric = [v for v in values if v is not None]
    nulls += sum(1 for v in values if v is None)
    if not numeric:
        return {"nulls": nulls, "errors": errors} if (nulls or errors) else None
    mean, std = _mean_std(numeric)
    return {"mean": mean, "std": std, "n": len(numeric), "nulls": nulls, "errors": errors}


def _collect(rows: list[dict], section: str, key: str) -> tuple[list, int]:
    values = []
    errors = 0
    for row in rows:
        if section in row.get("errors", {}):
            errors += 1
            continue
        block = row.get(section)
        if block is None:
            continue
        values.append(block.get(key))
    return values, errors


def aggregate_report(rows: list[dict], generator: str = "", evaluator: str = "") -> dict:
    """Mean and sample std per metric over non-null values, with counts."""
    if not rows:
        raise ValueError("no rows to aggregate")
    spec_values, spec_errors = _collect(rows, "specificity", "score")
    para_values, rob_errors = _collect(rows, "robustness", "paraphrase")
    pert_values, _ = _collect(rows, "robustness", "perturbation")
    rel_values, rel_errors = _collect(rows, "relevance", "masked_relevance")
    full_values, _ = _collect(rows, "relevance", "full_score")
    changed, _ = _collect(rows, "relevance", "changed")
    cu_values, cu_errors = _collect(rows, "context_utilization", "cu")
    cu_rel_values, _ = _collect(rows, "context_utilization", "cu_rel")
    fre_values, read_errors = _collect(rows, "readability", "fre")
    fkgl_values, _ = _collect(rows, "readability", "fkgl")

    metrics = {}
    for name, values, errs in (
        ("specificity", spec_values, spec_errors),
        ("robustness_paraphrase", para_values, rob_errors),
        ("robustness_perturbation", pert_values, rob_errors),
        ("answer_relevance", rel_values, rel_errors),
        ("rerank_full_score", full_values, rel_errors),
        ("cu", cu_values, cu_errors),
        ("cu_rel", cu_rel_values, cu_errors),
        ("fre", fre_values, read_errors),
        ("fkgl", fkgl_values, read_errors),
    ):
        block = _metric_block(values, 0, errs)
        if block is not None:
            metrics[name] = block

    aggregate = {
        "generator": generator,
        "evaluator": evaluator,
        "n_questions": len(rows),
        "rows_with_errors": sum(1 for r in rows if r.get("errors")),
        "answer_changed_count": sum(1 for c in changed if c),
        "metrics": metrics,
    }

    read_rows = [r["readability"] for r in rows
                 if "readability" in r and "readability" not in r.get("errors", {})]
    if read_rows:
        aggregate["readability_bands"] = summarize_readability(
            [readability_from_row(r) for r in read_rows])
    return aggregate


def readability_from_row(block: dict) -> ReadabilityReport:
    return ReadabilityReport(
        fre=block["fre"], fkgl=block["fkgl"], asl=block["asl"], asw=block["asw"],
        fre_band=block["fre_band"], fkgl_band=block["fkgl_band"],
    )


def _dump_jsonl(path: Path, rows: list[dict]) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def write_csv(path: Path, rows: list[dict]) -> None:
    columns = (
        "id", "specificity", "robustness_paraphrase", "robustness_perturbation",
        "answer_relevance", "rerank_full_score", "cu", "cu_rel", "fre", "fkgl",
    )
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([
                row["id"],
                (row.get("specificity") or {}).get("score"),
                (row.get("robustness") or {}).get("paraphrase"),
                (row.get("robustness") or {}).get("perturbation"),
                (row.get("relevance") or {}).get("masked_relevance"),
                (row.get("relevance") or {}).get("full_score"),
                (row.get("context_utilization") or {}).get("cu"),
                (row.get("context_utilization") or {}).get("cu_rel"),
                (row.get("readability") or {}).get("fre"),
                (row.get("readability") or {}).get("fkgl"),
            ])


def run(config: RunConfig) -> RunResult:
    """Execute the full pipeline and write dataset, rows and aggregate files."""
    config.validate()
    providers = build_providers(config)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    generator = providers[config.roles["generator"]]
    embed = providers[config.roles["embed"]]

    corpus = read_corpus_jsonl(config.corpus_path)
    if len(corpus) < config.retrieval_k:
        raise ConfigurationError(
            f"corpus has {len(corpus)} documents, need at least {config.retrieval_k}")
    index = build_index(corpus, embed.embed, embedder_id=embed.profile.model_id)
    pipeline = AnswerPipeline(index, generator, k=config.retrieval_k)

    records = generate_records(config.count, config.seed)
    answers = parallel_map(pipeline.answer, records, limit=config.parallelism)

    dataset_path = out_dir / "dataset.jsonl"
    _dump_jsonl(dataset_path, [
        dataset_row(record, answer, generator.profile.model_id)
        for record, answer in zip(records, answers)
    ])

    claims_dir = out_dir / "claims"

    def evaluate(pair):
        record, answer = pair
        return _evaluate_question(record, answer, config, providers, index, pipeline,
                                  claims_dir=claims_dir)

    rows = parallel_map(evaluate, list(zip(records, answers)), limit=config.parallelism)
    rows_path = out_dir / "report_rows.jsonl"
    _dump_jsonl(rows_path, rows)

    evaluator_name = config.roles.get("evaluator", "")
    aggregate = aggregate_report(
        rows,
        generator=generator.profile.model_id,
        evaluator=providers[evaluator_name].profile.model_id if evaluator_name else "",
    )
    aggregate_path = out_dir / "report_aggregate.json"
    aggregate_path.write_text(
        json.dumps(aggregate, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")

    if config.csv_export:
        write_csv(out_dir / "report.csv", rows)

    return RunResult(
        dataset_path=dataset_path,
        rows_path=rows_path,
        aggregate_path=aggregate_path,
        aggregate=aggregate,
        rows=rows,
        provider_calls={name: p.calls for name, p in providers.items()},
        error_count=sum(1 for r in rows if r.get("errors")),
    )
