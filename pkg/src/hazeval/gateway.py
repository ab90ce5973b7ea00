"""Uniform client layer for chat, embedding, reranking and token scoring.

A Provider pairs a declared capability set with a backend (HTTP or an
in-process mock) and adds capability safety, content-addressed response
caching and a call counter. The HTTP dialect follows the widely deployed
open-inference-server JSON bodies: /chat/completions, /embeddings, /rerank,
and /completions with echo-style logprobs for forced-completion scoring.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import httpx
import numpy as np

from .errors import CapabilityError, ConfigurationError, TransportError

CAPABILITIES = ("chat", "embed", "rerank", "score")

DEFAULT_TEMPERATURE = 0.1
DEFAULT_TOP_P = 0.9
JUDGE_TEMPERATURE = 0.0


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple[tuple[str, str], ...]
    temperature: float = DEFAULT_TEMPERATURE
    top_p: float = DEFAULT_TOP_P
    max_tokens: int = 1024

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not (0 < self.top_p <= 1):
            raise ValueError("top_p must be in (0, 1]")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")

    @classmethod
    def user(cls, text: str, **kwargs) -> "ChatRequest":
        return cls(messages=(("user", text),), **kwargs)

    def text(self) -> str:
        return "\n".join(content for _, content in self.messages)


@dataclass(frozen=True)
class TokenScore:
    token_text: str
    logprob: float
    top_alternatives: tuple[tuple[str, float], ...] | None = None

    def __post_init__(self):
        if self.logprob > 0:
            raise ValueError("logprob must be <= 0")
        if self.top_alternatives is not None:
            lps = [lp for _, lp in self.top_alternatives]
            if lps != sorted(lps, reverse=True):
                raise ValueError("alternatives must be sorted by descending logprob")


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_seconds: float = 0.5


@dataclass(frozen=True)
class ProviderProfile:
    name: str
    model_id: str
    capabilities: frozenset[str]
    endpoint_url: str = ""
    auth_env: str | None = None
    retry: RetryPolicy = field(default_factory=RetryPolicy)

    def __post_init__(self):
        unknown = self.capabilities - set(CAPABILITIES)
        if unknown:
            raise ConfigurationError(f"unknown capabilities {sorted(unknown)}")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


class ResponseCache:
    """Content-addressed response store: one JSON file per request hash."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def key(self, capability: str, model_id: str, request: dict) -> str:
        payload = canonical_json({"capability": capability, "model_id": model_id, "request": request})
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def get(self, key: str):
        path = self.directory / f"{key}.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def put(self, key: str, response) -> None:
        # Unique tmp name, then atomic replace: concurrent writers of the same
        # key cannot interleave partial content.
        path = self.directory / f"{key}.json"
        tmp = path.with_name(f"{key}.{os.getpid()}.{id(response)}.tmp")
        tmp.write_text(canonical_json(response), encoding="utf-8")
        tmp.replace(path)


class HttpBackend:
    """JSON-over-HTTP backend with retry on transport failures and 5xx."""

    def __init__(self, profile: ProviderProfile, transport: httpx.BaseTransport | None = None):
        if not profile.endpoint_url:
            raise ConfigurationError(f"provider {profile.name!r} has no endpoint_url")
        self.profile = profile
        headers = {}
        if profile.auth_env:
            token = os.environ.get(profile.auth_env, "")
            if not token:
                raise ConfigurationError(
                    f"auth env var {profile.auth_env!r} for provider {profile.name!r} is unset"
                )
            headers["Authorization"] = f"Bearer {token}"
        self._client = httpx.Client(
            base_url=profile.endpoint_url, headers=headers, transport=transport, timeout=120.0
        )

    def _post(self, path: str, body: dict) -> dict:
        policy = self.profile.retry
        last_error: Exception | None = None
        for attempt in range(policy.max_attempts):
            if attempt:
                time.sleep(policy.backoff_seconds * (2 ** (attempt - 1)))
            try:
                response = self._client.post(path, json=body)
            except httpx.TransportError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = TransportError(f"{path} returned {response.status_code}")
                continue
            if response.status_code >= 400:
                raise TransportError(f"{path} returned {response.status_code}: {response.text[:200]}")
            return response.json()
        raise TransportError(
            f"provider {self.profile.name!r} failed after {policy.max_attempts} attempts: {last_error}"
        )

    def raw_chat(self, request: ChatRequest) -> str:
        body = {
            "model": self.profile.model_id,
            "messages": [{"role": r, "content": c} for r, c in request.messages],
            "temperature": request.temperature,
            "top_p": request.top_p,
            "max_tokens": request.max_tokens,
        }
        data = self._post("/chat/completions", body)
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed chat response: {exc}") from exc

    def raw_embed(self, texts: Sequence[str]) -> list[list[float]]:
        body = {"model": self.profile.model_id, "input": list(texts)}
        data = self._post("/embeddings", body)
        try:
            rows = sorted(data["data"], key=lambda d: d["index"])
            return [row["embedding"] for row in rows]
        except (KeyError, TypeError) as exc:
            raise TransportError(f"malformed embedding response: {exc}") from exc

    def raw_rerank(self, query: str, passage: str) -> float:
        body = {"model": self.profile.model_id, "query": query, "documents": [passage]}
        data = self._post("/rerank", body)
        try:
            return float(data["results"][0]["relevance_score"])
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed rerank response: {exc}") from exc

    def raw_score(self, prompt: str, completion: str) -> list[TokenScore]:
        body = {
            "model": self.profile.model_id,
            "prompt": prompt + completion,
            "max_tokens": 0,
            "echo": True,
            "logprobs": 5,
            "temperature": 0.0,
        }
        data = self._post("/completions", body)
        try:
            lp = data["choices"][0]["logprobs"]
            tokens = lp["tokens"]
            logprobs = lp["token_logprobs"]
            offsets = lp["text_offset"]
            tops = lp.get("top_logprobs") or [None] * len(tokens)
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"provider does not expose echo logprobs: {exc}") from exc
        scores = []
        for token, logprob, offset, top in zip(tokens, logprobs, offsets, tops):
            if offset < len(prompt):
                continue
            alternatives = None
            if top:
                alternatives = tuple(sorted(top.items(), key=lambda kv: -kv[1]))
            scores.append(TokenScore(token, min(float(logprob), 0.0), alternatives))
        return scores


class Provider:
    """Capability-checked, cached, counted access to one model backend."""

    def __init__(self, profile: ProviderProfile, backend, cache: ResponseCache | None = None):
        self.profile = profile
        self.backend = backend
        self.cache = cache
        self.calls = 0

    @property
    def name(self) -> str:
        return self.profile.name

    def _require(self, capability: str) -> None:
        if capability not in self.profile.capabilities:
            raise CapabilityError(
                f"provider {self.profile.name!r} does not declare capability {capability!r}"
            )

    def _cached(self, capability: str, request: dict, call: Callable[[], object],
                encode: Callable, decode: Callable):
        if self.cache is not None:
            key = self.cache.key(capability, self.profile.model_id, request)
            hit = self.cache.get(key)
            if hit is not None:
                return decode(hit)
        self.calls += 1
        result = call()
        if self.cache is not None:
            self.cache.put(key, encode(result))
        return result

    def chat(self, request: ChatRequest) -> str:
        self._require("chat")
        req = {
            "messages": [[r, c] for r, c in request.messages],
            "temperature": request.temperature,
            "top_p": request.top_p,
            "max_tokens": request.max_tokens,
        }
        return self._cached("chat", req, lambda: self.backend.raw_chat(request),
                            encode=lambda s: s, decode=lambda s: s)

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        """Embed a batch; every vector is unit-normalized by the gateway."""
        self._require("embed")
        if not texts:
            raise ValueError("embedding batch is empty")
        req = {"texts": list(texts)}

        def call():
            vectors = self.backend.raw_embed(texts)
            dims = {len(v) for v in vectors}
            if len(vectors) != len(texts) or len(dims) != 1:
                raise TransportError(f"embedding batch shape mismatch: dims={sorted(dims)}")
            return [_normalize(np.asarray(v, dtype=float)) for v in vectors]

        return self._cached(
            "embed", req, call,
            encode=lambda vs: [[float(x) for x in v] for v in vs],
            decode=lambda raw: [np.asarray(v, dtype=float) for v in raw],
        )

    def rerank(self, query: str, passage: str) -> float:
        self._require("rerank")
        if not query.strip() or not passage.strip():
            raise ValueError("rerank query and passage must be non-empty")
        req = {"query": query, "passage": passage}
        return self._cached("rerank", req, lambda: float(self.backend.raw_rerank(query, passage)),
                            encode=lambda s: s, decode=lambda s: float(s))

    def score_completion(self, prompt: str, completion: str) -> list[TokenScore]:
        """Per-token logprobs of a forced completion, prompt tokens excluded."""
        self._require("score")
        if not completion.strip():
            raise ValueError("completion must be non-empty")
        req = {"prompt": prompt, "completion": completion}

        def call():
            scores = self.backend.raw_score(prompt, completion)
            if not scores:
                raise TransportError("scorer returned zero completion tokens")
            return scores

        def encode(scores: list[TokenScore]):
            return [
                {
                    "token": s.token_text,
                    "logprob": s.logprob,
                    "top": None if s.top_alternatives is None
                    else [[t, lp] for t, lp in s.top_alternatives],
                }
                for s in scores
            ]

        def decode(raw) -> list[TokenScore]:
            return [
                TokenScore(
                    d["token"], d["logprob"],
                    None if d["top"] is None else tuple((t, lp) for t, lp in d["top"]),
                )
                for d in raw
            ]

        return self._cached("score", req, call, encode=encode, decode=decode)


def _normalize(v: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError("zero-norm embedding cannot be normalized")
    return v / norm


def parallel_map(fn: Callable, items: Iterable, limit: int = 8) -> list:
    """Apply fn with bounded parallelism; results keep the input order."""
    items = list(items)
    if limit <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=limit) as pool:
        return list(pool.map(fn, items))
