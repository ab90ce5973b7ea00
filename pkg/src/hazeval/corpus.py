"""Exact embedding-based retrieval over a user-supplied abstract corpus.

The index is immutable after build and retrieval is exact nearest-neighbor
by cosine similarity (no approximation), with ties broken by doc_id so runs
are reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class DocumentRecord:
    doc_id: str
    body: str
    embedding: np.ndarray

    def __post_init__(self):
        if not self.body:
            raise ValueError(f"document {self.doc_id!r} has an empty body")
        norm = float(np.linalg.norm(self.embedding))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"document {self.doc_id!r} embedding is not unit-normalized")


@dataclass(frozen=True)
class RetrievalResult:
    doc_id: str
    score: float


class Index:
    """Immutable cosine-similarity index over embedded documents."""

    def __init__(self, docs: list[DocumentRecord], embedder: Callable[[Sequence[str]], list[np.ndarray]],
                 embedder_id: str = ""):
        self._docs = list(docs)
        self._embedder = embedder
        self.embedder_id = embedder_id
        self._matrix = np.stack([d.embedding for d in docs]) if docs else np.zeros((0, 0))

    def __len__(self) -> int:
        return len(self._docs)

    @property
    def dimension(self) -> int:
        return self._matrix.shape[1] if len(self._docs) else 0

    def doc(self, doc_id: str) -> DocumentRecord:
        for d in self._docs:
            if d.doc_id == doc_id:
                return d
        raise KeyError(doc_id)

    def doc_ids(self) -> list[str]:
        return [d.doc_id for d in self._docs]

    def retrieve(self, query: str, k: int = 5) -> list[RetrievalResult]:
        """Top-k documents by cosine score, descending, doc_id breaking ties."""
        if not self._docs:
            raise ValueError("index is empty")
        if k < 1:
            raise ValueError("k must be >= 1")
        [qv] = self._embedder([query])
        qv = np.asarray(qv, dtype=float)
        if qv.shape[0] != self.dimension:
            raise ValueError(
                f"query embedding dimension {qv.shape[0]} != index dimension {self.dimension}"
            )
        # Per-document dots, not one matrix-vector product: identical float
        # accumulation to any brute-force check, so near-ties rank stably.
        ranked = sorted(
            (-float(d.embedding @ qv), d.doc_id) for d in self._docs
        )
        return [RetrievalResult(doc_id=doc_id, score=-neg) for neg, doc_id in ranked[: min(k, len(ranked))]]


def build_index(
    docs: Sequence[tuple[str, str]],
    embed: Callable[[Sequence[str]], list[np.ndarray]],
    embedder_id: str = "",
    embedding_cache: dict[str, list[float]] | None = None,
) -> Index:
    """Embed and normalize every document; doc_ids must be unique.

    An optional sidecar cache (doc_id -> raw vector, keyed externally by the
    embedder identifier) skips re-embedding known documents.
    """
    ids = [doc_id for doc_id, _ in docs]
    dupes = {i for i in ids if ids.count(i) > 1}
    if dupes:
        raise ValueError(f"duplicate doc_ids: {sorted(dupes)}")

    records: list[DocumentRecord] = []
    to_embed = [(doc_id, body) for doc_id, body in docs
                if embedding_cache is None or doc_id not in embedding_cache]
    fresh: dict[str, np.ndarray] = {}
    if to_embed:
        vectors = embed([body for _, body in to_embed])
        if len(vectors) != len(to_embed):
            raise ValueError("embedder returned a different number of vectors than inputs")
        for (doc_id, _), vec in zip(to_embed, vectors):
            fresh[doc_id] = np.asarray(vec, dtype=float)

    dim: int | None = None
    for doc_id, body in docs:
        if embedding_cache is not None and doc_id in embedding_cache:
            vec = np.asarray(embedding_cache[doc_id], dtype=float)
        else:
            vec = fresh[doc_id]
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise ValueError(f"document {doc_id!r} embedded to a zero vector")
        vec = vec / norm
        if dim is None:
            dim = vec.shape[0]
        elif vec.shape[0] != dim:
            raise ValueError(f"embedding dimension mismatch at {doc_id!r}: {vec.shape[0]} != {dim}")
        records.append(DocumentRecord(doc_id=doc_id, body=body, embedding=vec))
        if embedding_cache is not None and doc_id in fresh:
            embedding_cache[doc_id] = [float(x) for x in fresh[doc_id]]
    return Index(records, embed, embedder_id=embedder_id)


def read_corpus_jsonl(path: str | Path) -> list[tuple[str, str]]:
    """Corpus file format: one JSON object per line with doc_id and body."""
    out = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            out.append((row["doc_id"], row["body"]))
    return out


def load_embedding_sidecar(path: str | Path, embedder_id: str) -> dict[str, list[float]]:
    p = Path(path)
    if not p.exists():
        return {}
    data = json.loads(p.read_text(encoding="utf-8"))
    return data.get(embedder_id, {})


def save_embedding_sidecar(path: str | Path, embedder_id: str, cache: dict[str, list[float]]) -> None:
    p = Path(path)
    data = {}
    if p.exists():
        data = json.loads(p.read_text(encoding="utf-8"))
    data[embedder_id] = cache
    p.write_text(json.dumps(data, sort_keys=True), encoding="utf-8")
