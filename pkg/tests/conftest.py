from __future__ import annotations

import re
from pathlib import Path

import numpy as np
import pytest

from hazeval.gateway import Provider, ProviderProfile, TokenScore
from hazeval.mock import DeterministicMockBackend

DATA_DIR = Path(__file__).parent / "data"

ALL_CAPS = ("chat", "embed", "rerank", "score")


def make_provider(backend, capabilities=ALL_CAPS, name="test", cache=None, model_id=None):
    profile = ProviderProfile(
        name=name, model_id=model_id or name, capabilities=frozenset(capabilities))
    return Provider(profile, backend, cache)


@pytest.fixture
def mock_provider():
    return make_provider(DeterministicMockBackend(seed=7), name="mock")


class TermFrequencyBackend:
    """Embedder with one axis per vocab word plus an out-of-vocabulary axis.

    Cosines are hand-computable from word counts, which several oracle tests
    rely on.
    """

    def __init__(self, vocab):
        self.vocab = list(vocab)
        self.embed_calls = 0

    def raw_embed(self, texts):
        self.embed_calls += 1
        out = []
        for text in texts:
            tokens = re.findall(r"[a-z0-9]+", text.lower())
            counts = [float(tokens.count(w)) for w in self.vocab]
            counts.append(float(sum(1 for t in tokens if t not in self.vocab)))
            if not any(counts):
                counts[-1] = 1.0
            out.append(counts)
        return out


class OrthogonalEmbedBackend:
    """Every distinct text gets its own axis: all pairwise cosines are zero."""

    def __init__(self, dim=64):
        self.dim = dim
        self._axes: dict[str, int] = {}

    def raw_embed(self, texts):
        out = []
        for text in texts:
            axis = self._axes.setdefault(text, len(self._axes))
            if axis >= self.dim:
                raise AssertionError("OrthogonalEmbedBackend ran out of axes")
            v = np.zeros(self.dim)
            v[axis] = 1.0
            out.append(v.tolist())
        return out


class ConstantScoreBackend:
    """Scorer assigning a fixed logprob to every whitespace token."""

    def __init__(self, logprob=-0.1):
        self.logprob = logprob
        self.calls = []

    def raw_score(self, prompt, completion):
        self.calls.append((prompt, completion))
        return [TokenScore(tok, self.logprob) for tok in completion.split()]


class ClaimEffectScoreBackend:
    """Scorer whose per-token logprob depends on marker claims in the prompt.

    logprob per token = base + sum of `effects[marker]` for markers present in
    the prompt. Constant across tokens, so geometric-mean confidence equals
    exp(base + sum(effects of present markers)) exactly: every delta is hand
    computable.
    """

    def __init__(self, base=-0.5, effects=None):
        self.base = base
        self.effects = dict(effects or {})

    def raw_score(self, prompt, completion):
        lp = self.base
        for marker, effect in self.effects.items():
            if marker in prompt:
                lp += effect
        lp = min(lp, 0.0)
        return [TokenScore(tok, lp) for tok in completion.split()]
