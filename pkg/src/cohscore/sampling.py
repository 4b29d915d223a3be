"""Sentence windows, discriminator training samples and the coherence ratio.

Windows of k consecutive sentences (k=2 or 3) are the unit the local
coherence discriminator scores. Training data pairs each window (a positive)
with a corrupted copy in which one sentence was swapped for another sentence
of the same essay (a negative). At inference time the per-window coherent
probabilities are reduced to a single ratio feature.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .corpus import Essay

COHERENT = 1
INCOHERENT = 0

_MAX_REDRAWS = 10


@dataclass(frozen=True)
class Window:
    essay_id: str
    index: int
    sentences: tuple[str, ...]


@dataclass(frozen=True)
class LabeledSample:
    essay_id: str
    sentences: tuple[str, ...]
    label: int
    replaced_pos: Optional[int] = None


def make_windows(sentences: Sequence[str], k: int, essay_id: str = "") -> list[Window]:
    """All windows of k consecutive sentences, in order.

    An essay shorter than k yields one undersized window covering all of it
    (inference must score every essay); an empty essay yields none.
    """
    if k not in (2, 3):
        raise ValueError(f"window size must be 2 or 3, got {k}")
    n = len(sentences)
    if n == 0:
        return []
    if n < k:
        return [Window(essay_id, 0, tuple(sentences))]
    return [Window(essay_id, i, tuple(sentences[i : i + k])) for i in range(n - k + 1)]


def essay_windows(essay: Essay, k: int) -> list[Window]:
    return make_windows(essay.sentences(), k, essay_id=essay.id)


def gen_negative(
    sentences: Sequence[str],
    window_start: int,
    k: int,
    rng: np.random.Generator,
    essay_id: str = "",
) -> Optional[LabeledSample]:
    """Corrupt one slot of the window with a sentence from outside it.

    The slot is drawn uniformly from the k window positions, the replacement
    uniformly from the sentences outside the window. A draw that equals the
    replaced sentence is redrawn up to 10 times, after which the window is
    skipped (returns None). Also returns None when no sentence outside the
    window exists.
    """
    n = len(sentences)
    candidates = [j for j in range(n) if j < window_start or j >= window_start + k]
    if not candidates:
        return None
    pos = int(rng.integers(k))
    replaced = sentences[window_start + pos]
    for _ in range(1 + _MAX_REDRAWS):
        j = candidates[int(rng.integers(len(candidates)))]
        if sentences[j] != replaced:
            corrupted = list(sentences[window_start : window_start + k])
            corrupted[pos] = sentences[j]
            return LabeledSample(essay_id, tuple(corrupted), INCOHERENT, replaced_pos=pos)
    return None


def _essay_rng(seed: int, essay_id: str) -> np.random.Generator:
    digest = hashlib.sha256(essay_id.encode("utf-8")).digest()
    return np.random.default_rng(
        np.random.SeedSequence([seed, int.from_bytes(digest[:8], "big")])
    )


def gen_dataset(essays: Iterable[Essay], k: int, seed: int) -> list[LabeledSample]:
    """Balanced positive/negative samples over all full-size windows.

    Every window of k consecutive sentences is a positive; one negative is
    attempted right after each positive. Essays shorter than k contribute
    nothing. Output is deterministic given (essay order, seed): each essay
    draws from its own generator derived from (seed, essay id).
    """
    samples: list[LabeledSample] = []
    for essay in essays:
        sentences = essay.sentences()
        if len(sentences) < k:
            continue
        rng = _essay_rng(seed, essay.id)
        for start in range(len(sentences) - k + 1):
            samples.append(
                LabeledSample(essay.id, tuple(sentences[start : start + k]), COHERENT)
            )
            negative = gen_negative(sentences, start, k, rng, essay_id=essay.id)
            if negative is not None:
                samples.append(negative)
    return samples


def coh_ratio(
    probs: Sequence[float], threshold: float = 0.5, empty_default: float = 1.0
) -> float:
    """Fraction of windows judged coherent (probability >= threshold).

    An essay that produced no windows gets `empty_default`: a single
    sentence exhibits no local incoherence.
    """
    probs = list(probs)
    for p in probs:
        if not 0.0 <= p <= 1.0 or math.isnan(p):
            raise ValueError(f"window probability outside [0, 1]: {p}")
    if not probs:
        return empty_default
    return sum(1 for p in probs if p >= threshold) / len(probs)


def _bigram_counts(sentence: str) -> Counter:
    return Counter(sentence[i : i + 2] for i in range(len(sentence) - 1))


def _cosine(a: Counter, b: Counter) -> float:
    norm_a = math.sqrt(sum(v * v for v in a.values()))
    norm_b = math.sqrt(sum(v * v for v in b.values()))
    if norm_a == 0.0 and norm_b == 0.0:
        return 1.0
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    dot = sum(v * b[key] for key, v in a.items())
    # rounding can push the quotient a hair past 1.0
    return min(1.0, dot / (norm_a * norm_b))


def heuristic_discriminator(window: Window) -> float:
    """Surface stand-in for a trained discriminator.

    Scores the window by the minimum character-bigram cosine similarity over
    adjacent sentence pairs; a single-sentence window scores 1.0. Lets the
    pipeline run end to end without any neural extractor.
    """
    if not window.sentences:
        raise ValueError("window has no sentences")
    if len(window.sentences) == 1:
        return 1.0
    vectors = [_bigram_counts(s) for s in window.sentences]
    return min(_cosine(vectors[i], vectors[i + 1]) for i in range(len(vectors) - 1))


def write_windows(path: str, windows: Iterable[Window]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for w in windows:
            fh.write(
                json.dumps(
                    {"essay_id": w.essay_id, "window_id": w.index, "sentences": list(w.sentences)},
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_windows(path: str) -> list[Window]:
    windows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            windows.append(Window(obj["essay_id"], obj["window_id"], tuple(obj["sentences"])))
    return windows


def write_samples(path: str, samples: Iterable[LabeledSample]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(
                json.dumps(
                    {
                        "essay_id": s.essay_id,
                        "sentences": list(s.sentences),
                        "label": s.label,
                        "replaced_pos": s.replaced_pos,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_coh_preds(path: str) -> dict[str, dict[int, float]]:
    """Read coherence predictions grouped as {essay_id: {window_id: p}}."""
    preds: dict[str, dict[int, float]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            essay_id, window_id = obj["essay_id"], int(obj["window_id"])
            p = float(obj["p_coherent"])
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{path}:{lineno}: p_coherent outside [0, 1]: {p}")
            per_essay = preds.setdefault(essay_id, {})
            if window_id in per_essay:
                raise ValueError(f"{path}:{lineno}: duplicate window {essay_id}/{window_id}")
            per_essay[window_id] = p
    return preds
