"""Synthetic essay corpus with controlled coherence and punctuation defects.

Essays are built from per-topic character pools: sentences of one topic share
most of their characters (high bigram overlap), foreign-topic sentences share
none. Corrupting an essay therefore moves the measurable signals directly:
swapping in foreign sentences lowers the coherent-window ratio, and flipping
punctuation marks creates exactly the del/ins/rep counts the reference diff
will find. Gold levels are a noisy monotone function of those two signals,
which makes the corpus a controlled testbed for the scoring models.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Essay, PunctLabelSeq, SlotLabel, derive_labels, reinsert_labels
from .punct import PunctErrorCounts, ReferenceLabels, base_sha256

_TOPIC_COUNT = 8
_CHARS_PER_TOPIC = 30
_TEMPLATE_LEN = 14
_SUBSTITUTE_PROB = 0.04
_COMMA_POS = 7

_MARKS = (SlotLabel.COMMA, SlotLabel.PERIOD)


def _topic_chars(topic: int) -> list[str]:
    start = 0x4E00 + topic * _CHARS_PER_TOPIC
    return [chr(start + j) for j in range(_CHARS_PER_TOPIC)]


def _topic_sentence(topic: int, rng: np.random.Generator) -> str:
    """A variation of the topic's template sentence, comma optional, period final.

    The comma position is fixed so that same-topic sentences keep their
    bigram overlap well above the coherence cutoff.
    """
    chars = _topic_chars(topic)
    template = chars[:_TEMPLATE_LEN]
    extras = chars[_TEMPLATE_LEN:]
    body = [
        extras[int(rng.integers(len(extras)))] if rng.random() < _SUBSTITUTE_PROB else ch
        for ch in template
    ]
    if rng.random() < 0.5:
        body.insert(_COMMA_POS, "，")
    return "".join(body) + "。"


def _corrupt_labels(
    labels: tuple[SlotLabel, ...], n_errors: int, rng: np.random.Generator
) -> tuple[tuple[SlotLabel, ...], PunctErrorCounts]:
    """Flip up to n_errors slots; returns the author's labels and the true counts."""
    out = list(labels)
    counts = PunctErrorCounts()
    for _ in range(n_errors):
        op = int(rng.integers(3))
        if op == 0:  # author adds a redundant mark
            slots = [i for i, v in enumerate(out) if v == SlotLabel.NONE]
            if not slots:
                continue
            i = slots[int(rng.integers(len(slots)))]
            mark = _MARKS[int(rng.integers(2))]
            out[i] = mark
            counts += PunctErrorCounts(
                del_comma=1 if mark == SlotLabel.COMMA else 0,
                del_period=1 if mark == SlotLabel.PERIOD else 0,
            )
        elif op == 1:  # author drops a required mark
            slots = [i for i, v in enumerate(out) if v != SlotLabel.NONE]
            if not slots:
                continue
            i = slots[int(rng.integers(len(slots)))]
            dropped = out[i]
            out[i] = SlotLabel.NONE
            counts += PunctErrorCounts(
                ins_comma=1 if dropped == SlotLabel.COMMA else 0,
                ins_period=1 if dropped == SlotLabel.PERIOD else 0,
            )
        else:  # author swaps comma and period
            slots = [i for i, v in enumerate(out) if v != SlotLabel.NONE]
            if not slots:
                continue
            i = slots[int(rng.integers(len(slots)))]
            correct = out[i]
            out[i] = SlotLabel.PERIOD if correct == SlotLabel.COMMA else SlotLabel.COMMA
            counts += PunctErrorCounts(
                rep_comma=1 if correct == SlotLabel.COMMA else 0,
                rep_period=1 if correct == SlotLabel.PERIOD else 0,
            )
    return tuple(out), counts


@dataclass
class SynthEssay:
    essay: Essay
    reference: ReferenceLabels
    injected: PunctErrorCounts
    clean_labels: PunctLabelSeq


# Defect intensity tiers: (foreign fraction range, error count range). Drawn
# per essay so the corpus spans clean, middling and broken essays with little
# mass sitting right on a level boundary.
_TIERS = (
    ((0.38, 0.50), (6, 9)),
    ((0.15, 0.28), (3, 5)),
    ((0.00, 0.06), (0, 3)),
)


def generate_corpus(
    n_essays: int,
    seed: int,
    noise_sigma: float = 0.08,
    coh_weight: float = 2.0,
    error_weight: float = 0.22,
    thresholds: tuple[float, float] = (-0.5, 0.8),
) -> list[SynthEssay]:
    """Essays whose gold level is a noisy monotone function of the defects.

    level_score = coh_weight * coherent_ratio - error_weight * total_errors
    plus Gaussian noise, cut at `thresholds` into levels 0/1/2. The
    coherent ratio is measured with the bigram heuristic over trisent
    windows of the corrupted text, so the gold level tracks exactly what the
    feature extractors will see.
    """
    from .sampling import coh_ratio, essay_windows, heuristic_discriminator

    out: list[SynthEssay] = []
    for idx in range(n_essays):
        rng = np.random.default_rng(np.random.SeedSequence([seed, idx]))
        topic = int(rng.integers(_TOPIC_COUNT))
        n_sent = int(rng.integers(10, 17))
        sentences = [_topic_sentence(topic, rng) for _ in range(n_sent)]

        foreign_range, error_range = _TIERS[int(rng.integers(len(_TIERS)))]
        foreign_frac = float(rng.uniform(*foreign_range))
        n_foreign = int(round(foreign_frac * n_sent))
        foreign_positions = rng.choice(n_sent, size=n_foreign, replace=False)
        for pos in foreign_positions:
            other = int((topic + 1 + rng.integers(_TOPIC_COUNT - 1)) % _TOPIC_COUNT)
            sentences[int(pos)] = _topic_sentence(other, rng)

        clean_text = "".join(sentences)
        clean_labels = derive_labels(clean_text)
        n_errors = int(rng.integers(*error_range))
        author_labels, injected = _corrupt_labels(clean_labels.labels, n_errors, rng)
        author_text = reinsert_labels(PunctLabelSeq(clean_labels.base, author_labels))

        essay = Essay(id=f"synth-{idx:04d}", paragraphs=[author_text])
        probs = [heuristic_discriminator(w) for w in essay_windows(essay, 3)]
        ratio = coh_ratio(probs)
        score = (
            coh_weight * ratio
            - error_weight * injected.total()
            + float(rng.normal(0.0, noise_sigma))
        )
        essay.level = 0 if score < thresholds[0] else (1 if score < thresholds[1] else 2)

        reference = ReferenceLabels(
            essay.id, base_sha256(clean_labels.base), clean_labels.labels
        )
        out.append(SynthEssay(essay, reference, injected, clean_labels))
    return out
