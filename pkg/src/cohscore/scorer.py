"""Feature assembly, level decoding, evaluation metrics and the file pipelines.

The model sees seven features in a fixed order: the coherent-window ratio
(increasing constraint) followed by the six punctuation error counts (all
decreasing). Levels encode as 0 poor, 1 moderate, 2 excellent; regression
scores decode back by round-half-up and clamping.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Sequence

import numpy as np

from . import gbrt
from .corpus import Essay
from .punct import PunctErrorCounts, ReferenceLabels, count_essay, resolve_reference
from .sampling import coh_ratio, essay_windows, heuristic_discriminator

FEATURE_NAMES = (
    "num_coh_norm",
    "num_del_comma",
    "num_ins_comma",
    "num_rep_comma",
    "num_del_period",
    "num_ins_period",
    "num_rep_period",
)

# Increasing for the coherence ratio, decreasing for every error count.
MONOTONE_CONSTRAINTS = (1, -1, -1, -1, -1, -1, -1)

FEATURES_CSV_HEADER = ["essay_id", *FEATURE_NAMES, "level"]
PREDICTIONS_CSV_HEADER = ["essay_id", "raw_score", "level"]


class CoherenceLevel(IntEnum):
    POOR = 0
    MODERATE = 1
    EXCELLENT = 2


def assemble_features(ratio: float, counts: PunctErrorCounts) -> np.ndarray:
    """Pack the ratio and the six counts into the fixed feature order."""
    if math.isnan(ratio) or not 0.0 <= ratio <= 1.0:
        raise ValueError(f"num_coh_norm outside [0, 1]: {ratio}")
    d = counts.as_dict()
    return np.array([ratio] + [float(d[name]) for name in FEATURE_NAMES[1:]])


def score_to_level(score: float) -> CoherenceLevel:
    """Round half-up to the nearest level, clamped to [0, 2]."""
    if math.isnan(score):
        raise ValueError("cannot decode NaN score")
    return CoherenceLevel(int(min(2, max(0, math.floor(score + 0.5)))))


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    confusion: tuple[tuple[int, ...], ...]  # rows gold, columns predicted
    per_class: tuple[ClassMetrics, ...]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    zero_denominator_classes: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "confusion": [list(row) for row in self.confusion],
            "per_class": [
                {"precision": m.precision, "recall": m.recall, "f1": m.f1}
                for m in self.per_class
            ],
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "zero_denominator_classes": list(self.zero_denominator_classes),
        }


def evaluate(predicted: Sequence[int], gold: Sequence[int]) -> EvalReport:
    """Three-class precision/recall/F1, macro-averaged without class weights.

    Empty denominators (a class never predicted, or absent from gold) score
    0 and are reported in zero_denominator_classes.
    """
    if len(predicted) != len(gold):
        raise ValueError(f"{len(predicted)} predictions for {len(gold)} gold labels")
    if len(gold) == 0:
        raise ValueError("nothing to evaluate")
    confusion = [[0, 0, 0] for _ in range(3)]
    for p, g in zip(predicted, gold):
        confusion[int(g)][int(p)] += 1
    per_class = []
    flagged = []
    for c in range(3):
        tp = confusion[c][c]
        predicted_c = sum(confusion[g][c] for g in range(3))
        gold_c = sum(confusion[c])
        if predicted_c == 0 or gold_c == 0:
            flagged.append(c)
        precision = tp / predicted_c if predicted_c else 0.0
        recall = tp / gold_c if gold_c else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class.append(ClassMetrics(precision, recall, f1))
    return EvalReport(
        confusion=tuple(tuple(row) for row in confusion),
        per_class=tuple(per_class),
        macro_precision=sum(m.precision for m in per_class) / 3,
        macro_recall=sum(m.recall for m in per_class) / 3,
        macro_f1=sum(m.f1 for m in per_class) / 3,
        zero_denominator_classes=tuple(flagged),
    )


# --- feature/prediction files -------------------------------------------------

@dataclass
class FeatureRow:
    essay_id: str
    features: np.ndarray
    level: Optional[int]


def essay_feature_row(
    essay: Essay,
    record: ReferenceLabels,
    probs: Optional[Sequence[float]] = None,
    k: int = 3,
    threshold: float = 0.5,
) -> FeatureRow:
    """Full feature extraction for one essay.

    `probs` carries externally computed window probabilities; when None the
    bigram heuristic scores the essay's own windows of size k.
    """
    reference = resolve_reference(essay.text(), record)
    counts = count_essay(essay.text(), reference)
    if probs is None:
        probs = [heuristic_discriminator(w) for w in essay_windows(essay, k)]
    ratio = coh_ratio(probs, threshold)
    return FeatureRow(essay.id, assemble_features(ratio, counts), essay.level)


def write_features_csv(path: str, rows: Sequence[FeatureRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(FEATURES_CSV_HEADER)
        for row in rows:
            writer.writerow(
                [row.essay_id]
                + [repr(float(v)) for v in row.features]
                + ["" if row.level is None else int(row.level)]
            )


def read_features_csv(path: str) -> list[FeatureRow]:
    rows: list[FeatureRow] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != FEATURES_CSV_HEADER:
            raise ValueError(
                f"{path}: expected header {','.join(FEATURES_CSV_HEADER)}, "
                f"got {','.join(header or [])}"
            )
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(FEATURES_CSV_HEADER):
                raise ValueError(f"{path}:{lineno}: expected {len(FEATURES_CSV_HEADER)} fields")
            level = None if rec[-1] == "" else int(rec[-1])
            if level is not None and level not in (0, 1, 2):
                raise ValueError(f"{path}:{lineno}: level must be 0, 1 or 2")
            rows.append(FeatureRow(rec[0], np.array([float(v) for v in rec[1:-1]]), level))
    return rows


def _matrix(rows: Sequence[FeatureRow]) -> np.ndarray:
    return np.stack([r.features for r in rows]) if rows else np.empty((0, len(FEATURE_NAMES)))


@dataclass
class TrainReport:
    kind: str
    rmse: float
    per_round_rmse: list[float]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "rmse": self.rmse, "per_round_rmse": self.per_round_rmse}


def train_model(
    rows: Sequence[FeatureRow],
    kind: str,
    config: gbrt.TrainConfig = gbrt.TrainConfig(),
    monotone: bool = True,
    n_trees: int = 30,
    seed: int = 0,
):
    """Fit the chosen regressor on (features -> level). Returns (model, report)."""
    if not rows:
        raise ValueError("no feature rows to train on")
    missing = [r.essay_id for r in rows if r.level is None]
    if missing:
        raise ValueError(f"rows without gold level: {', '.join(missing[:5])}")
    X = _matrix(rows)
    y = np.array([float(r.level) for r in rows])
    if kind == "gbrt":
        constraints = MONOTONE_CONSTRAINTS if monotone else None
        model = gbrt.fit_gbrt(X, y, config, constraints, feature_names=FEATURE_NAMES)
        curve = list(model.per_round_rmse or [])
    elif kind == "rf":
        model = gbrt.fit_rf(X, y, n_trees=n_trees, seed=seed, feature_names=FEATURE_NAMES)
        curve = []
    elif kind == "linear":
        model = gbrt.fit_linear(X, y, feature_names=FEATURE_NAMES)
        curve = []
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    rmse = float(np.sqrt(np.mean((model.predict(X) - y) ** 2)))
    if not curve:
        curve = [rmse]
    return model, TrainReport(kind, rmse, curve)


def train_pipeline(
    features_path: str,
    model_path: str,
    kind: str,
    config: gbrt.TrainConfig = gbrt.TrainConfig(),
    monotone: bool = True,
    n_trees: int = 30,
    seed: int = 0,
) -> TrainReport:
    rows = read_features_csv(features_path)
    model, report = train_model(rows, kind, config, monotone, n_trees, seed)
    gbrt.save_model(model_path, model)
    return report


@dataclass
class Prediction:
    essay_id: str
    raw_score: float
    level: int


def predict_rows(rows: Sequence[FeatureRow], model) -> list[Prediction]:
    if tuple(model.feature_names) != FEATURE_NAMES:
        raise ValueError(
            f"model features {list(model.feature_names)} do not match {list(FEATURE_NAMES)}"
        )
    if not rows:
        return []
    scores = model.predict(_matrix(rows))
    return [
        Prediction(r.essay_id, float(s), int(score_to_level(float(s))))
        for r, s in zip(rows, scores)
    ]


def write_predictions_csv(path: str, predictions: Sequence[Prediction]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PREDICTIONS_CSV_HEADER)
        for p in predictions:
            writer.writerow([p.essay_id, repr(p.raw_score), p.level])


def read_predictions_csv(path: str) -> list[Prediction]:
    preds = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != PREDICTIONS_CSV_HEADER:
            raise ValueError(f"{path}: bad predictions header")
        for rec in reader:
            if rec:
                preds.append(Prediction(rec[0], float(rec[1]), int(rec[2])))
    return preds


def predict_pipeline(features_path: str, model_path: str, out_path: str) -> list[Prediction]:
    rows = read_features_csv(features_path)
    model = gbrt.load_model(model_path)
    predictions = predict_rows(rows, model)
    write_predictions_csv(out_path, predictions)
    return predictions
