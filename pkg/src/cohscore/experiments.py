"""Regression-model comparison harness.

Trains the three regressor kinds on a shared train/test split and reports
precision, recall and macro F1 per configuration: linear and random forest
on trisent-window features, GBRT with and without monotone constraints on
both bisent and trisent features.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import gbrt
from .scorer import FeatureRow, evaluate, predict_rows, train_model


@dataclass(frozen=True)
class ComparisonRow:
    model: str
    window: str  # "bisent" or "trisent"
    precision: float
    recall: float
    macro_f1: float


def _score(train_rows, test_rows, kind, monotone, config, n_trees, seed) -> tuple[float, float, float]:
    model, _ = train_model(train_rows, kind, config, monotone=monotone, n_trees=n_trees, seed=seed)
    predicted = [p.level for p in predict_rows(test_rows, model)]
    gold = [r.level for r in test_rows]
    report = evaluate(predicted, gold)
    return report.macro_precision, report.macro_recall, report.macro_f1


def run_comparison(
    train_rows: dict[int, Sequence[FeatureRow]],
    test_rows: dict[int, Sequence[FeatureRow]],
    config: gbrt.TrainConfig = gbrt.TrainConfig(),
    n_trees: int = 30,
    seed: int = 0,
) -> list[ComparisonRow]:
    """Six-row comparison over feature sets keyed by window size (2 and 3)."""
    for k in (2, 3):
        if k not in train_rows or k not in test_rows:
            raise ValueError(f"missing feature rows for window size {k}")
    window_name = {2: "bisent", 3: "trisent"}
    rows: list[ComparisonRow] = []
    for kind, label in (("linear", "Linear Regression"), ("rf", "Random Forest Regression")):
        p, r, f1 = _score(train_rows[3], test_rows[3], kind, False, config, n_trees, seed)
        rows.append(ComparisonRow(label, window_name[3], p, r, f1))
    for k in (2, 3):
        for monotone in (False, True):
            p, r, f1 = _score(train_rows[k], test_rows[k], "gbrt", monotone, config, n_trees, seed)
            label = "GBRT w/ MC" if monotone else "GBRT"
            rows.append(ComparisonRow(label, window_name[k], p, r, f1))
    return rows


def format_comparison(rows: Sequence[ComparisonRow]) -> str:
    header = f"{'Model':<28} {'Windows':<8} {'Precision':>9} {'Recall':>9} {'Macro F1':>9}"
    lines = [header, "-" * len(header)]
    for row in rows:
        lines.append(
            f"{row.model:<28} {row.window:<8} "
            f"{row.precision:>9.4f} {row.recall:>9.4f} {row.macro_f1:>9.4f}"
        )
    return "\n".join(lines)
