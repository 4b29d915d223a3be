"""Gradient-boosted regression trees with per-feature monotone constraints.

Constraints are enforced exactly with the standard two-part scheme: a split
on a constrained feature is rejected when its child means are ordered the
wrong way, and accepted splits propagate value bounds (the midpoint of the
child means) down both subtrees so that every leaf an increasing feature can
route to on its right is at least as large as every leaf on its left. Linear
regression and bootstrap-aggregated random forests are included as
baselines, all sharing one serialized model format.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

MODEL_FORMAT_VERSION = 1

_NEG_INF = float("-inf")
_POS_INF = float("inf")


@dataclass
class TrainConfig:
    n_rounds: int = 30
    max_depth: int = 4
    learning_rate: float = 1.0
    min_samples_leaf: int = 1
    min_gain: float = 0.0

    def __post_init__(self) -> None:
        if self.n_rounds < 1:
            raise ValueError("n_rounds must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    gain: float
    left_mean: float
    right_mean: float


class RegressionTree:
    """Binary regression tree over parallel node arrays; root is node 0.

    Internal nodes route x[feature] <= threshold to the left child. Leaves
    have feature == -1 and carry the prediction in `value`.
    """

    def __init__(
        self,
        feature: Sequence[int],
        threshold: Sequence[float],
        left: Sequence[int],
        right: Sequence[int],
        value: Sequence[float],
    ):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.feature)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(len(X), dtype=np.int64)
        while True:
            feat = self.feature[node]
            active = feat >= 0
            if not active.any():
                break
            rows = np.nonzero(active)[0]
            cur = node[rows]
            go_left = X[rows, self.feature[cur]] <= self.threshold[cur]
            node[rows] = np.where(go_left, self.left[cur], self.right[cur])
        return self.value[node]


def find_best_split(
    X: np.ndarray,
    y: np.ndarray,
    constraints: Optional[Sequence[int]] = None,
    min_samples_leaf: int = 1,
    min_gain: float = 0.0,
) -> Optional[Split]:
    """Greedy variance-reduction split over all (feature, midpoint) candidates.

    Candidate thresholds are the midpoints of consecutive distinct sorted
    feature values. The gain is the sum-of-squared-error reduction,
    n_l * n_r / n * (mean_l - mean_r)^2, and must strictly exceed min_gain.
    Ties break to the lowest feature index, then the smallest threshold. A
    candidate on a feature with constraint d != 0 is rejected when
    d * (mean_r - mean_l) < 0.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, n_features = X.shape
    if n < 2 * min_samples_leaf or n < 2:
        return None

    def sse(v: np.ndarray) -> float:
        return float(((v - v.mean()) ** 2).sum()) if len(v) else 0.0

    total = y.sum()
    parent_sse = sse(y)
    best: Optional[Split] = None
    sizes_l = np.arange(1, n, dtype=np.float64)
    sizes_r = n - sizes_l
    for f in range(n_features):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        csum = np.cumsum(y[order])[:-1]
        mean_l = csum / sizes_l
        mean_r = (total - csum) / sizes_r
        gain = sizes_l * sizes_r / n * (mean_l - mean_r) ** 2
        ok = (xs[:-1] < xs[1:]) & (sizes_l >= min_samples_leaf) & (sizes_r >= min_samples_leaf)
        direction = 0 if constraints is None else constraints[f]
        if direction != 0:
            ok &= direction * (mean_r - mean_l) >= 0
        ok &= gain > min_gain
        if not ok.any():
            continue
        i = int(np.argmax(np.where(ok, gain, _NEG_INF)))
        threshold = float((xs[i] + xs[i + 1]) / 2)
        # The scan's running-sum gains round differently per feature, which
        # would break ties between features that induce the same partition.
        # Rescore the winner directly so identical partitions get identical
        # gains and the lowest feature index wins.
        mask = X[:, f] <= threshold
        canonical_gain = parent_sse - sse(y[mask]) - sse(y[~mask])
        if best is None or canonical_gain > best.gain:
            best = Split(
                feature=f,
                threshold=threshold,
                gain=canonical_gain,
                left_mean=float(mean_l[i]),
                right_mean=float(mean_r[i]),
            )
    return best


def _grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: Optional[int],
    constraints: Optional[Sequence[int]],
    min_samples_leaf: int,
    min_gain: float,
) -> RegressionTree:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def grow(rows: np.ndarray, depth: int, lo: float, hi: float) -> int:
        node_value = float(y[rows].mean())
        split = None
        if max_depth is None or depth < max_depth:
            split = find_best_split(
                X[rows], y[rows], constraints, min_samples_leaf, min_gain
            )
        if split is None:
            if constraints is not None:
                node_value = min(max(node_value, lo), hi)
            node_id = len(feature)
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(node_value)
            return node_id
        lo_l, hi_l, lo_r, hi_r = lo, hi, lo, hi
        if constraints is not None and constraints[split.feature] != 0:
            # Clamping mid into the node's own interval keeps child intervals
            # nested and never inverted, even when both child means fall
            # outside the inherited bounds.
            mid = (split.left_mean + split.right_mean) / 2
            mid = min(max(mid, lo), hi)
            if constraints[split.feature] > 0:
                hi_l = min(hi, mid)
                lo_r = max(lo, mid)
            else:
                lo_l = max(lo, mid)
                hi_r = min(hi, mid)
        node_id = len(feature)
        feature.append(split.feature)
        threshold.append(split.threshold)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        go_left = X[rows, split.feature] <= split.threshold
        left[node_id] = grow(rows[go_left], depth + 1, lo_l, hi_l)
        right[node_id] = grow(rows[~go_left], depth + 1, lo_r, hi_r)
        return node_id

    grow(np.arange(len(y)), 0, _NEG_INF, _POS_INF)
    return RegressionTree(feature, threshold, left, right, value)


def _validate_matrix(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-dimensional, got shape {X.shape}")
    if len(X) == 0:
        raise ValueError("X is empty")
    if len(y) != len(X):
        raise ValueError(f"X has {len(X)} rows but y has {len(y)}")
    if np.isnan(X).any() or np.isnan(y).any():
        raise ValueError("NaN in training inputs")
    return X, y


def _default_names(n_features: int) -> tuple[str, ...]:
    return tuple(f"f{i}" for i in range(n_features))


def _ensemble_predict(
    base_score: float, learning_rate: float, trees: Sequence[RegressionTree], X: np.ndarray
) -> np.ndarray:
    total = np.zeros(len(X), dtype=np.float64)
    for tree in trees:
        total = total + tree.predict(X)
    return base_score + learning_rate * total


class _PredictMixin:
    feature_names: tuple[str, ...]

    def _check_input(self, x) -> tuple[np.ndarray, bool]:
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        if single:
            x = x.reshape(1, -1)
        if x.ndim != 2 or x.shape[1] != len(self.feature_names):
            raise ValueError(
                f"expected {len(self.feature_names)} features, got shape {x.shape}"
            )
        return x, single

    def predict(self, x):
        """Score one feature vector (returns float) or a matrix (returns array)."""
        X, single = self._check_input(x)
        out = self._predict_matrix(X)
        return float(out[0]) if single else out


@dataclass
class GBRTModel(_PredictMixin):
    base_score: float
    learning_rate: float
    constraints: tuple[int, ...]
    trees: list[RegressionTree]
    feature_names: tuple[str, ...]
    per_round_rmse: Optional[list[float]] = field(default=None, compare=False)

    def _predict_matrix(self, X: np.ndarray) -> np.ndarray:
        return _ensemble_predict(self.base_score, self.learning_rate, self.trees, X)


@dataclass
class RFModel(_PredictMixin):
    trees: list[RegressionTree]
    feature_names: tuple[str, ...]
    seed: int = 0

    def _predict_matrix(self, X: np.ndarray) -> np.ndarray:
        return _ensemble_predict(0.0, 1.0 / len(self.trees), self.trees, X)


@dataclass
class LinearModel(_PredictMixin):
    intercept: float
    coef: np.ndarray
    feature_names: tuple[str, ...]

    def _predict_matrix(self, X: np.ndarray) -> np.ndarray:
        return X @ self.coef + self.intercept


def fit_gbrt(
    X,
    y,
    config: TrainConfig = TrainConfig(),
    constraints: Optional[Sequence[int]] = None,
    feature_names: Optional[Sequence[str]] = None,
) -> GBRTModel:
    """Boost squared-error regression trees against the residuals.

    `constraints` maps each feature to -1 (non-increasing), 0 (free) or +1
    (non-decreasing); None disables the constraint machinery entirely, which
    is prediction-identical to an all-zero vector.
    """
    X, y = _validate_matrix(X, y)
    n, n_features = X.shape
    if constraints is not None:
        constraints = tuple(int(c) for c in constraints)
        if len(constraints) != n_features:
            raise ValueError(
                f"{len(constraints)} constraints for {n_features} features"
            )
        if any(c not in (-1, 0, 1) for c in constraints):
            raise ValueError("constraints must be -1, 0 or +1")
    names = tuple(feature_names) if feature_names is not None else _default_names(n_features)
    if len(names) != n_features:
        raise ValueError(f"{len(names)} feature names for {n_features} features")

    base_score = float(y.mean())
    pred = np.full(n, base_score)
    trees: list[RegressionTree] = []
    curve: list[float] = []
    for _ in range(config.n_rounds):
        residual = y - pred
        tree = _grow_tree(
            X,
            residual,
            config.max_depth,
            constraints,
            config.min_samples_leaf,
            config.min_gain,
        )
        trees.append(tree)
        pred = pred + config.learning_rate * tree.predict(X)
        curve.append(float(np.sqrt(np.mean((y - pred) ** 2))))
    stored = constraints if constraints is not None else tuple([0] * n_features)
    return GBRTModel(base_score, config.learning_rate, stored, trees, names, curve)


def fit_linear(X, y, feature_names: Optional[Sequence[str]] = None) -> LinearModel:
    """Ordinary least squares with intercept.

    The normal equations get a ridge term of 1e-8 so rank-deficient inputs
    (duplicated columns) stay finite; one iterative-refinement pass against
    the unregularized system removes the ridge bias on well-posed problems.
    """
    X, y = _validate_matrix(X, y)
    names = tuple(feature_names) if feature_names is not None else _default_names(X.shape[1])
    A = np.hstack([X, np.ones((len(X), 1))])
    M = A.T @ A
    b = A.T @ y
    regularized = M + 1e-8 * np.eye(M.shape[0])
    beta = np.linalg.solve(regularized, b)
    beta = beta + np.linalg.solve(regularized, b - M @ beta)
    return LinearModel(float(beta[-1]), beta[:-1].copy(), names)


def fit_rf(
    X,
    y,
    n_trees: int = 30,
    seed: int = 0,
    feature_names: Optional[Sequence[str]] = None,
) -> RFModel:
    """Random forest: unlimited-depth trees on bootstrap resamples.

    Every tree considers all features at each split; tree t draws its
    bootstrap from a generator seeded with (seed, t), so the forest is
    reproducible and trees are independent of each other's draws.
    """
    X, y = _validate_matrix(X, y)
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    names = tuple(feature_names) if feature_names is not None else _default_names(X.shape[1])
    n = len(X)
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng(np.random.SeedSequence([seed, t]))
        rows = rng.integers(0, n, size=n)
        trees.append(
            _grow_tree(X[rows], y[rows], None, None, 1, 0.0)
        )
    return RFModel(trees, names, seed=seed)


# --- serialization ------------------------------------------------------------

def _tree_doc(tree: RegressionTree) -> dict:
    nodes = []
    for i in range(len(tree)):
        if tree.feature[i] < 0:
            nodes.append({"value": float(tree.value[i])})
        else:
            nodes.append(
                {
                    "feature": int(tree.feature[i]),
                    "threshold": float(tree.threshold[i]),
                    "left": int(tree.left[i]),
                    "right": int(tree.right[i]),
                }
            )
    return {"nodes": nodes}


def _doc_for_model(model) -> dict:
    if isinstance(model, GBRTModel):
        kind, base, lr = "gbrt", model.base_score, model.learning_rate
        constraints = list(model.constraints)
        trees = model.trees
        extra = {}
    elif isinstance(model, RFModel):
        kind, base, lr = "rf", 0.0, 1.0 / len(model.trees)
        constraints = [0] * len(model.feature_names)
        trees = model.trees
        extra = {"seed": model.seed}
    elif isinstance(model, LinearModel):
        kind, base, lr = "linear", model.intercept, 1.0
        constraints = [0] * len(model.feature_names)
        trees = []
        extra = {"coefficients": [float(c) for c in model.coef]}
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": kind,
        "base_score": float(base),
        "learning_rate": float(lr),
        "feature_names": list(model.feature_names),
        "constraints": constraints,
        "trees": [_tree_doc(t) for t in trees],
    }
    doc.update(extra)
    return doc


def _emit(obj) -> str:
    # json.dumps prints shortest-repr floats; emit 17 significant digits so
    # any parser reconstructs the exact double.
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError("non-finite number in model document")
        return format(obj, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_emit(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_emit(v)}" for k, v in obj.items()) + "}"
    raise TypeError(f"cannot emit {type(obj).__name__}")


def dumps_model(model) -> str:
    return _emit(_doc_for_model(model))


def save_model(path: str, model) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model) + "\n")


def _tree_from_doc(doc: dict) -> RegressionTree:
    feature, threshold, left, right, value = [], [], [], [], []
    for node in doc["nodes"]:
        if "value" in node:
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(float(node["value"]))
        else:
            feature.append(int(node["feature"]))
            threshold.append(float(node["threshold"]))
            left.append(int(node["left"]))
            right.append(int(node["right"]))
            value.append(0.0)
    return RegressionTree(feature, threshold, left, right, value)


def load_model(path: str):
    """Load a model.json written by save_model; dispatches on its kind."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format_version {doc.get('format_version')!r}")
    kind = doc.get("kind")
    names = tuple(doc["feature_names"])
    trees = [_tree_from_doc(t) for t in doc["trees"]]
    if kind == "gbrt":
        return GBRTModel(
            base_score=float(doc["base_score"]),
            learning_rate=float(doc["learning_rate"]),
            constraints=tuple(int(c) for c in doc["constraints"]),
            trees=trees,
            feature_names=names,
        )
    if kind == "rf":
        return RFModel(trees, names, seed=int(doc.get("seed", 0)))
    if kind == "linear":
        return LinearModel(
            float(doc["base_score"]), np.asarray(doc["coefficients"], dtype=np.float64), names
        )
    raise ValueError(f"unknown model kind {kind!r}")
