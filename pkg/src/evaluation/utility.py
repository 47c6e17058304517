from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np

from autodiff import (
    Adam,
    AdamConfig,
    Tensor,
    add,
    constant,
    gradient_values,
    matmul,
    mul,
    no_grad,
    parameter,
    reduce_mean,
    softplus,
    sub,
)
from data import Table, TableSchema, fit_encoder

logger = logging.getLogger("run")

Average = Literal["binary", "macro"]


@dataclass(frozen=True)
class ClassifierConfig:
    epochs: int = 500
    lr: float = 0.01

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not self.lr > 0:
            raise ValueError(f"lr must be > 0, got {self.lr}")


@dataclass(frozen=True)
class F1Result:
    score: float
    average: Average
    positive: Optional[str]
    flags: Tuple[str, ...] = ()


class ReferenceClassifier:
    """Single-layer logistic model, one-vs-rest over the target categories.

    Two classes share one logit whose positive class is the last category. Trained full-batch
    with Adam on the mean softplus cross-entropy.
    """

    def __init__(
        self,
        classes: Sequence[str],
        n_features: int,
        config: ClassifierConfig = ClassifierConfig(),
    ) -> None:
        if len(classes) < 2:
            raise ValueError(f"classifier needs at least 2 classes, got {len(classes)}")
        if n_features < 1:
            raise ValueError("classifier needs at least one feature column")
        self.classes = tuple(classes)
        self.config = config
        outputs = 1 if len(self.classes) == 2 else len(self.classes)
        self.weight = parameter(np.zeros((n_features, outputs)), name="clf.weight")
        self.bias = parameter(np.zeros((1, outputs)), name="clf.bias")

    def logits(self, x: np.ndarray) -> Tensor:
        return add(matmul(constant(x), self.weight), self.bias)

    def targets(self, codes: np.ndarray) -> np.ndarray:
        if len(self.classes) == 2:
            return (codes == 1).astype(np.float64).reshape(-1, 1)
        return np.eye(len(self.classes))[codes]

    def fit(self, x: np.ndarray, codes: np.ndarray) -> ReferenceClassifier:
        y = constant(self.targets(codes))
        params = [self.weight, self.bias]
        opt = Adam(params, AdamConfig(lr=self.config.lr, beta1=0.9, beta2=0.999))
        for _ in range(self.config.epochs):
            z = self.logits(x)
            # log(1 + e^z) - y z is the cross-entropy of sigmoid(z) against y
            loss = reduce_mean(sub(softplus(z), mul(y, z)))
            opt.step(gradient_values(loss, params))
        return self

    def predict_codes(self, x: np.ndarray) -> np.ndarray:
        with no_grad():
            z = self.logits(x).values
        if len(self.classes) == 2:
            return (z[:, 0] > 0.0).astype(np.int64)
        return np.argmax(z, axis=1).astype(np.int64)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.classes, dtype=object)[self.predict_codes(x)]


def _binary_f1(y_true: np.ndarray, y_pred: np.ndarray, positive: str) -> float:
    t = y_true == positive
    p = y_pred == positive
    tp = float(np.sum(t & p))
    fp = float(np.sum(~t & p))
    fn = float(np.sum(t & ~p))
    denom = 2.0 * tp + fp + fn
    return 0.0 if denom == 0 else 2.0 * tp / denom


def f1_score(
    y_true: Sequence[str] | np.ndarray,
    y_pred: Sequence[str] | np.ndarray,
    positive: Optional[str] = None,
    average: Average = "binary",
    labels: Optional[Sequence[str]] = None,
) -> float:
    """F1 of the positive class, or the unweighted mean of per-class F1 with ``average="macro"``."""
    t = np.asarray(y_true, dtype=object).astype(str)
    p = np.asarray(y_pred, dtype=object).astype(str)
    if t.shape != p.shape:
        raise ValueError(f"label arrays differ in length: {t.shape[0]} vs {p.shape[0]}")
    if average == "binary":
        if positive is None:
            raise ValueError("binary F1 needs a positive class")
        return _binary_f1(t, p, positive)
    if average != "macro":
        raise ValueError(f"unknown average {average!r}")
    classes = list(labels) if labels is not None else sorted(set(t) | set(p))
    if not classes:
        return 0.0
    return float(np.mean([_binary_f1(t, p, c) for c in classes]))


def _features(schema: TableSchema, target: str) -> List[str]:
    return [n for n in schema.names if n != target]


def _check_target(train: Table, test: Table, target: str) -> None:
    if target not in test.schema.names:
        raise ValueError(f"target column {target!r} not in test table")
    if target not in train.schema.names:
        raise ValueError(f"target column {target!r} not in training table")
    if not test.schema.column(target).is_categorical:
        raise ValueError(f"target column {target!r} must be categorical")
    if train.schema != test.schema:
        raise ValueError("training and test schemas differ")


def downstream_f1(
    train: Table,
    test: Table,
    target: str,
    config: ClassifierConfig = ClassifierConfig(),
) -> F1Result:
    """Fit the reference classifier on ``train`` and score it on ``test``.

    Binary targets report F1 of the last category; wider targets report macro F1.
    """
    _check_target(train, test, target)
    col = test.schema.column(target)
    classes = col.categories
    feature_names = _features(train.schema, target)
    if not feature_names:
        raise ValueError("downstream F1 needs at least one feature column")

    feat_schema = TableSchema(tuple(train.schema.column(n) for n in feature_names))
    train_feats = Table(feat_schema, train.frame[feature_names].reset_index(drop=True))
    test_feats = Table(feat_schema, test.frame[feature_names].reset_index(drop=True))
    encoder = fit_encoder(train_feats)
    x_train = encoder.encode(train_feats)
    x_test = encoder.encode(test_feats)

    flags: List[str] = []
    train_codes = train.category_codes(target)
    if len(np.unique(train_codes)) < 2:
        flags.append("single-class-train-labels")
    test_labels = test.frame[target].astype(str).to_numpy()
    if len(np.unique(test_labels)) < 2:
        flags.append("single-class-test-labels")

    clf = ReferenceClassifier(classes, x_train.shape[1], config).fit(x_train, train_codes)
    pred = clf.predict(x_test)
    if len(classes) == 2:
        positive: Optional[str] = classes[-1]
        score = f1_score(test_labels, pred, positive=positive, average="binary")
        average: Average = "binary"
    else:
        positive = None
        score = f1_score(test_labels, pred, average="macro")
        average = "macro"
    for f in flags:
        logger.warning("EVAL F1 FLAG %s", f)
    logger.info("EVAL F1 target=%s average=%s score=%.4f", target, average, score)
    return F1Result(score, average, positive, tuple(flags))
