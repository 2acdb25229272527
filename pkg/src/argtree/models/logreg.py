"""Binary logistic regression over sparse + dense feature blocks.

The design matrix is CSR: bag-of-words differences occupy the leading
columns, dense features (standardized with training-split statistics)
the trailing ones. A single weight vector spans both blocks; the bias is
excluded from the L2 penalty. Labels are the two class names in sorted
order; the second one is the positive class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from ..features import FeatureRecord, FeatureSchema
from .config import (
    DIVERGENCE_EPOCHS,
    DIVERGENCE_FACTOR,
    EpochStats,
    TrainConfig,
    TrainingDivergedError,
)


def standardization_stats(
    records: Sequence[FeatureRecord], dense_names: Sequence[str]
) -> tuple[np.ndarray, np.ndarray]:
    """Mean and std per dense feature; zero-variance features get std 1."""
    if not dense_names:
        return np.zeros(0), np.ones(0)
    values = np.array(
        [[record.dense.get(name, 0.0) for name in dense_names] for record in records]
    )
    mean = values.mean(axis=0) if len(records) else np.zeros(len(dense_names))
    std = values.std(axis=0) if len(records) else np.ones(len(dense_names))
    std = np.where(std == 0.0, 1.0, std)
    return mean, std


def design_matrix(
    records: Sequence[FeatureRecord],
    schema: FeatureSchema,
    dense_mean: np.ndarray,
    dense_std: np.ndarray,
) -> sp.csr_matrix:
    n_sparse = len(schema.sparse_names)
    dense_names = schema.dense_names
    data: list[float] = []
    indices: list[int] = []
    indptr = [0]
    for record in records:
        for index in sorted(record.sparse):
            indices.append(index)
            data.append(record.sparse[index])
        for j, name in enumerate(dense_names):
            raw = record.dense.get(name, 0.0)
            indices.append(n_sparse + j)
            data.append((raw - dense_mean[j]) / dense_std[j])
        indptr.append(len(data))
    return sp.csr_matrix(
        (np.array(data), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(records), schema.width),
    )


def label_vector(records: Sequence[FeatureRecord], label_names: Sequence[str]) -> np.ndarray:
    if len(label_names) != 2:
        raise ValueError(f"expected exactly 2 classes, got {list(label_names)}")
    positive = label_names[1]
    y = np.zeros(len(records))
    for i, record in enumerate(records):
        if record.label not in label_names:
            raise ValueError(f"unknown label {record.label!r}")
        if record.label == positive:
            y[i] = 1.0
    return y


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    expz = np.exp(z[~pos])
    out[~pos] = expz / (1.0 + expz)
    return out


def loss_and_grad(
    X: sp.csr_matrix, y: np.ndarray, w: np.ndarray, b: float, l2: float
) -> tuple[float, np.ndarray, float]:
    """Mean cross-entropy plus 0.5 * l2 * ||w||^2; bias unpenalized."""
    z = X @ w + b
    p = _sigmoid(z)
    eps = 1e-12
    ce = -np.mean(y * np.log(p + eps) + (1.0 - y) * np.log(1.0 - p + eps))
    loss = float(ce + 0.5 * l2 * float(w @ w))
    residual = (p - y) / len(y)
    grad_w = np.asarray(X.T @ residual).ravel() + l2 * w
    grad_b = float(residual.sum())
    return loss, grad_w, grad_b


@dataclass
class LogisticRegressionModel:
    task: str
    feature_set: str
    sparse_names: list[str]
    dense_names: list[str]
    label_names: list[str]
    weights: np.ndarray
    bias: float
    dense_mean: np.ndarray
    dense_std: np.ndarray
    seed: int
    history: list[EpochStats] = field(default_factory=list)

    def schema(self) -> FeatureSchema:
        return FeatureSchema(
            task=self.task,
            feature_set=self.feature_set,
            sparse_names=self.sparse_names,
            dense_names=self.dense_names,
        )

    def decision_values(self, records: Sequence[FeatureRecord]) -> np.ndarray:
        X = design_matrix(records, self.schema(), self.dense_mean, self.dense_std)
        return X @ self.weights + self.bias

    def predict_labels(self, records: Sequence[FeatureRecord]) -> list[str]:
        values = self.decision_values(records)
        return [self.label_names[1] if v > 0 else self.label_names[0] for v in values]

    def top_features(self, k: int = 20) -> list[tuple[str, float]]:
        names = list(self.sparse_names) + list(self.dense_names)
        order = sorted(range(len(names)), key=lambda i: (-abs(self.weights[i]), names[i]))
        return [(names[i], float(self.weights[i])) for i in order[:k]]


def _batches(n: int, batch_size: int, order: np.ndarray) -> Iterator[np.ndarray]:
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def train_logreg(
    schema: FeatureSchema,
    train_records: Sequence[FeatureRecord],
    dev_records: Optional[Sequence[FeatureRecord]] = None,
    config: Optional[TrainConfig] = None,
) -> LogisticRegressionModel:
    """Seeded mini-batch gradient descent with best-dev checkpointing."""
    config = config or TrainConfig()
    config.validate()
    if not train_records:
        raise ValueError("no training records")
    label_names = sorted({record.label for record in train_records})
    if len(label_names) == 1:
        raise ValueError(f"training data contains a single class {label_names[0]!r}")
    dense_mean, dense_std = standardization_stats(train_records, schema.dense_names)
    X = design_matrix(train_records, schema, dense_mean, dense_std)
    y = label_vector(train_records, label_names)
    X_dev = y_dev = None
    if dev_records:
        X_dev = design_matrix(dev_records, schema, dense_mean, dense_std)
        y_dev = label_vector(dev_records, label_names)

    w = np.zeros(schema.width)
    b = 0.0
    rng = np.random.default_rng(config.seed)
    history: list[EpochStats] = []
    best = (w.copy(), b)
    best_dev = -1.0
    stale = 0
    initial_loss: Optional[float] = None
    high_loss_streak = 0

    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(len(train_records))
        for batch in _batches(len(train_records), config.batch_size, order):
            _, grad_w, grad_b = loss_and_grad(X[batch], y[batch], w, b, config.l2)
            w -= config.learning_rate * grad_w
            b -= config.learning_rate * grad_b
        epoch_loss, _, _ = loss_and_grad(X, y, w, b, config.l2)
        if not np.isfinite(epoch_loss):
            raise TrainingDivergedError(f"non-finite loss at epoch {epoch}")
        if initial_loss is None:
            initial_loss = epoch_loss
        if epoch_loss > DIVERGENCE_FACTOR * initial_loss:
            high_loss_streak += 1
            if high_loss_streak >= DIVERGENCE_EPOCHS:
                raise TrainingDivergedError(
                    f"loss {epoch_loss:.4f} exceeded {DIVERGENCE_FACTOR}x the initial "
                    f"loss for {DIVERGENCE_EPOCHS} consecutive epochs"
                )
        else:
            high_loss_streak = 0

        dev_accuracy: Optional[float] = None
        if X_dev is not None:
            predictions = (X_dev @ w + b) > 0
            dev_accuracy = float(np.mean(predictions == (y_dev > 0.5)))
        history.append(EpochStats(epoch=epoch, train_loss=epoch_loss, dev_accuracy=dev_accuracy))

        if dev_accuracy is not None:
            if dev_accuracy > best_dev:
                best_dev = dev_accuracy
                best = (w.copy(), b)
                stale = 0
            else:
                stale += 1
                if config.patience and stale >= config.patience:
                    break
        else:
            best = (w.copy(), b)

    w, b = best
    return LogisticRegressionModel(
        task=schema.task,
        feature_set=schema.feature_set,
        sparse_names=list(schema.sparse_names),
        dense_names=list(schema.dense_names),
        label_names=label_names,
        weights=w,
        bias=b,
        dense_mean=dense_mean,
        dense_std=dense_std,
        seed=config.seed,
        history=history,
    )
