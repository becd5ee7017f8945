"""One-vs-rest linear SVM trained by stochastic sub-gradient descent.

L2-regularized hinge loss with the 1/(lambda*t) step schedule. The bias
is trained as a regularized constant feature, which keeps the huge early
steps of the schedule from leaving an unshrinkable offset behind; it is
still stored and exposed separately from the token weights.

Training is single-threaded and fully deterministic: the per-epoch
shuffle order comes from one seeded generator, so identical data, config
and seed reproduce bitwise-identical weights.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Hashable, Sequence

import numpy as np

from vulnrank.feeds import InvalidCategory, LabeledExample
from vulnrank.triage.features import EmptyCorpus, FeatureVector, Vocabulary, design_matrix, featurize


class CorpusTooSmall(ValueError):
    """Too few labeled examples to split into train and test sets."""


class DimensionMismatch(ValueError):
    """Feature vector dimension differs from the model's vocabulary size."""


class DegenerateTaskWarning(UserWarning):
    """Train set holds a single class; the model will predict it constantly."""


class Task(Enum):
    UTILITY = "utility"
    OPPORTUNE = "opportune"

    @property
    def classes(self) -> tuple[int, ...]:
        return (0, 1, 2) if self is Task.UTILITY else (0, 1)

    def label_of(self, example: LabeledExample) -> int:
        return example.utility if self is Task.UTILITY else example.opportune


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    reg_lambda: float = 1e-4
    seed: int = 42
    schedule: str = "inv_lambda_t"

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.reg_lambda <= 0:
            raise ValueError("reg_lambda must be positive")
        if self.schedule != "inv_lambda_t":
            raise ValueError(f"unsupported step schedule {self.schedule!r}")


@dataclass(eq=False)
class LinearModel:
    """Per-class weight vectors and biases over a fixed vocabulary."""

    task: Task
    classes: tuple[int, ...]
    weights: np.ndarray
    bias: np.ndarray
    vocab: Vocabulary
    config: TrainConfig


def split(
    examples: Sequence[LabeledExample],
    train_fraction: float = 0.8,
    seed: int = 42,
    stratify_key: Callable[[LabeledExample], Hashable] | None = None,
) -> tuple[list[LabeledExample], list[LabeledExample]]:
    """Seeded shuffle-then-prefix split into (train, test).

    The partition is exact: train and test are disjoint and together
    hold every example. Unstratified by default; pass ``stratify_key``
    to split each key group at the same fraction instead.
    """
    n = len(examples)
    if n < 5:
        raise CorpusTooSmall(f"need at least 5 examples, got {n}")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")

    rng = np.random.RandomState(seed)
    if stratify_key is None:
        order = rng.permutation(n)
        cut = int(train_fraction * n)
        train_idx, test_idx = order[:cut], order[cut:]
    else:
        groups: dict[Hashable, list[int]] = {}
        for i, ex in enumerate(examples):
            groups.setdefault(stratify_key(ex), []).append(i)
        train_idx, test_idx = [], []
        for key in sorted(groups, key=repr):
            members = np.array(groups[key])
            order = rng.permutation(len(members))
            cut = int(train_fraction * len(members))
            train_idx.extend(members[order[:cut]])
            test_idx.extend(members[order[cut:]])
    if len(train_idx) == 0 or len(test_idx) == 0:
        raise ValueError(f"fraction {train_fraction} leaves an empty train or test set")
    return [examples[i] for i in train_idx], [examples[i] for i in test_idx]


def _validate_labels(task: Task, examples: Sequence[LabeledExample]) -> np.ndarray:
    labels = []
    for ex in examples:
        label = task.label_of(ex)
        if label not in task.classes:
            raise InvalidCategory(f"{ex.cve_id}: label {label} illegal for task {task.value}")
        labels.append(label)
    return np.array(labels)


def train(
    task: Task,
    examples: Sequence[LabeledExample],
    vocab: Vocabulary,
    config: TrainConfig = TrainConfig(),
) -> LinearModel:
    """Fit one binary classifier per class over the task's full class set.

    A single-class train set cannot support discrimination; the model
    then predicts that class constantly and a DegenerateTaskWarning is
    emitted instead of failing, which is what sparse label regimes need.
    """
    if not examples:
        raise EmptyCorpus("train set is empty")
    labels = _validate_labels(task, examples)
    classes = task.classes
    n_classes = len(classes)

    present = set(labels.tolist())
    if len(present) == 1:
        only = present.pop()
        warnings.warn(
            f"train set for {task.value} holds the single class {only}; "
            "producing a constant predictor",
            DegenerateTaskWarning,
        )
        bias = np.where(np.array(classes) == only, 1.0, -1.0)
        return LinearModel(
            task=task,
            classes=classes,
            weights=np.zeros((n_classes, vocab.size)),
            bias=bias,
            vocab=vocab,
            config=config,
        )

    X = design_matrix(vocab, [ex.description for ex in examples])
    n = X.shape[0]
    # Constant column appended so the bias rides in the weight matrix.
    Xa = np.hstack([X, np.ones((n, 1))])
    Y = np.array([[1.0 if label == c else -1.0 for c in classes] for label in labels])

    W = np.zeros((n_classes, vocab.size + 1))
    lam = config.reg_lambda
    rng = np.random.RandomState(config.seed)
    t = 0
    for _ in range(config.epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            x = Xa[i]
            ys = Y[i]
            margins = ys * (W @ x)
            W *= 1.0 - 1.0 / t
            violated = margins < 1.0
            if violated.any():
                W[violated] += (eta * ys[violated])[:, None] * x[None, :]

    return LinearModel(
        task=task,
        classes=classes,
        weights=W[:, :-1].copy(),
        bias=W[:, -1].copy(),
        vocab=vocab,
        config=config,
    )


def predict(model: LinearModel, features: FeatureVector) -> tuple[int, dict[int, float]]:
    """Predicted category plus the per-class decision values.

    Ties go to the lowest category value.
    """
    if features.dim != model.weights.shape[1]:
        raise DimensionMismatch(
            f"feature dim {features.dim} != model dim {model.weights.shape[1]}"
        )
    scores = model.weights @ features.to_dense() + model.bias
    best = int(np.argmax(scores))
    return model.classes[best], {c: float(s) for c, s in zip(model.classes, scores)}


def predict_text(model: LinearModel, text: str) -> int:
    """Featurize with the model's own vocabulary and predict."""
    category, _ = predict(model, featurize(model.vocab, text))
    return category


def hinge_objective(model: LinearModel, examples: Sequence[LabeledExample]) -> float:
    """The exact objective the trainer descends, summed over classes:

    mean hinge loss plus (lambda/2) * ||augmented weights||^2.
    """
    labels = _validate_labels(model.task, examples)
    X = design_matrix(model.vocab, [ex.description for ex in examples])
    Xa = np.hstack([X, np.ones((X.shape[0], 1))])
    Wa = np.hstack([model.weights, model.bias[:, None]])
    total = 0.0
    for ci, c in enumerate(model.classes):
        ys = np.where(labels == c, 1.0, -1.0)
        margins = ys * (Xa @ Wa[ci])
        hinge = np.maximum(0.0, 1.0 - margins).mean()
        total += hinge + 0.5 * model.config.reg_lambda * float(Wa[ci] @ Wa[ci])
    return total
