"""Versioned model files: JSON holding task, vocabulary, weights, and config.

Floats are serialized via their shortest round-tripping repr, so a
save/load/save cycle is byte-identical. Loading rejects any format
version other than the one this code writes.
"""

from __future__ import annotations

import json

import numpy as np

from vulnrank.triage.features import Vocabulary
from vulnrank.triage.svm import LinearModel, Task, TrainConfig

MODEL_FORMAT_VERSION = 1


class ModelVersionError(ValueError):
    """Model file format version is not supported by this code."""


def save_model(path, model: LinearModel) -> None:
    tokens = sorted(model.vocab.index, key=model.vocab.index.__getitem__)
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "task": model.task.value,
        "classes": list(model.classes),
        "config": {
            "epochs": model.config.epochs,
            "reg_lambda": model.config.reg_lambda,
            "seed": model.config.seed,
            "schedule": model.config.schedule,
        },
        "vocabulary": {
            "num_documents": model.vocab.num_documents,
            "tokens": [[t, model.vocab.document_frequency[t]] for t in tokens],
        },
        "weights": model.weights.tolist(),
        "bias": model.bias.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_model(path) -> LinearModel:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelVersionError(
            f"{path}: model format version {version!r} unsupported "
            f"(this build reads version {MODEL_FORMAT_VERSION})"
        )
    tokens = doc["vocabulary"]["tokens"]
    vocab = Vocabulary(
        index={t: i for i, (t, _) in enumerate(tokens)},
        document_frequency={t: df for t, df in tokens},
        num_documents=doc["vocabulary"]["num_documents"],
    )
    return LinearModel(
        task=Task(doc["task"]),
        classes=tuple(doc["classes"]),
        weights=np.array(doc["weights"], dtype=float).reshape(len(doc["classes"]), vocab.size),
        bias=np.array(doc["bias"], dtype=float),
        vocab=vocab,
        config=TrainConfig(**doc["config"]),
    )
