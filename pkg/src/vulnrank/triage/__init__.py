"""Triage automation: tf-idf text features, linear classifiers, evaluation.

Predicts the utility and opportune categories from CVE description text
so that subject-matter experts only have to label a seed corpus.
"""

from vulnrank.triage.features import (
    EmptyCorpus,
    FeatureVector,
    Vocabulary,
    design_matrix,
    featurize,
    fit_vocabulary,
    tokenize,
)
from vulnrank.triage.metrics import EmptyTestSet, EvalReport, evaluate, evaluate_predictions
from vulnrank.triage.modelio import MODEL_FORMAT_VERSION, ModelVersionError, load_model, save_model
from vulnrank.triage.svm import (
    CorpusTooSmall,
    DegenerateTaskWarning,
    DimensionMismatch,
    LinearModel,
    Task,
    TrainConfig,
    hinge_objective,
    predict,
    predict_text,
    split,
    train,
)

__all__ = [
    "CorpusTooSmall",
    "DegenerateTaskWarning",
    "DimensionMismatch",
    "EmptyCorpus",
    "EmptyTestSet",
    "EvalReport",
    "FeatureVector",
    "LinearModel",
    "MODEL_FORMAT_VERSION",
    "ModelVersionError",
    "Task",
    "TrainConfig",
    "Vocabulary",
    "design_matrix",
    "evaluate",
    "evaluate_predictions",
    "featurize",
    "fit_vocabulary",
    "hinge_objective",
    "load_model",
    "predict",
    "predict_text",
    "save_model",
    "split",
    "tokenize",
    "train",
]
