"The response intent classifier (recognition network and audit classifier)."

from emphi.classifier.model import (
    IntentClassifier,
    IntentDistribution,
    classify,
    recognize,
    recognize_many,
    argmax_intent,
    predict_proba,
)
from emphi.classifier.trainer import (
    ClassifierReport,
    train_classifier,
    evaluate_accuracy,
    encode_text,
    save_classifier,
    load_classifier,
    recognition_records,
    write_recognition,
    read_recognition,
)

__all__ = [
    "IntentClassifier",
    "IntentDistribution",
    "classify",
    "recognize",
    "recognize_many",
    "argmax_intent",
    "predict_proba",
    "ClassifierReport",
    "train_classifier",
    "evaluate_accuracy",
    "encode_text",
    "save_classifier",
    "load_classifier",
    "recognition_records",
    "write_recognition",
    "read_recognition",
]
