"Common classes and helpers sub-package for EmpHi"

from emphi.common.exceptions import (
    EmphiException,
    ConfigError,
    CorpusError,
    VocabularyError,
    EvaluationError,
    MissingArtifactError,
    NonFiniteLossError,
    DivergenceError,
)
from emphi.common.labels import (
    Intent,
    INTENT_NAMES,
    NUM_INTENTS,
    EMOTION_NAMES,
    NUM_EMOTIONS,
    emotion_id,
    emotion_name,
)

__all__ = [
    "EmphiException",
    "ConfigError",
    "CorpusError",
    "VocabularyError",
    "EvaluationError",
    "MissingArtifactError",
    "NonFiniteLossError",
    "DivergenceError",
    "Intent",
    "INTENT_NAMES",
    "NUM_INTENTS",
    "EMOTION_NAMES",
    "NUM_EMOTIONS",
    "emotion_id",
    "emotion_name",
]
