"Generator training: batches, losses, the optimisation loop and gradient checks."

from emphi.training.batching import (
    EncodedExample,
    TrainingBatch,
    DialogueDataset,
    encode_examples,
    collate,
    make_loader,
)
from emphi.training.losses import (
    LossBreakdown,
    LossTensors,
    LossWeights,
    compute_losses,
    nll_loss,
    prior_kl,
    emotion_loss,
    copy_rate_loss,
    combine,
)
from emphi.training.trainer import EpochRecord, TrainResult, train, evaluate_loss
from emphi.training.gradcheck import gradient_check, miniature_model, miniature_batch

__all__ = [
    "EncodedExample",
    "TrainingBatch",
    "DialogueDataset",
    "encode_examples",
    "collate",
    "make_loader",
    "LossBreakdown",
    "LossTensors",
    "LossWeights",
    "compute_losses",
    "nll_loss",
    "prior_kl",
    "emotion_loss",
    "copy_rate_loss",
    "combine",
    "EpochRecord",
    "TrainResult",
    "train",
    "evaluate_loss",
    "gradient_check",
    "miniature_model",
    "miniature_batch",
]
