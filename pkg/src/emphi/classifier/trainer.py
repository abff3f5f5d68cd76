"""trainer.py - classifier training, accuracy, checkpoints and the recognition
label cache consumed by generator training."""

# python standard library imports
from __future__ import annotations
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence
import copy
import logging
import math

# python 3rd party
import numpy as np
import numpy.typing as npt
import torch
import torch.nn.functional as F
from torch.optim import Adam
from torch.optim.lr_scheduler import ReduceLROnPlateau

# Local imports
from emphi.classifier.model import IntentClassifier, collate_ids, predict_proba, argmax_intent
from emphi.common.artifacts import read_jsonl, read_manifest, save_tensors_atomic, write_jsonl, write_manifest
from emphi.common.exceptions import CorpusError, EvaluationError, MissingArtifactError, NonFiniteLossError
from emphi.common.labels import NUM_INTENTS
from emphi.common.seeding import numpy_rng, seed_module_init
from emphi.config import ClassifierConfig
from emphi.corpus.intents import IntentExample
from emphi.corpus.tokenizer import tokenize
from emphi.corpus.vocab import Vocabulary

logger = logging.getLogger(__name__)

CHECKPOINT_NAME = "classifier.pt"
MANIFEST_NAME = "manifest.json"

EpochCallback = Callable[[int, float, float], None]
"Called with (epoch, train loss, held-out accuracy) after every epoch."


@dataclass
class ClassifierReport:
    held_out_accuracy: float
    epochs_run: int
    best_epoch: int
    train_losses: list[float] = field(default_factory=list)
    held_out_size: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "held_out_accuracy": self.held_out_accuracy,
            "epochs_run": self.epochs_run,
            "best_epoch": self.best_epoch,
            "train_losses": self.train_losses,
            "held_out_size": self.held_out_size,
        }


def encode_text(vocab: Vocabulary, text: str, max_tokens: int) -> list[int]:
    "Tokenize, cap and encode; an input with no tokens becomes a single UNK."
    ids = vocab.encode(tokenize(text)[:max_tokens])
    return ids or [vocab.unk_id]


def _split(n: int, fraction: float, seed: int) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    order = numpy_rng(seed, "classifier_split").permutation(n)
    held = min(max(1, round(n * fraction)), n - 1) if n > 1 else 0
    return order[held:], order[:held]


def _accuracy(model: IntentClassifier, sequences: list[list[int]], labels: npt.NDArray[np.int64]) -> float:
    if not sequences:
        return float("nan")
    probs = predict_proba(model, sequences)
    return float(np.mean(np.argmax(probs, axis=1) == labels))


def train_classifier(
    corpus: Sequence[IntentExample],
    vocab: Vocabulary,
    config: ClassifierConfig,
    seed: int,
    on_epoch: EpochCallback | None = None,
) -> tuple[IntentClassifier, ClassifierReport]:
    """Minimise 9-way cross-entropy with Adam, halving the learning rate when the
    training loss plateaus. Keeps the parameters with the best held-out accuracy.

    Raises:
        CorpusError: If the corpus is empty.
        NonFiniteLossError: If the loss becomes NaN or infinite.
    """

    if not corpus:
        raise CorpusError("cannot train the intent classifier on an empty corpus")

    sequences = [encode_text(vocab, example.text, config.max_tokens) for example in corpus]
    labels = np.array([int(example.intent) for example in corpus], dtype=np.int64)
    train_idx, held_idx = _split(len(corpus), config.held_out_fraction, seed)
    held_sequences = [sequences[i] for i in held_idx]
    held_labels = labels[held_idx]

    seed_module_init(seed, "classifier_init")
    model = IntentClassifier(len(vocab), config, pad_id=vocab.pad_id)
    optimizer = Adam(model.parameters(), lr=config.learning_rate)
    scheduler = ReduceLROnPlateau(optimizer, mode="min", factor=0.5, patience=1)
    shuffle_rng = numpy_rng(seed, "classifier_shuffle")

    report = ClassifierReport(held_out_accuracy=0.0, epochs_run=0, best_epoch=0, held_out_size=len(held_idx))
    best_state = copy.deepcopy(model.state_dict())
    best_accuracy = -1.0
    stale = 0

    for epoch in range(1, config.max_epochs + 1):
        model.train()
        order = train_idx[shuffle_rng.permutation(len(train_idx))]
        total, count = 0.0, 0
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            ids, lengths = collate_ids([sequences[i] for i in batch], vocab.pad_id)
            target = torch.from_numpy(labels[batch])
            loss = F.cross_entropy(model(ids, lengths), target)
            value = float(loss.item())
            if not math.isfinite(value):
                raise NonFiniteLossError("classifier_cross_entropy", value)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += value * len(batch)
            count += len(batch)

        epoch_loss = total / max(count, 1)
        scheduler.step(epoch_loss)
        report.train_losses.append(epoch_loss)
        report.epochs_run = epoch

        # With no held-out examples, fall back to training accuracy for model selection.
        if held_sequences:
            accuracy = _accuracy(model, held_sequences, held_labels)
        else:
            accuracy = _accuracy(model, [sequences[i] for i in train_idx], labels[train_idx])
        logger.info(f"classifier epoch {epoch}: loss={epoch_loss:.4f} held_out_acc={accuracy:.4f}")
        if on_epoch is not None:
            on_epoch(epoch, epoch_loss, accuracy)

        if accuracy > best_accuracy:
            best_accuracy = accuracy
            best_state = copy.deepcopy(model.state_dict())
            report.best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                logger.info(f"classifier early stop after epoch {epoch}")
                break

    model.load_state_dict(best_state)
    model.eval()
    report.held_out_accuracy = best_accuracy
    return model, report


def evaluate_accuracy(
    model: IntentClassifier,
    corpus: Sequence[IntentExample],
    vocab: Vocabulary,
    max_tokens: int = 64,
) -> float:
    """Fraction of examples whose recognised intent equals the label.

    Raises:
        EvaluationError: If the corpus is empty.
    """

    if not corpus:
        raise EvaluationError("accuracy of an empty corpus is undefined")
    sequences = [encode_text(vocab, example.text, max_tokens) for example in corpus]
    predicted = [argmax_intent(row) for row in predict_proba(model, sequences)]
    hits = sum(1 for guess, example in zip(predicted, corpus) if guess == example.intent)
    return hits / len(corpus)


# ~ Checkpoints ~ #


def save_classifier(
    directory: Path,
    model: IntentClassifier,
    config: ClassifierConfig,
    manifest: dict[str, Any],
) -> None:
    save_tensors_atomic(
        directory / CHECKPOINT_NAME,
        {"state_dict": model.state_dict(), "vocab_size": model.vocab_size, "config": config.model_dump()},
    )
    write_manifest(directory / MANIFEST_NAME, manifest)


def load_classifier(directory: Path) -> tuple[IntentClassifier, dict[str, Any]]:
    """Load a frozen classifier and its manifest.

    Raises:
        MissingArtifactError: If no checkpoint exists in `directory`.
    """

    path = directory / CHECKPOINT_NAME
    if not path.exists():
        raise MissingArtifactError(str(path), "train-classifier")
    payload = torch.load(path, map_location="cpu", weights_only=False)
    model = IntentClassifier(payload["vocab_size"], ClassifierConfig(**payload["config"]))
    model.load_state_dict(payload["state_dict"])
    model.eval()
    for parameter in model.parameters():
        parameter.requires_grad_(False)
    return model, read_manifest(directory / MANIFEST_NAME)


# ~ Recognition cache ~ #


def recognition_records(model: IntentClassifier, sequences: Sequence[Sequence[int]]) -> list[dict[str, Any]]:
    "Per-response q_r(z|X) and its argmax, ready for `write_recognition`."
    probs = predict_proba(model, sequences)
    return [{"probs": [float(p) for p in row], "intent": int(argmax_intent(row))} for row in probs]


def write_recognition(path: Path, records: list[dict[str, Any]]) -> None:
    write_jsonl(path, records)


def read_recognition(path: Path) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.int64]]:
    """Load a recognition cache as (N×9 probabilities, N intents).

    Raises:
        MissingArtifactError: If the cache has not been written yet.
    """

    if not path.exists():
        raise MissingArtifactError(str(path), "train-classifier")
    records = read_jsonl(path)
    probs = np.array([record["probs"] for record in records], dtype=np.float64).reshape(-1, NUM_INTENTS)
    intents = np.array([record["intent"] for record in records], dtype=np.int64)
    return probs, intents
