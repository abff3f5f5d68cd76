"""trainer.py - the generator optimisation loop.

Adam with gradient-norm clipping, early stopping on the validation total, a
divergence guard, and an append-only JSON-lines epoch log."""

# python standard library imports
from __future__ import annotations
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable
import copy
import logging

# python 3rd party
import torch
from torch.nn.utils import clip_grad_norm_
from torch.optim import Adam

# Local imports
from emphi.common.artifacts import append_jsonl, write_text_atomic
from emphi.common.exceptions import DivergenceError
from emphi.common.seeding import torch_generator
from emphi.config import TrainingConfig
from emphi.corpus.vocab import Vocabulary
from emphi.model.network import EmphiModel
from emphi.training.batching import DialogueDataset, TrainingBatch, make_loader
from emphi.training.losses import LossBreakdown, LossWeights, compute_losses

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train: LossBreakdown
    valid_total: float

    def to_dict(self) -> dict[str, Any]:
        return {"epoch": self.epoch, **self.train.to_dict(), "valid_total": self.valid_total}


@dataclass
class TrainResult:
    history: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    best_valid_total: float = float("inf")
    stopped_early: bool = False


EpochCallback = Callable[[EpochRecord], None]


def _mean_breakdown(parts: list[tuple[LossBreakdown, int]], weights: LossWeights) -> LossBreakdown:
    count = sum(size for _, size in parts)
    l1, l2, l3, l4, total = (
        sum(getattr(part, name) * size for part, size in parts) / count
        for name in ("l1", "l2", "l3", "l4", "total")
    )
    return LossBreakdown(l1=l1, l2=l2, l3=l3, l4=l4, total=total, weights=weights)


@torch.no_grad()
def evaluate_loss(model: EmphiModel, batches: Iterable[TrainingBatch], weights: LossWeights) -> LossBreakdown:
    "Example-weighted mean of the batch losses, in eval mode."

    was_training = model.training
    model.eval()
    try:
        parts = [(compute_losses(model, batch, weights).breakdown(), len(batch)) for batch in batches]
    finally:
        model.train(was_training)
    return _mean_breakdown(parts, weights)


def train(
    model: EmphiModel,
    train_set: DialogueDataset,
    valid_set: DialogueDataset,
    vocab: Vocabulary,
    config: TrainingConfig,
    seed: int,
    log_path: Path | None = None,
    on_epoch: EpochCallback | None = None,
) -> TrainResult:
    """Optimise `model` in place and leave it holding the best-validation weights.

    Args:
        model: Freshly initialised generator (ablations already applied).
        train_set: Encoded training examples.
        valid_set: Encoded validation examples, used for early stopping.
        vocab: Vocabulary the examples were encoded with.
        config: Optimisation settings; loss weights are taken after ablations.
        seed: Run seed; only the training-shuffle stream is drawn here.
        log_path: JSON-lines epoch log, truncated at the start of the run.
        on_epoch: Progress hook.
    Raises:
        NonFiniteLossError: If any loss term turns NaN or infinite.
        DivergenceError: If the training total stays above `divergence_factor`
            times the first epoch's total for `divergence_epochs` epochs in a row.
    """

    weights = config.effective_loss_weights
    optimizer = Adam(model.parameters(), lr=config.learning_rate)
    train_loader = make_loader(
        train_set, vocab, config.batch_size, shuffle=True, generator=torch_generator(seed, "training_shuffle")
    )
    valid_loader = make_loader(valid_set, vocab, config.batch_size)

    if log_path is not None:
        write_text_atomic(log_path, "")

    result = TrainResult()
    best_state = copy.deepcopy(model.state_dict())
    initial_total: float | None = None
    runaway = 0
    stale = 0

    for epoch in range(1, config.max_epochs + 1):
        model.train()
        parts: list[tuple[LossBreakdown, int]] = []
        for batch in train_loader:
            losses = compute_losses(model, batch, weights)
            optimizer.zero_grad()
            losses.total.backward()
            clip_grad_norm_(model.parameters(), config.grad_clip)
            optimizer.step()
            parts.append((losses.breakdown(), len(batch)))

        train_breakdown = _mean_breakdown(parts, weights)
        valid_total = train_breakdown.total
        if len(valid_set):
            valid_total = evaluate_loss(model, valid_loader, weights).total
        record = EpochRecord(epoch=epoch, train=train_breakdown, valid_total=valid_total)
        result.history.append(record)
        if log_path is not None:
            append_jsonl(log_path, record.to_dict())
        if on_epoch is not None:
            on_epoch(record)
        logger.info(
            f"epoch {epoch}: L1={train_breakdown.l1:.4f} L2={train_breakdown.l2:.4f} "
            f"L3={train_breakdown.l3:.4f} L4={train_breakdown.l4:.4f} "
            f"total={train_breakdown.total:.4f} valid_total={valid_total:.4f}"
        )

        if initial_total is None:
            initial_total = train_breakdown.total
        elif train_breakdown.total > config.divergence_factor * initial_total:
            runaway += 1
            if runaway >= config.divergence_epochs:
                raise DivergenceError(
                    f"training total {train_breakdown.total:.4f} exceeded {config.divergence_factor}x "
                    f"the initial {initial_total:.4f} for {runaway} epochs"
                )
        else:
            runaway = 0

        if valid_total < result.best_valid_total:
            result.best_valid_total = valid_total
            result.best_epoch = epoch
            best_state = copy.deepcopy(model.state_dict())
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                result.stopped_early = True
                logger.info(f"early stop after epoch {epoch}; best epoch {result.best_epoch}")
                break

    model.load_state_dict(best_state)
    return result
